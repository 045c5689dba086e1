"""Protractors living in the top irrep of several smaller spins.

Run: python demos/entanglement_structure.py
"""

import numpy as np

from qprotractor.entangle import embed, entanglement_entropy, partial_trace
from qprotractor.protractor import known_protractor
from qprotractor.spinalg import HalfInt

np.set_printoptions(precision=4, suppress=True)

cases = [
    ("1", ["1/2", "1/2"]),
    ("3/2", ["1/2", "1/2", "1/2"]),
    ("3/2", ["1", "1/2"]),
    ("3", ["3/2", "3/2"]),
    ("3", ["1", "1", "1"]),
]
for j, parts in cases:
    composite = embed(known_protractor(j), parts)
    dims = [HalfInt.parse(p).dim for p in parts]
    rho = partial_trace(composite, dims, [0])
    print(f"j={j} in {' x '.join(parts)}: S(first part) = {entanglement_entropy(rho):.4f}  (max {np.log(dims[0]):.4f})")

rho = partial_trace(embed(known_protractor(3), ["3/2", "3/2"]), [4, 4], [0])
print("\nspin-3 protractor, reduced state of one spin-3/2:")
print(rho.entries)
print("eigenvalues:", rho.eigenvalues())
