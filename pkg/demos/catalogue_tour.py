"""Tour of the known perfect protractors and what makes them perfect.

Run: python demos/catalogue_tour.py
"""

import numpy as np

from qprotractor.protractor import all_known_protractors, axis_distribution, orthogonal_family, overlap_curve
from qprotractor.spinalg import PureState

np.set_printoptions(precision=4, suppress=True)

for j, variant, state in all_known_protractors():
    worst = max(np.max(np.abs(axis_distribution(state, a) - 1 / state.dim)) for a in "xyz")
    gram = max(orthogonal_family(state, a).residual for a in "xyz")
    print(f"j={str(j):>3} variant {variant}: max |p_m - 1/d| = {worst:.1e}, Gram residual = {gram:.1e}")

# A basis state is optimal about x and y but not z.
up = PureState.basis_state("1/2", "1/2")
print("\n|1/2, +1/2> distributions:")
for axis in "xyz":
    print(f"  {axis}: {axis_distribution(up, axis)}")

# The overlap of a perfect protractor with its rotated copy vanishes at multiples of 2 pi / d.
state = next(s for j, _, s in all_known_protractors() if j.twice_j == 6)
phis = np.linspace(0, 2 * np.pi, 8)
print("\nspin-3 protractor, |<psi|R_z(phi)|psi>|^2 at phi = 2 pi k / 7:")
print(overlap_curve(state, "z", 2 * np.pi * np.arange(7) / 7))
