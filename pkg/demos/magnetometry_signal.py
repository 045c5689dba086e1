"""Spin-1 protractor as a magnetometer probe: circles, signals and fits.

Run: python demos/magnetometry_signal.py
"""

import numpy as np

from qprotractor.metrology import (
    SignalParams,
    discrete_success_probability,
    fit_circle,
    fit_signal,
    m_vector,
    prepare_protractor_sequence,
    protractor_target,
    rotation_sweep,
    synthesize_signal,
)
from qprotractor.protractor import known_protractor

target = protractor_target()
print(f"preparation fidelity: {abs(np.vdot(target.amplitudes, prepare_protractor_sequence().amplitudes)) ** 2:.12f}")

for k in "xyz":
    rows = rotation_sweep(target, k)
    circle = fit_circle(rows[:, 1:3])
    print(f"axis {k}: sweep circle radius {circle.radius:.6f}, m3 spread {np.ptp(rows[:, 3]):.1e}")

params = SignalParams(noise_sigma=0.01)
m = m_vector(target)
fit = fit_signal(synthesize_signal(m, params, seed=1), params)
print("\ntrue  (m1, m2, m3):", np.round(m.as_array(), 4))
print("fit   (m1, m2, m3):", np.round(fit.m.as_array(), 4), "+/-", np.round(fit.m.stderr, 4))

print("\nguessing one of n rotation angles about z:")
for j, n in [("1", 3), ("1", 6), ("3", 7), ("3", 14)]:
    res = discrete_success_probability(known_protractor(j), "z", n)
    print(f"  j={j}, n={n:2d}: success probability {res.probability:.4f}")
