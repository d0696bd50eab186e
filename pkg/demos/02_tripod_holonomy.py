"""
Non-abelian holonomy in a tripod
================================

Three ground states couple to one excited state.  Two zero-energy dark
states remain, and steering the couplings around a loop rotates the dark
plane by a 2x2 unitary that depends only on the loop's geometry.
"""

import math

import numpy as np

from adiapert.exact import exact_propagator
from adiapert.geomphase import wrap_phase, wz_holonomy
from adiapert.hampath import Schedule, TripodParams, tripod_ion_path

theta = math.pi / 4
path = tripod_ion_path(TripodParams(theta=theta), Schedule(100.0, "sinusoidal-ramp"))
print("spectrum at t=0:", np.round(path.frame(0.0).eigenvalues, 6))

V = wz_holonomy(path, 1)
np.set_printoptions(precision=5, suppress=True)
print("\nholonomy of the dark block:\n", V)
print("eigenphases:", np.round(np.sort(np.angle(np.linalg.eigvals(V))), 5),
      " expected +-", round(abs(wrap_phase(2 * math.pi * (1 - math.cos(theta)))), 5))

# finite-time evolution approaches it as 1/T
print(f"\n{'T':>6} {'|U B - B V|':>12} {'times T':>8}")
for T in (25.0, 50.0, 100.0, 200.0):
    p = tripod_ion_path(TripodParams(theta=theta), Schedule(T, "sinusoidal-ramp"))
    b0 = p.frame(0.0).block_vectors(1)
    dev = np.linalg.norm(exact_propagator(p) @ b0 - b0 @ wz_holonomy(p, 1), 2)
    print(f"{T:6.0f} {dev:12.3e} {dev * T:8.3f}")
