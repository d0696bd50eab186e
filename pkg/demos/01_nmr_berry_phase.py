"""
Berry phase of a spin in a rotating field
=========================================

A spin-1/2 sits in a field of fixed magnitude whose direction sweeps a cone
of half-angle theta.  After one turn each level picks up a geometric phase
equal to half the solid angle enclosed, with opposite signs for the two
levels.  We compute it, then check how far the exact evolution strays from
the adiabatic prediction as the sweep slows down.
"""

import math

import numpy as np

from adiapert.exact import integrate_schrodinger
from adiapert.geomphase import berry_phase, dynamic_phase
from adiapert.hampath import NMRSingleParams, Schedule, nmr_single_path
from adiapert.perturb import AmplitudeVector, nonadiabatic_error, zeroth_order_propagate

# geometric phase against the solid angle, for a few cone angles
# (phases live in (-pi, pi], so at theta = pi/2 both levels read pi)
print(f"{'theta':>8} {'gamma_0':>10} {'gamma_1':>10} {'pi(1-cos)':>10}")
for theta in (math.pi / 6, math.pi / 3, math.pi / 2):
    path = nmr_single_path(NMRSingleParams.from_cone(1.0, theta), Schedule(10.0))
    print(f"{theta:8.4f} {berry_phase(path, 0):10.6f} {berry_phase(path, 1):10.6f} "
          f"{math.pi * (1 - math.cos(theta)):10.6f}")

# the dynamic phase is just -E T; the geometric part does not care about T
path = nmr_single_path(NMRSingleParams.from_cone(1.0, math.pi / 3), Schedule(40.0))
print("\ndynamic phase of the lower level at T=40:", round(dynamic_phase(path, 0, 40.0), 6))

# slower sweeps follow the adiabatic state more closely, roughly as 1/T
print(f"\n{'T':>8} {'|exact - adiabatic|':>20} {'first-order |eps|':>18} {'1/(gap T)':>10}")
for T in (25.0, 50.0, 100.0, 200.0, 400.0):
    path = nmr_single_path(NMRSingleParams.from_cone(1.0, math.pi / 3), Schedule(T, "sinusoidal-ramp"))
    a0 = AmplitudeVector.level(path.frame(0.0), 0)
    exact = integrate_schrodinger(path, a0.state())
    dev = np.linalg.norm(exact - zeroth_order_propagate(path, a0, T))
    rep = nonadiabatic_error(path, a0)
    print(f"{T:8.0f} {dev:20.3e} {rep.norm:18.3e} {rep.estimate:10.3e}")
