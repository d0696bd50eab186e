"""
Error budget of a small gate array
==================================

Gates on disjoint qubits run in parallel rounds.  Each gate's non-adiabatic
deviation is computed in context and carried to the end of the circuit;
to leading order the circuit's total deviation is the sum of these vectors,
and its norm is bounded by the sum of the individual norms.
"""

import numpy as np

from adiapert.gatearray import GateOp, GateSchedule, compose_and_measure, shor_bound
from adiapert.gates import MODEL_GATES


def op(name, qubits, ratio):
    g = MODEL_GATES[name]
    return GateOp(g.path(g.duration_for(ratio)), qubits, g.kind, name)


rng = np.random.default_rng(5)
psi = rng.normal(size=8) + 1j * rng.normal(size=8)
psi /= np.linalg.norm(psi)

for ratio in (0.02, 0.01, 0.005):
    rounds = [[op("nmr_single", [0], ratio), op("nmr_two_qubit", [1, 2], ratio)],
              [op("josephson", [1], ratio)],
              [op("nmr_two_qubit", [0, 2], ratio)]]
    c = compose_and_measure(GateSchedule(rounds, 3), psi)
    b = c.budget
    print(f"1/(gap T) = {ratio}:  measured {c.sigma:.4e}   |sum of vectors| {b.vector_sum_norm:.4e}   "
          f"sum of norms {b.predicted_sum:.4e}")
    print("   per round:", np.round(c.measured_by_round, 5), " running budget:", np.round(b.round_totals, 5))

# how many gates a per-gate error allows, and what that means for factoring
for eps in (1e-2, 1e-3, 1e-4):
    m, n = shor_bound(eps)
    print(f"eps={eps:g}: at most {m:g} gates, numbers up to about {n:.3g}")
