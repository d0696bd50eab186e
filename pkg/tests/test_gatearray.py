import math

import numpy as np
import pytest

from adiapert.errors import DimensionOverflow, OutOfRange, QubitOverlap
from adiapert.exact import exact_propagator
from adiapert.gatearray import (
    GateOp,
    GateSchedule,
    apply_on,
    bell_state,
    compose_and_measure,
    embed_operator,
    entangled_input_check,
    ghz_state,
    shor_bound,
)
from adiapert.gates import MODEL_GATES
from adiapert.hampath import SIGMA_X, SIGMA_Z

RATIO = 0.01


def gate(name, qubits, scale=1.0, ratio=RATIO):
    g = MODEL_GATES[name]
    return GateOp(g.path(scale * g.duration_for(ratio)), qubits, g.kind, name)


def product_state(n, rng):
    psi = np.ones(1, dtype=complex)
    for _ in range(n):
        q = rng.normal(size=2) + 1j * rng.normal(size=2)
        psi = np.kron(psi, q / np.linalg.norm(q))
    return psi


class TestPlumbing:
    def test_apply_on_matches_kron(self, rng):
        psi = rng.normal(size=8) + 1j * rng.normal(size=8)
        eye = np.eye(2)
        np.testing.assert_allclose(apply_on(SIGMA_X, psi, [0], 3), np.kron(SIGMA_X, np.eye(4)) @ psi)
        np.testing.assert_allclose(apply_on(SIGMA_Z, psi, [2], 3), np.kron(np.eye(4), SIGMA_Z) @ psi)
        cz = np.kron(SIGMA_Z, SIGMA_X)
        np.testing.assert_allclose(apply_on(cz, psi, [0, 1], 3), np.kron(cz, eye) @ psi)
        # reversed qubit order swaps the factors
        np.testing.assert_allclose(apply_on(cz, psi, [1, 0], 3), np.kron(np.kron(SIGMA_X, SIGMA_Z), eye) @ psi)

    def test_embed_operator_on_separated_qubits(self):
        op = np.kron(SIGMA_X, SIGMA_Z)
        big = embed_operator(op, [0, 2], 3)
        expected = np.kron(np.kron(SIGMA_X, np.eye(2)), SIGMA_Z)
        np.testing.assert_allclose(big, expected)

    def test_validation(self):
        with pytest.raises(QubitOverlap):
            GateOp(MODEL_GATES["nmr_two_qubit"].path(10.0), (1, 1))
        with pytest.raises(ValueError):
            GateOp(MODEL_GATES["nmr_single"].path(10.0), (0, 1))
        with pytest.raises(QubitOverlap):
            GateSchedule([[gate("nmr_single", [0]), gate("nmr_two_qubit", [0, 1])]], 2)
        with pytest.raises(DimensionOverflow):
            GateSchedule([], 13)
        with pytest.raises(ValueError):
            GateSchedule([[gate("nmr_single", [3])]], 2)
        with pytest.raises(ValueError):
            GateSchedule([], 1, idle=np.array([[0, 1], [0, 0]]))


class TestComposition:
    def test_single_gate_matches_standalone(self):
        g = gate("nmr_single", [0])
        psi0 = g.path.frame(0.0).eigenvectors[:, 0]
        c = compose_and_measure(GateSchedule([[g]], 1), psi0)
        from adiapert.geomphase import transport

        u = exact_propagator(g.path, tolerance=1e-10)
        v = transport(g.path, [g.duration]).propagator()
        assert c.sigma == pytest.approx(np.linalg.norm((u - v) @ psi0), rel=1e-9)
        assert c.budget.predicted_sum == pytest.approx(c.sigma, rel=1e-9)
        assert c.second_order_residual < 1e-12

    def test_sequential_gates_add(self):
        g1, g2 = gate("nmr_single", [0]), gate("josephson", [0], scale=1.3)
        psi0 = np.array([1, 0], dtype=complex)
        c = compose_and_measure(GateSchedule([[g1], [g2]], 1), psi0)
        total = c.budget.predicted_sum
        assert c.sigma <= total * (1 + 1e-6) + 10 * total ** 2
        assert c.second_order_residual <= 10 * total ** 2

    def test_round_permutation_invariance(self, rng):
        a, b = gate("nmr_single", [0]), gate("josephson", [1])
        c2 = gate("nmr_two_qubit", [2, 3])
        psi0 = product_state(4, rng)
        one = compose_and_measure(GateSchedule([[a, b, c2]], 4), psi0)
        two = compose_and_measure(GateSchedule([[c2, b, a]], 4), psi0)
        assert abs(one.sigma - two.sigma) < 1e-9
        np.testing.assert_allclose(one.exact, two.exact, atol=1e-9)

    def test_budget_accounting(self, rng):
        rounds = [[gate("nmr_single", [0]), gate("josephson", [1])],
                  [gate("nmr_two_qubit", [0, 1])],
                  [gate("nmr_single", [1], scale=2.0)]]
        c = compose_and_measure(GateSchedule(rounds, 2), product_state(2, rng))
        b = c.budget
        assert b.predicted_sum == pytest.approx(float(np.sum(b.norms)))
        assert np.all(np.diff(b.round_totals) >= 0)
        assert b.round_totals[-1] == pytest.approx(b.predicted_sum)
        assert len(c.measured_by_round) == 3
        assert c.measured_by_round[-1] == pytest.approx(c.sigma)
        assert b.vector_sum_norm <= b.predicted_sum + 1e-15
        assert c.second_order_residual <= 10 * b.predicted_sum ** 2
        assert len(b.to_dict()["gates"]) == 4

    def test_residual_is_second_order(self):
        psi0 = np.array([1, 0, 0, 0], dtype=complex)
        ratios = []
        for scale in (1.0, 2.0):
            rounds = [[gate("nmr_single", [0], scale), gate("josephson", [1], scale)],
                      [gate("nmr_two_qubit", [0, 1], scale)]]
            c = compose_and_measure(GateSchedule(rounds, 2), psi0)
            ratios.append(c.second_order_residual / c.budget.predicted_sum ** 2)
        assert max(ratios) < 1.0

    def test_idle_rotation_is_carried(self):
        g = gate("nmr_single", [0])
        psi0 = np.array([1, 0, 0, 0], dtype=complex)
        bare = compose_and_measure(GateSchedule([[g]], 2), psi0)
        idled = compose_and_measure(GateSchedule([[g]], 2, idle=0.3 * SIGMA_Z), psi0)
        assert idled.sigma == pytest.approx(bare.sigma, rel=1e-9)
        assert not np.allclose(idled.exact, bare.exact)

    def test_input_validation(self):
        s = GateSchedule([[gate("nmr_single", [0])]], 1)
        with pytest.raises(ValueError):
            compose_and_measure(s, [1, 0, 0, 0])
        with pytest.raises(ValueError):
            compose_and_measure(s, [1, 1])


class TestEntangledInputs:
    def test_bell(self):
        r = entangled_input_check(gate("nmr_single", [0], ratio=0.05), bell_state(), 2)
        assert r.consistent and r.deviation < 1e-9 and r.branches == 2

    def test_ghz_three_qubits(self):
        r = entangled_input_check(gate("josephson", [1], ratio=0.05), ghz_state(3), 3)
        assert r.consistent and r.deviation < 1e-9

    def test_two_qubit_gate_on_ghz(self):
        r = entangled_input_check(gate("nmr_two_qubit", [2, 0], ratio=0.05), ghz_state(3), 3)
        assert r.consistent and r.deviation < 1e-9

    def test_product_input(self, rng):
        r = entangled_input_check(gate("nmr_single", [1], ratio=0.05), product_state(2, rng), 2)
        assert r.consistent


class TestBound:
    def test_values(self):
        m, n = shor_bound(0.01)
        assert m == 100.0
        assert n == pytest.approx(10 ** ((1 / 3.0) ** (1 / 3)))
        assert abs(n - 4.93) < 0.01

    def test_monotone(self):
        assert shor_bound(1e-4)[1] > shor_bound(1e-3)[1] > shor_bound(1e-2)[1]

    @pytest.mark.parametrize("eps", [0.0, -0.1, 1.0, 2.0, math.nan])
    def test_out_of_range(self, eps):
        with pytest.raises(OutOfRange):
            shor_bound(eps)
