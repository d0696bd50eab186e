import math

import numpy as np
import pytest

from adiapert.aqc import (
    AqcInstance,
    largest_probability_readout,
    path_independence_check,
    random_instance,
    run_aqc,
    transverse_field,
)
from adiapert.errors import EndpointMismatch, GapScanFailure

COSTS2 = np.array([1.3, 0.2, 2.1, 1.7])


def test_transverse_field_spectrum():
    e = np.linalg.eigvalsh(transverse_field(3))
    np.testing.assert_allclose(e, [-3, -1, -1, -1, 1, 1, 1, 3], atol=1e-12)


def test_instance_validation():
    with pytest.raises(ValueError):
        AqcInstance(2, [0.0, 0.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        AqcInstance(2, [0.0, 1.0, 2.0])
    with pytest.raises(ValueError):
        AqcInstance(9, np.arange(512.0))
    with pytest.raises(ValueError):
        AqcInstance(1, [0.0, 1.0], beginning=np.zeros((2, 2)))
    inst = AqcInstance(2, COSTS2)
    assert inst.minimizer == 1 and inst.bitstring(1) == "01"
    assert inst.problem_gap == pytest.approx(1.1)


def test_constant_hamiltonian_stays_put():
    inst = AqcInstance(2, COSTS2, beginning=np.diag(COSTS2))
    run = run_aqc(inst, 5.0)
    assert run.probability == pytest.approx(1.0, abs=1e-9)
    assert run.readout.index == 1 and run.readout.margin == pytest.approx(1.0)


def test_readout_of_ground_state():
    psi = np.zeros(8, dtype=complex)
    psi[5] = 1.0
    r = largest_probability_readout(psi)
    assert (r.index, r.bitstring, r.probability) == (5, "101", 1.0)
    assert not r.indecisive and not r.near_indecisive


def test_indecisive_flags():
    psi = np.array([1, 1, 0, 0], dtype=complex) / math.sqrt(2)
    assert largest_probability_readout(psi, uncertainty=1e-8).indecisive
    psi = np.sqrt([0.6, 0.4, 0, 0]).astype(complex)
    r = largest_probability_readout(psi)
    assert r.index == 0 and not r.indecisive and r.near_indecisive


def test_slow_run_finds_minimum():
    inst = AqcInstance(2, COSTS2)
    g = inst.min_gap()
    run = run_aqc(inst, 10.0 / g)
    assert run.readout.index == inst.minimizer
    assert run.estimate == pytest.approx(0.1)
    assert run.correction_norm == pytest.approx(math.sqrt(1 - run.probability))
    assert run.readout.uncertainty < 1e-4
    assert set(run.to_dict()["readout"]) >= {"bitstring", "margin", "near_indecisive"}


def test_fast_run_is_flagged():
    inst = AqcInstance(2, COSTS2)
    run = run_aqc(inst, 0.5 / inst.min_gap())
    assert run.readout.near_indecisive


def test_deviation_falls_with_T():
    inst = AqcInstance(2, COSTS2)
    t0 = 20 * inst.adiabatic_parameter()
    devs = [run_aqc(inst, T, tolerance=1e-12, estimate_uncertainty=False).correction_norm
            for T in (t0, 2 * t0, 4 * t0)]
    assert devs[0] > devs[1] > devs[2]
    assert 2.5 < devs[0] / devs[2] < 6.0


def test_random_instances_reproducible():
    a = random_instance(3, np.random.default_rng(7), min_gap=0.25)
    b = random_instance(3, np.random.default_rng(7), min_gap=0.25)
    assert np.array_equal(a.costs, b.costs)
    assert a.min_gap() >= 0.25
    with pytest.raises(GapScanFailure):
        random_instance(2, np.random.default_rng(0), min_gap=50.0, attempts=20)


def test_closing_gap_is_reported():
    # H_b diagonal and degenerate-free, costs reverse its order: a true crossing
    hb = np.diag([0.0, 1.0])
    inst = AqcInstance(1, [1.0, 0.0], beginning=hb)
    with pytest.raises(GapScanFailure):
        inst.min_gap()


class TestPathIndependence:
    def test_catalyst_identical(self, rng):
        inst = AqcInstance(2, COSTS2)
        h = rng.normal(size=(4, 4))
        cat = h + h.T
        rep = path_independence_check(inst, 40.0, [("bare", "linear", None), ("cat", "linear", cat)])
        assert rep.identical(0, 1)
        assert rep.ratios[1] == 1.0

    def test_schedule_shape_rescales(self):
        inst = AqcInstance(2, COSTS2)
        rep = path_independence_check(inst, 40.0, [("lin", "linear", None), ("ramp", "sinusoidal-ramp", None)])
        assert rep.ratios[1] == pytest.approx(math.pi / 2, rel=1e-12)
        assert rep.endpoint_speeds[1] / rep.endpoint_speeds[0] == pytest.approx(math.pi / 2, rel=1e-12)

    def test_endpoint_mismatch(self):
        inst = AqcInstance(1, [0.0, 1.0])

        class Shifted(AqcInstance):
            def path(self, T, shape="linear", catalyst=None):
                if catalyst is None:
                    return super().path(T, shape)
                return AqcInstance(1, [0.0, 2.0]).path(T, shape)

        s = Shifted(1, [0.0, 1.0])
        with pytest.raises(EndpointMismatch):
            path_independence_check(s, 10.0, [("a", "linear", None), ("b", "linear", np.eye(2))])
        with pytest.raises(ValueError):
            path_independence_check(inst, 10.0, [("a", "linear", None)])
