import math

import numpy as np
import pytest

from adiapert.errors import BlockGapViolation, DegenerateLevel
from adiapert.geomphase import (
    berry_phase,
    discrete_berry_phase,
    dynamic_phase,
    dynamic_phases,
    phase_ledger,
    transport,
    wrap_phase,
    wz_holonomy,
)
from adiapert.hampath import (
    HamiltonianPath,
    IonTwoBitParams,
    NMRSingleParams,
    Schedule,
    TripodParams,
    constant_path,
    ion_two_bit_path,
    nmr_single_path,
    tripod_hamiltonian,
    tripod_ion_path,
)
from adiapert.spectral import InstantaneousFrame

from conftest import random_unitary


def nmr(theta, T=10.0, shape="linear"):
    return nmr_single_path(NMRSingleParams.from_cone(1.0, theta), Schedule(T, shape))


def tripod(theta=math.pi / 4, T=10.0):
    return tripod_ion_path(TripodParams(theta=theta), Schedule(T))


def test_wrap_phase():
    assert wrap_phase(math.pi) == pytest.approx(math.pi)
    assert wrap_phase(-math.pi) == pytest.approx(math.pi)
    assert wrap_phase(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    np.testing.assert_allclose(wrap_phase(np.array([0.0, 2 * math.pi])), [0.0, 0.0], atol=1e-15)


class TestDynamicPhase:
    def test_constant(self):
        p = constant_path(np.diag([-0.3, 1.2]), 4.0)
        assert dynamic_phase(p, 0, 4.0) == pytest.approx(1.2)
        assert dynamic_phase(p, 1, 2.5) == pytest.approx(-3.0)

    def test_dark_level_zero(self):
        p = tripod()
        assert abs(dynamic_phase(p, 1, 7.3)) < 1e-12

    def test_nmr_splitting(self):
        p = nmr_single_path(NMRSingleParams(omega0=3.0, omega1=4.0, omega=0.0), Schedule(2.0))
        eta = dynamic_phases(p, [2.0])[0]
        assert eta[1] - eta[0] == pytest.approx(-5.0 * 2.0)
        assert eta[0] == pytest.approx(5.0 * 2.0 / 2)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            dynamic_phase(tripod(), 0, 11.0)


class TestBerryPhase:
    def test_constant_path(self):
        assert berry_phase(constant_path(np.diag([0.0, 1.0]), 3.0), 0) == 0.0

    @pytest.mark.parametrize("theta", [math.pi / 6, math.pi / 3, math.pi / 2])
    def test_solid_angle(self, theta):
        p = nmr(theta)
        g0, g1 = berry_phase(p, 0), berry_phase(p, 1)
        target = wrap_phase(math.pi * (1 - math.cos(theta)))
        assert abs(wrap_phase(abs(g0) - abs(target))) < 1e-6
        assert abs(wrap_phase(g0 + g1)) < 1e-6

    @pytest.mark.parametrize("theta", [0.1, 0.05])
    def test_small_angle(self, theta):
        g = abs(berry_phase(nmr(theta), 0))
        assert g == pytest.approx(math.pi * theta ** 2 / 2, rel=theta ** 2)

    def test_schedule_independent(self):
        a = berry_phase(nmr(0.8, shape="linear"), 0)
        b = berry_phase(nmr(0.8, T=3.0, shape="sinusoidal-ramp"), 0)
        assert abs(wrap_phase(a - b)) < 1e-8

    def test_gauge_invariance(self, rng):
        p = nmr(1.0)
        grid = np.linspace(0, 10, 4001)
        v = np.linalg.eigh(p.hamiltonian(grid))[1][:, :, 0]
        base = discrete_berry_phase(v, reference=v[0])
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, len(grid)))
        phases[-1] = phases[0]
        v2 = v * phases[:, None]
        assert abs(wrap_phase(discrete_berry_phase(v2, reference=v2[0]) - base)) < 1e-8

    def test_reversal_flips_sign(self):
        p = nmr(1.2)
        assert abs(wrap_phase(berry_phase(p, 0) + berry_phase(p.reversed(), 0))) < 1e-8

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateLevel):
            berry_phase(tripod(), 1)

    def test_ion_dark_state(self):
        p = ion_two_bit_path(IonTwoBitParams(1.0, 1.2, 0.5, 0.25), Schedule(10.0))
        expected = -2 * math.pi * 1.0 / (1.0 + 1.2 ** 4)
        assert abs(wrap_phase(berry_phase(p, 1) - expected)) < 1e-6


class TestHolonomy:
    def test_constant_path_identity(self):
        p = constant_path(tripod_hamiltonian(1, 2, 2), 5.0, (1, 2, 1))
        np.testing.assert_allclose(wz_holonomy(p, 1), np.eye(2), atol=1e-10)

    def test_abelian_reduction(self):
        p = nmr(0.9)
        v = wz_holonomy(p, 0)
        assert v.shape == (1, 1)
        assert abs(wrap_phase(np.angle(v[0, 0]) - berry_phase(p, 0))) < 1e-8

    @pytest.mark.parametrize("theta", [math.pi / 4, math.pi / 6])
    def test_tripod_loop(self, theta):
        v = wz_holonomy(tripod(theta), 1)
        assert np.max(np.abs(v.conj().T @ v - np.eye(2))) < 1e-10
        phases = np.sort(np.angle(np.linalg.eigvals(v)))
        a = wrap_phase(2 * math.pi * (1 - math.cos(theta)))
        np.testing.assert_allclose(phases, np.sort([-abs(a), abs(a)]), atol=1e-7)

    def test_concatenation(self):
        p = tripod(T=10.0)
        t1, t2 = 3.7, 8.2
        tr = transport(p, [t1])
        v01 = tr.holonomy(1)
        start = InstantaneousFrame(t1, tr.eigenvalues[0], tr.reference[0], tr.blocks)
        v12 = wz_holonomy(p, 1, t2, t0=t1, initial=start)
        v02 = wz_holonomy(p, 1, t2)
        np.testing.assert_allclose(v02, v12 @ v01, atol=1e-8)

    def test_gauge_covariance(self, rng):
        p = tripod()
        v = wz_holonomy(p, 1)
        f0 = p.frame(0.0)
        w = random_unitary(rng, 2)
        vecs = f0.eigenvectors.copy()
        vecs[:, 1:3] = vecs[:, 1:3] @ w
        v2 = wz_holonomy(p, 1, initial=f0.with_vectors(vecs))
        np.testing.assert_allclose(v2, w.conj().T @ v @ w, atol=1e-8)

    def test_reversal_inverts(self):
        p = tripod()
        v = wz_holonomy(p, 1)
        np.testing.assert_allclose(wz_holonomy(p.reversed(), 1), v.conj().T, atol=1e-8)

    def test_gap_violation(self):
        def h(t):
            s = np.asarray(t, dtype=float)
            return tripod_hamiltonian(1 - s, 0 * s, 0 * s)

        p = HamiltonianPath(4, 1.0, h, None, (1, 2, 1), gap_floor=1.0)
        with pytest.raises(BlockGapViolation):
            wz_holonomy(p, 1, steps=100)


def test_phase_ledger():
    led = phase_ledger(tripod())
    assert set(led.holonomy) == {0, 1, 2}
    assert set(led.berry) == {0, 2}
    assert led.dynamic[1] == pytest.approx(0.0, abs=1e-12)
    assert led.dynamic[0] == pytest.approx(10.0)
