"""Randomised invariants over Hermitian matrices, gauges and states."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from adiapert.exact import integrate_schrodinger
from adiapert.gatearray import apply_on, shor_bound
from adiapert.geomphase import discrete_berry_phase, wrap_phase
from adiapert.hampath import constant_path
from adiapert.perturb import error_magnitude_estimate
from adiapert.spectral import align_gauge, coupling_matrix, eigendecompose, kato_generator

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
dims = st.integers(min_value=2, max_value=6)
quick = settings(max_examples=40, deadline=None)


def hermitian(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


def unit(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


@quick
@given(seeds, dims)
def test_frame_invariants(seed, d):
    rng = np.random.default_rng(seed)
    h = hermitian(rng, d)
    f = eigendecompose(h)
    f.check(h)
    v = f.eigenvectors
    np.testing.assert_allclose(v @ np.diag(f.eigenvalues) @ v.conj().T, h, atol=1e-10)
    assert sum(f.pattern) == d


@quick
@given(seeds, dims, st.floats(min_value=1e-4, max_value=1e-2))
def test_aligned_overlap_positive(seed, d, step):
    rng = np.random.default_rng(seed)
    h, dh = hermitian(rng, d), hermitian(rng, d)
    prev = eigendecompose(h)
    curr = align_gauge(prev, eigendecompose(h + step * dh))
    overlap = np.diag(prev.eigenvectors.conj().T @ curr.eigenvectors)
    assert np.all(overlap.real > 0)
    np.testing.assert_allclose(overlap.imag, 0.0, atol=1e-12)


@quick
@given(seeds, dims)
def test_kato_generator_is_gauge_free(seed, d):
    rng = np.random.default_rng(seed)
    h, dh = hermitian(rng, d), hermitian(rng, d)
    f = eigendecompose(h)
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, d))
    g = f.with_vectors(f.eigenvectors * phases)
    k1, k2 = kato_generator(f, dh), kato_generator(g, dh)
    np.testing.assert_allclose(k1, k2, atol=1e-10)
    np.testing.assert_allclose(k1, -k1.conj().T, atol=1e-10)
    c1, c2 = coupling_matrix(f, dh), coupling_matrix(g, dh)
    np.testing.assert_allclose(np.abs(c1), np.abs(c2), atol=1e-10)


@quick
@given(seeds, st.integers(min_value=3, max_value=40))
def test_discrete_berry_phase_gauge_invariant(seed, k):
    rng = np.random.default_rng(seed)
    loop = np.array([unit(rng, 2) for _ in range(k)])
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, k))
    a = discrete_berry_phase(loop, reference=loop[0])
    b = discrete_berry_phase(loop * phases[:, None], reference=loop[0] * phases[0])
    assert abs(wrap_phase(a - b)) < 1e-10


@quick
@given(st.floats(min_value=-1e3, max_value=1e3, allow_nan=False))
def test_wrap_phase_range(x):
    y = wrap_phase(x)
    assert -math.pi < y <= math.pi
    assert abs(math.sin(y) - math.sin(x)) < 1e-9 and abs(math.cos(y) - math.cos(x)) < 1e-9


@settings(max_examples=10, deadline=None)
@given(seeds, st.integers(min_value=2, max_value=4), st.floats(min_value=0.1, max_value=5.0))
def test_constant_h_matches_matrix_exponential(seed, d, T):
    rng = np.random.default_rng(seed)
    h = hermitian(rng, d)
    psi0 = unit(rng, d)
    psi = integrate_schrodinger(constant_path(h, T), psi0, tolerance=1e-12)
    np.testing.assert_allclose(psi, expm(-1j * h * T) @ psi0, atol=1e-9)


@quick
@given(seeds, st.integers(min_value=1, max_value=5))
def test_apply_on_preserves_norm(seed, n):
    rng = np.random.default_rng(seed)
    q = int(rng.integers(n))
    u = expm(-1j * hermitian(rng, 2))
    psi = unit(rng, 2 ** n)
    out = apply_on(u, psi, [q], n)
    assert abs(np.linalg.norm(out) - 1) < 1e-12
    np.testing.assert_allclose(apply_on(u.conj().T, out, [q], n), psi, atol=1e-12)


@quick
@given(st.floats(min_value=1e-3, max_value=1e3), st.floats(min_value=1e-3, max_value=1e3),
       st.floats(min_value=1e-2, max_value=1e2))
def test_estimate_depends_on_product(gap, T, a):
    assert error_magnitude_estimate(gap * a, T / a) == pytest.approx(error_magnitude_estimate(gap, T))


@quick
@given(st.floats(min_value=1e-6, max_value=0.999), st.floats(min_value=1e-6, max_value=0.999))
def test_bound_monotone(e1, e2):
    lo, hi = sorted((e1, e2))
    assert shor_bound(lo)[1] >= shor_bound(hi)[1]
    assert shor_bound(lo)[0] * lo == pytest.approx(1.0)
