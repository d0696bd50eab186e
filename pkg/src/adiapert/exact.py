"""Reference propagation of the time-dependent Schroedinger equation.

Two independent formulations are provided: direct integration of
``i dpsi/dt = H psi`` and integration of the instantaneous-basis amplitude
equations

    da_n/dt = -sum_m a_m <chi_n|d_t chi_m> exp(i (eta_m - eta_n))

in a basis ``chi`` carried along by the adiabatic transport generator.  Both
use the same adaptive Dormand-Prince 8(5,3) stepper.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .errors import CrossingDetected, StepUnderflow
from .hampath import HamiltonianPath
from .perturb import AmplitudeVector
from .spectral import InstantaneousFrame, coupling_matrix, kato_generator, polar_unitary

logger = logging.getLogger(__name__)

METHOD = "DOP853"
PHASE_GRID = 4096
CROSSING_RTOL = 1e-9
LEAK_RTOL = 1e-6


def _check_tolerance(tolerance: float) -> float:
    if not 1e-13 <= tolerance <= 1e-6:
        raise ValueError(f"tolerance must lie in [1e-13, 1e-6], got {tolerance!r}")
    return float(tolerance)


def _solve(rhs, t0, t1, y0, tolerance, t_eval=None):
    sol = solve_ivp(rhs, (t0, t1), y0, method=METHOD, rtol=tolerance, atol=tolerance, t_eval=t_eval)
    if not sol.success:
        raise StepUnderflow(f"integration failed between {t0} and {t1}: {sol.message}")
    return sol


def integrate_schrodinger(path: HamiltonianPath, psi0, T: float | None = None,
                          tolerance: float = 1e-10, t0: float = 0.0) -> np.ndarray:
    """Propagate ``psi0`` from ``t0`` to ``T`` under ``H(t)``.

    The norm is not renormalised; drift is logged at debug level.
    """
    tolerance = _check_tolerance(tolerance)
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-10:
        raise ValueError("initial state must have unit norm")
    T = path.duration if T is None else float(T)
    if T == t0:
        return psi0.copy()
    sol = _solve(lambda t, y: -1j * (path.hamiltonian(t) @ y), t0, T, psi0, tolerance)
    psi = sol.y[:, -1]
    logger.debug("schrodinger: %d rhs evaluations, norm drift %.2e", sol.nfev, abs(np.linalg.norm(psi) - 1))
    return psi


def schrodinger_trajectory(path: HamiltonianPath, psi0, times, tolerance: float = 1e-10) -> np.ndarray:
    """States at each of ``times`` (sorted, starting at or after 0), shape ``(len(times), d)``."""
    tolerance = _check_tolerance(tolerance)
    times = np.asarray(times, dtype=float)
    psi0 = np.asarray(psi0, dtype=complex)
    if times[-1] == 0.0:
        return np.repeat(psi0[None], len(times), axis=0)
    sol = _solve(lambda t, y: -1j * (path.hamiltonian(t) @ y), 0.0, float(times[-1]), psi0, tolerance,
                 t_eval=times)
    return sol.y.T


def exact_propagator(path: HamiltonianPath, T: float | None = None, tolerance: float = 1e-10,
                     t0: float = 0.0) -> np.ndarray:
    """Full time-evolution operator ``U(T, t0)``."""
    tolerance = _check_tolerance(tolerance)
    T = path.duration if T is None else float(T)
    d = path.dim
    if T == t0:
        return np.eye(d, dtype=complex)

    def rhs(t, y):
        return (-1j * (path.hamiltonian(t) @ y.reshape(d, d))).ravel()

    sol = _solve(rhs, t0, T, np.eye(d, dtype=complex).ravel(), tolerance)
    return sol.y[:, -1].reshape(d, d)


def _phase_integral(path: HamiltonianPath, blocks: tuple, t0: float, T: float):
    """Spline quadrature of the per-column energies; returns ``eta(t)``.

    Also scans the inter-block gaps on the quadrature grid.
    """
    grid = np.linspace(t0, T, PHASE_GRID + 1)
    e = np.linalg.eigvalsh(path.hamiltonian(grid))
    edges = [b[0] for b in blocks[1:]]
    if edges:
        gaps = np.min(e[:, edges] - e[:, [k - 1 for k in edges]], axis=1)
        floor = 0.9 * path.gap_floor if path.gap_floor else CROSSING_RTOL * max(float(np.max(np.abs(e))), 1e-300)
        k = int(np.argmin(gaps))
        if gaps[k] < floor:
            raise CrossingDetected(f"inter-block gap {gaps[k]:.2e} near t = {grid[k]:.6g} is below {floor:.2e}")
    for cols in blocks:
        e[:, list(cols)] = np.mean(e[:, list(cols)], axis=1, keepdims=True)
    eta = CubicSpline(grid, -e, axis=0).antiderivative()
    return lambda t: eta(t) - eta(t0)


def integrate_amplitude_ode(path: HamiltonianPath, a0: AmplitudeVector, T: float | None = None,
                            tolerance: float = 1e-10) -> AmplitudeVector:
    """Integrate the instantaneous-basis amplitude equations from ``a0.frame.time`` to ``T``.

    The basis is evolved alongside the amplitudes by ``F' = K F`` with the
    adiabatic transport generator ``K``, so intra-block connections vanish and
    only inter-block couplings (Hellmann-Feynman) drive the amplitudes.  The
    returned vector references the transported frame at ``T`` and carries the
    dynamic phases ``eta(T)``.
    """
    tolerance = _check_tolerance(tolerance)
    T = path.duration if T is None else float(T)
    t0 = a0.frame.time
    d = path.dim
    blocks = a0.frame.blocks
    edges = [b[0] for b in blocks[1:]]
    eta = _phase_integral(path, blocks, t0, T)

    def rhs(t, y):
        a, f = y[:d], y[d:].reshape(d, d)
        h = path.hamiltonian(t)
        e, v = np.linalg.eigh(h)
        if edges:
            gap = np.min(e[edges] - e[[k - 1 for k in edges]])
            if gap <= CROSSING_RTOL * max(np.max(np.abs(e)), 1e-300):
                raise CrossingDetected(f"levels cross near t = {t:.6g} (gap {gap:.2e})")
        dh = path.derivative(t)
        k = kato_generator(InstantaneousFrame(t, e, v, blocks), dh)
        c = coupling_matrix(InstantaneousFrame(t, e, f, blocks), dh)
        phase = np.exp(1j * eta(t))
        da = -(c * (phase[None, :] / phase[:, None])) @ a
        return np.concatenate([da, (k @ f).ravel()])

    y0 = np.concatenate([a0.values.astype(complex), a0.frame.eigenvectors.astype(complex).ravel()])
    if T == t0:
        return AmplitudeVector(a0.values.copy(), a0.frame, np.zeros(d))
    sol = _solve(rhs, t0, T, y0, tolerance)
    a, f = sol.y[:d, -1], sol.y[d:, -1].reshape(d, d)
    f_unitary, _ = polar_unitary(f)
    h_end = path.hamiltonian(T)
    e_end = np.linalg.eigvalsh(h_end)
    # the transported basis must still diagonalise H(T) block by block
    hf = f_unitary.conj().T @ h_end @ f_unitary
    labels = InstantaneousFrame(T, e_end, f_unitary, blocks).level_of_column()
    leak = np.max(np.abs(np.where(labels[:, None] != labels[None, :], hf, 0.0)))
    leak = max(leak, float(np.max(np.abs(np.real(np.diag(hf)) - e_end))))
    if leak > LEAK_RTOL * max(float(np.max(np.abs(e_end))), 1e-300):
        raise CrossingDetected(f"transported basis left its eigenspaces (mismatch {leak:.2e})")
    frame = InstantaneousFrame(T, e_end, f_unitary, blocks)
    return AmplitudeVector(a, frame, np.asarray(eta(T), dtype=float))
