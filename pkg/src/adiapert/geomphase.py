"""Dynamic phases, Berry phases and Wilczek-Zee holonomies along a path.

Conventions (hbar = 1):

* dynamic phase ``eta_n(t) = -int_0^t E_n``;
* Berry phase ``gamma_n = i int <phi_n|d phi_n>`` (real), so the adiabatic
  state is ``exp(i gamma_n + i eta_n) |phi_n(t)>``;
* holonomy ``V^n(t) = B_n(t)^dagger F_n(t)`` where ``B_n`` is the reference
  eigenbasis of block ``n`` at ``t`` and ``F_n`` the parallel-transported one,
  so a block state evolves adiabatically into ``exp(i eta_n) B_n(t) V^n(t) a``.
  For closed paths the reference basis at ``T`` is the one at ``0``.

Transport is discretised as an ordered product of unitary polar factors of
block overlaps between neighbouring grid frames (second order in the step).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, quad_vec

from .errors import BlockGapViolation, BlockOverlapSingular, DegenerateLevel
from .hampath import HamiltonianPath
from .spectral import OVERLAP_SINGULAR, InstantaneousFrame, fix_phases, group_blocks, polar_unitary

DEFAULT_STEPS = 10_000
CONVERGENCE_TOL = 1e-8
MAX_STEPS = 2 ** 19


def wrap_phase(x):
    """Map angles to ``(-pi, pi]``."""
    y = np.mod(np.asarray(x, dtype=float) + np.pi, 2.0 * np.pi) - np.pi
    y = np.where(y == -np.pi, np.pi, y)
    return float(y) if np.ndim(y) == 0 else y


@dataclass(frozen=True)
class Transport:
    """Reference and parallel-transported eigenbases at a set of times."""

    times: np.ndarray
    eigenvalues: np.ndarray  # (k, d)
    reference: np.ndarray  # (k, d, d) reference gauge at each time
    transported: np.ndarray  # (k, d, d)
    dynamic: np.ndarray  # (k, d) eta per column
    blocks: tuple
    initial: np.ndarray  # (d, d) basis at t0

    def index(self, t: float) -> int:
        k = int(np.argmin(np.abs(self.times - t)))
        if not math.isclose(self.times[k], t, rel_tol=1e-12, abs_tol=1e-12):
            raise KeyError(f"time {t} was not requested from the transport")
        return k

    def frame(self, k: int = -1) -> InstantaneousFrame:
        """Frame whose eigenvectors are the transported basis at time index ``k``."""
        return InstantaneousFrame(float(self.times[k]), self.eigenvalues[k], self.transported[k], self.blocks)

    def holonomy(self, n: int, k: int = -1) -> np.ndarray:
        cols = list(self.blocks[n])
        return self.reference[k][:, cols].conj().T @ self.transported[k][:, cols]

    def propagator(self, k: int = -1) -> np.ndarray:
        """Adiabatic-limit propagator ``sum_n exp(i eta_n) F_n(t) B_n(t0)^dagger``."""
        f = self.transported[k] * np.exp(1j * self.dynamic[k])
        return f @ self.initial.conj().T


def _check_gaps(path: HamiltonianPath, energies: np.ndarray, blocks: tuple) -> None:
    edges = [b[0] for b in blocks[1:]]
    if not edges:
        return
    gaps = np.min(energies[:, edges] - energies[:, [e - 1 for e in edges]], axis=1)
    floor = 0.9 * path.gap_floor if path.gap_floor else 1e-8 * max(float(np.max(np.abs(energies))), 1e-300)
    worst = float(np.min(gaps))
    if worst < floor:
        k = int(np.argmin(gaps))
        raise BlockGapViolation(f"inter-block gap {worst:.3e} below floor {floor:.3e} near sample {k}")


def _block_energies(path: HamiltonianPath, blocks: tuple):
    """Callable ``tau -> per-column energies`` with degenerate blocks averaged."""

    def energies(tau):
        e = np.linalg.eigvalsh(path.hamiltonian(tau))
        out = np.empty_like(e)
        for cols in blocks:
            out[list(cols)] = np.mean(e[list(cols)])
        return out

    return energies


def dynamic_phases(path: HamiltonianPath, times, t0: float = 0.0, blocks: tuple | None = None) -> np.ndarray:
    """``eta(t) = -int_{t0}^t E(tau) dtau`` per column at each of ``times`` (sorted)."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if blocks is None:
        blocks = path.frame(t0).blocks
    f = _block_energies(path, blocks)
    out = np.empty((len(times), path.dim))
    acc, prev = np.zeros(path.dim), t0
    for k, t in enumerate(times):
        if t > prev:
            seg, _ = quad_vec(f, prev, t, epsabs=1e-13, epsrel=1e-12, limit=400)
            acc = acc - seg
        prev = t
        out[k] = acc
    return out


def dynamic_phase(path: HamiltonianPath, n: int, t: float) -> float:
    """Dynamic phase ``eta_n(t) = -int_0^t E_n`` of level (block) ``n``."""
    if not 0.0 <= t <= path.duration * (1 + 1e-12):
        raise ValueError(f"t = {t} outside [0, {path.duration}]")
    cols = list(path.frame(0.0).blocks[n])

    def energy(tau):
        return float(np.mean(np.linalg.eigvalsh(path.hamiltonian(tau))[cols]))

    val, _ = quad(energy, 0.0, t, epsabs=1e-13, epsrel=1e-12, limit=400)
    return -val


def _grid(t0: float, times: np.ndarray, steps: int) -> tuple:
    t_end = float(times[-1])
    base = np.linspace(t0, t_end, steps + 1) if t_end > t0 else np.array([t0])
    grid = np.union1d(base, times)
    return grid, np.searchsorted(grid, times)


def transport(
    path: HamiltonianPath,
    times,
    t0: float = 0.0,
    steps: int = DEFAULT_STEPS,
    initial: InstantaneousFrame | None = None,
) -> Transport:
    """Parallel-transport the eigenbasis from ``t0`` to each of ``times``.

    Parameters
    ----------
    path : HamiltonianPath
    times : array_like
        Sorted output times ``>= t0``.
    steps : int
        Uniform grid intervals on ``[t0, max(times)]``; the requested times are
        merged into the grid.
    initial : InstantaneousFrame, optional
        Basis at ``t0`` to transport (defaults to the path frame at ``t0``).
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(np.diff(times) < 0) or times[0] < t0:
        raise ValueError("times must be sorted and not precede t0")
    grid, where = _grid(t0, times, steps)
    hs = path.hamiltonian(grid)
    energies, vectors = np.linalg.eigh(hs)
    vectors = fix_phases(vectors)
    scale = float(np.max(np.linalg.norm(hs[[0, -1]], 2, axis=(-2, -1))))
    blocks = group_blocks(energies[0], path.degeneracy, scale=scale)
    _check_gaps(path, energies, blocks)
    if initial is not None:
        if initial.pattern != tuple(len(b) for b in blocks):
            raise ValueError("initial frame block structure differs from the path's")
        vectors[0] = initial.eigenvectors

    out = np.empty((len(times), path.dim, path.dim), dtype=complex)
    for cols in blocks:
        cols = list(cols)
        sub = vectors[:, :, cols]
        overlaps = np.swapaxes(sub[:-1].conj(), -1, -2) @ sub[1:]
        if len(cols) == 1:
            o = overlaps[:, 0, 0]
            if np.min(np.abs(o), initial=np.inf) < OVERLAP_SINGULAR:
                raise BlockOverlapSingular("eigenvector overlap vanished: step too coarse or level crossing")
            w = np.exp(-1j * np.concatenate([[0.0], np.cumsum(np.angle(o))]))
            out[:, :, cols[0]] = sub[where, :, 0] * w[where, None]
            continue
        u, smin = polar_unitary(overlaps)
        if len(smin) and np.min(smin) < OVERLAP_SINGULAR:
            raise BlockOverlapSingular(f"block {cols} overlap singular value {np.min(smin):.2e}")
        uh = np.swapaxes(u.conj(), -1, -2)
        targets: dict = {}
        for j, i in enumerate(where):
            targets.setdefault(int(i), []).append(j)
        w = np.eye(len(cols), dtype=complex)
        for k in range(len(grid)):
            if k > 0:
                w = uh[k - 1] @ w
            for j in targets.get(k, ()):
                out[j][:, cols] = sub[k] @ w

    reference = vectors[where].copy()
    if path.closed and t0 == 0.0:
        at_end = np.isclose(times, path.duration, rtol=1e-12, atol=0.0)
        reference[at_end] = vectors[0]
    eta = dynamic_phases(path, times, t0=t0, blocks=blocks)
    return Transport(times, energies[where], reference, out, eta, blocks, vectors[0].copy())


def _refine(compute, steps: int, converge: bool, tol: float = CONVERGENCE_TOL):
    value = compute(steps)
    if not converge:
        return value
    while steps < MAX_STEPS:
        steps *= 2
        new = compute(steps)
        if np.max(np.abs(np.asarray(new) - np.asarray(value))) < tol:
            return new
        value = new
    return value


def discrete_berry_phase(vectors, reference=None) -> float:
    """Berry phase from a sequence of eigenvectors ``(K, d)`` along a path.

    ``-sum_k arg <v_k|v_{k+1}> + arg <reference|v_{K-1}>``; pass
    ``reference=vectors[0]`` for a closed loop.  Invariant under re-phasing of
    every vector except the reference.
    """
    v = np.asarray(vectors)
    links = np.einsum("ki,ki->k", v[:-1].conj(), v[1:])
    total = -np.sum(np.angle(links))
    if reference is not None:
        total += np.angle(np.vdot(reference, v[-1]))
    return wrap_phase(total)


def berry_phase(path: HamiltonianPath, n: int, t: float | None = None, steps: int = DEFAULT_STEPS,
                converge: bool = True) -> float:
    """Geometric phase ``gamma_n(t)`` of the non-degenerate level ``n``.

    Step doubling continues until successive estimates differ by less than
    1e-8 (unless ``converge=False``).
    """
    t = path.duration if t is None else float(t)
    pattern = path.pattern()
    if pattern[n] != 1:
        raise DegenerateLevel(f"level {n} is {pattern[n]}-fold degenerate; use wz_holonomy")
    col = int(np.cumsum((0,) + pattern)[n])
    closed = path.closed and math.isclose(t, path.duration, rel_tol=1e-12)

    def compute(k):
        grid = np.linspace(0.0, t, k + 1)
        energies, vectors = np.linalg.eigh(path.hamiltonian(grid))
        _check_gaps(path, energies, group_blocks(energies[0], path.degeneracy))
        v = vectors[:, :, col]
        return discrete_berry_phase(v, reference=v[0] if closed else None)

    if t == 0.0:
        return 0.0
    return float(_refine(compute, steps, converge))


def wz_holonomy(path: HamiltonianPath, n: int, t: float | None = None, t0: float = 0.0,
                steps: int = DEFAULT_STEPS, converge: bool = True,
                initial: InstantaneousFrame | None = None) -> np.ndarray:
    """Non-abelian holonomy ``V^n`` of block ``n`` accumulated from ``t0`` to ``t``."""
    t = path.duration if t is None else float(t)
    if t == t0:
        return np.eye(path.pattern()[n], dtype=complex)

    def compute(k):
        return transport(path, [t], t0=t0, steps=k, initial=initial).holonomy(n)

    return _refine(compute, steps, converge)


@dataclass(frozen=True)
class PhaseLedger:
    time: float
    dynamic: dict  # level -> eta_n
    berry: dict  # non-degenerate level -> gamma_n
    holonomy: dict  # level -> V^n

    def __post_init__(self):
        for n, v in self.holonomy.items():
            err = np.max(np.abs(v.conj().T @ v - np.eye(len(v))))
            if err >= 1e-10:
                raise ArithmeticError(f"holonomy of level {n} not unitary ({err:.2e})")


def phase_ledger(path: HamiltonianPath, t: float | None = None, steps: int = DEFAULT_STEPS,
                 converge: bool = True) -> PhaseLedger:
    t = path.duration if t is None else float(t)
    pattern = path.pattern()
    dynamic, berry, hol = {}, {}, {}
    for n, size in enumerate(pattern):
        dynamic[n] = dynamic_phase(path, n, t)
        v = wz_holonomy(path, n, t, steps=steps, converge=converge)
        hol[n] = v
        if size == 1:
            berry[n] = berry_phase(path, n, t, steps=steps, converge=converge)
    return PhaseLedger(t, dynamic, berry, hol)
