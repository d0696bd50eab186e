"""Hermitian eigendecomposition with degeneracy blocks and gauge transport.

Energies are angular frequencies (hbar = 1).  A frame stores eigenvectors as
columns in ascending-energy order together with a partition of the columns
into degenerate blocks; block ``n`` is energy level ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import BlockOverlapSingular, DegeneracyMismatch, NonHermitian, SameBlock

HERMITIAN_RTOL = 1e-12
DEGENERACY_RTOL = 1e-8
OVERLAP_SINGULAR = 1e-6

Degeneracy = Union[None, float, Sequence[int]]
LevelIndex = tuple  # (level n, index alpha within the block)


@dataclass(frozen=True)
class InstantaneousFrame:
    """Eigen-decomposition of H at one time, grouped into degenerate blocks."""

    time: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    blocks: tuple

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    @property
    def pattern(self) -> tuple:
        return tuple(len(b) for b in self.blocks)

    def column(self, key: LevelIndex) -> int:
        n, alpha = key
        return self.blocks[n][alpha]

    def block_vectors(self, n: int) -> np.ndarray:
        return self.eigenvectors[:, list(self.blocks[n])]

    def level_energy(self, n: int) -> float:
        return float(np.mean(self.eigenvalues[list(self.blocks[n])]))

    def level_of_column(self) -> np.ndarray:
        labels = np.empty(self.dim, dtype=int)
        for n, cols in enumerate(self.blocks):
            labels[list(cols)] = n
        return labels

    def projector(self, n: int) -> np.ndarray:
        b = self.block_vectors(n)
        return b @ b.conj().T

    def with_vectors(self, vectors: np.ndarray) -> "InstantaneousFrame":
        return InstantaneousFrame(self.time, self.eigenvalues, vectors, self.blocks)

    def check(self, h: np.ndarray | None = None, atol: float = 1e-10) -> None:
        """Raise ``AssertionError`` if any frame invariant is violated."""
        u = self.eigenvectors
        err = np.max(np.abs(u.conj().T @ u - np.eye(self.dim)))
        assert err < atol, f"eigenvector matrix not unitary ({err:.2e})"
        assert np.all(np.diff(self.eigenvalues) >= -1e-12), "eigenvalues not ascending"
        if h is not None:
            scale = max(np.linalg.norm(h, 2), 1.0)
            resid = np.max(np.abs(h @ u - u * self.eigenvalues))
            assert resid < 1e-9 * scale, f"H v != E v ({resid:.2e})"


def check_hermitian(h) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim < 2 or h.shape[-1] != h.shape[-2]:
        raise NonHermitian(f"expected a square matrix, got shape {h.shape}")
    scale = np.max(np.abs(h)) if h.size else 0.0
    asym = np.max(np.abs(h - np.swapaxes(h.conj(), -1, -2))) if h.size else 0.0
    if asym > HERMITIAN_RTOL * scale:
        raise NonHermitian(f"matrix is not Hermitian (asymmetry {asym:.3e})")
    return h


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-modulus entry of every column real and positive.

    Works on a single matrix or a stack ``(..., d, d)``.
    """
    idx = np.argmax(np.abs(vectors), axis=-2)
    pivot = np.take_along_axis(vectors, idx[..., None, :], axis=-2)
    phase = pivot / np.abs(pivot)
    return vectors / phase


def group_blocks(eigenvalues: np.ndarray, degeneracy: Degeneracy = None, scale: float | None = None) -> tuple:
    """Partition ascending eigenvalues into degenerate blocks.

    ``degeneracy`` is either a declared multiplicity pattern such as ``(1, 2, 1)``,
    a relative tolerance, or ``None`` for the default tolerance.
    """
    e = np.asarray(eigenvalues, dtype=float)
    if scale is None:
        scale = float(np.max(np.abs(e))) if e.size else 0.0
    scale = max(scale, 1e-300)
    if degeneracy is None or np.isscalar(degeneracy):
        rtol = DEGENERACY_RTOL if degeneracy is None else float(degeneracy)
        blocks, current = [], [0]
        for k in range(1, len(e)):
            if e[k] - e[current[0]] < rtol * scale:
                current.append(k)
            else:
                blocks.append(tuple(current))
                current = [k]
        blocks.append(tuple(current))
        return tuple(blocks)

    pattern = tuple(int(p) for p in degeneracy)
    if sum(pattern) != len(e) or min(pattern) < 1:
        raise DegeneracyMismatch(f"pattern {pattern} does not partition dimension {len(e)}")
    tol = DEGENERACY_RTOL * scale
    blocks, start = [], 0
    for size in pattern:
        cols = tuple(range(start, start + size))
        if e[cols[-1]] - e[cols[0]] > tol:
            raise DegeneracyMismatch(f"declared degenerate block {cols} spreads by {e[cols[-1]] - e[cols[0]]:.3e}")
        if start > 0 and e[start] - e[start - 1] <= tol:
            raise DegeneracyMismatch(f"declared blocks at column {start} are degenerate")
        blocks.append(cols)
        start += size
    return tuple(blocks)


def eigendecompose(h, degeneracy: Degeneracy = None, time: float = 0.0) -> InstantaneousFrame:
    """Eigen-decompose a Hermitian matrix into an :class:`InstantaneousFrame`.

    Parameters
    ----------
    h : array_like, shape (d, d)
        Hermitian operator.
    degeneracy : tuple of int, float or None
        Declared block multiplicities in ascending-energy order, or a relative
        grouping tolerance (fallback).
    time : float
        Time stamp stored on the frame.
    """
    h = check_hermitian(h)
    e, v = np.linalg.eigh(h)
    scale = float(np.linalg.norm(h, 2)) if h.size else 0.0
    blocks = group_blocks(e, degeneracy, scale=scale)
    return InstantaneousFrame(float(time), e, fix_phases(v), blocks)


def eigendecompose_many(hs: np.ndarray, degeneracy: Degeneracy, times) -> list:
    """Batched :func:`eigendecompose` over a stack ``(n, d, d)``."""
    hs = check_hermitian(hs)
    es, vs = np.linalg.eigh(hs)
    vs = fix_phases(vs)
    scales = np.linalg.norm(hs, ord=2, axis=(-2, -1))
    frames = []
    for t, e, v, s in zip(np.atleast_1d(times), es, vs, scales):
        frames.append(InstantaneousFrame(float(t), e, v, group_blocks(e, degeneracy, scale=float(s))))
    return frames


def polar_unitary(m: np.ndarray) -> tuple:
    """Unitary polar factor of ``m`` (batched) and its smallest singular value."""
    u, s, vh = np.linalg.svd(m)
    return u @ vh, s[..., -1]


def align_gauge(prev: InstantaneousFrame, curr: InstantaneousFrame) -> InstantaneousFrame:
    """Re-gauge ``curr`` by discrete parallel transport from ``prev``.

    Every block of ``curr`` is right-multiplied by the inverse of the unitary
    polar factor of the block overlap ``<prev|curr>`` so that the aligned
    overlap is Hermitian positive definite.  For one-dimensional blocks this
    makes the overlap real and positive.
    """
    if prev.pattern != curr.pattern:
        raise DegeneracyMismatch(f"block structures differ: {prev.pattern} vs {curr.pattern}")
    out = curr.eigenvectors.copy()
    for cols in curr.blocks:
        cols = list(cols)
        overlap = prev.eigenvectors[:, cols].conj().T @ curr.eigenvectors[:, cols]
        w, smin = polar_unitary(overlap)
        if smin < OVERLAP_SINGULAR:
            raise BlockOverlapSingular(
                f"block {cols} overlap singular value {smin:.2e}: step too coarse or level crossing"
            )
        out[:, cols] = curr.eigenvectors[:, cols] @ w.conj().T
    return curr.with_vectors(out)


def _pair_columns(frame: InstantaneousFrame, m: LevelIndex, n: LevelIndex) -> tuple:
    if m[0] == n[0]:
        raise SameBlock(f"levels {m} and {n} lie in the same degenerate block")
    return frame.column(m), frame.column(n)


def derivative_coupling(frame: InstantaneousFrame, dh, m: LevelIndex, n: LevelIndex) -> complex:
    """``<phi_m|d_t phi_n>`` from the Hellmann-Feynman identity.

    ``<phi_m|dH|phi_n> / (E_n - E_m)``; only defined between different blocks.
    """
    cm, cn = _pair_columns(frame, m, n)
    v = frame.eigenvectors
    num = v[:, cm].conj() @ np.asarray(dh) @ v[:, cn]
    return complex(num / (frame.eigenvalues[cn] - frame.eigenvalues[cm]))


def coupling_matrix(frame: InstantaneousFrame, dh) -> np.ndarray:
    """All inter-block couplings ``C[m, n] = <v_m|d_t v_n>``; zero inside blocks.

    Intra-block entries vanish for a parallel-transported basis, which is the
    gauge every propagation routine in this package works in.
    """
    v = frame.eigenvectors
    num = v.conj().T @ np.asarray(dh) @ v
    labels = frame.level_of_column()
    energies = np.array([frame.level_energy(k) for k in labels])
    denom = energies[None, :] - energies[:, None]
    same = labels[:, None] == labels[None, :]
    denom = np.where(same, 1.0, denom)
    return np.where(same, 0.0, num / denom)


def kato_generator(frame: InstantaneousFrame, dh) -> np.ndarray:
    """Anti-Hermitian generator ``K = sum_n P_n' P_n`` of adiabatic transport.

    A basis evolved by ``F' = K F`` stays inside each eigenspace with vanishing
    intra-block connection.  Built from projectors only, so it does not depend
    on the eigenvector gauge of ``frame``.
    """
    v = frame.eigenvectors
    return v @ coupling_matrix(frame, dh) @ v.conj().T


def fd_coupling(
    minus: InstantaneousFrame,
    frame: InstantaneousFrame,
    plus: InstantaneousFrame,
    step: float,
    m: LevelIndex,
    n: LevelIndex,
) -> complex:
    """Central finite-difference ``<phi_m|d_t phi_n>`` from gauge-aligned frames."""
    cm, cn = _pair_columns(frame, m, n)
    lo = align_gauge(frame, minus).eigenvectors[:, cn]
    hi = align_gauge(frame, plus).eigenvectors[:, cn]
    return complex(frame.eigenvectors[:, cm].conj() @ (hi - lo) / (2.0 * step))
