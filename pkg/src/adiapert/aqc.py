"""Adiabatic optimisation: interpolate from a transverse field to a diagonal cost.

``H(t) = (1 - s) H_b + s H_p + w(s) H_c`` with ``H_b = -sum_i sigma_x^i``, a
diagonal cost ``H_p`` and an optional catalyst ``H_c`` weighted by
``w(s) = (s (1 - s))^2``.  The catalyst weight and its slope vanish at both
ends, so catalysed and bare paths share ``H`` and ``dH/dt`` at ``t = 0, T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
from scipy import optimize

from .errors import EndpointMismatch, GapScanFailure
from .exact import integrate_schrodinger
from .hampath import SIGMA_X, HamiltonianPath, Schedule
from .perturb import endpoint_correction, error_magnitude_estimate
from .spectral import eigendecompose

MAX_QUBITS = 8
GAP_SCAN_POINTS = 1000
NEAR_INDECISIVE_MARGIN = 0.5
# gaps below this fraction of the energy scale are treated as closed (search resolution ~1e-8 in s)
GAP_CLOSED_RTOL = 1e-7


def transverse_field(n: int) -> np.ndarray:
    """``-sum_i sigma_x^i`` on ``n`` qubits."""
    eye = np.eye(2, dtype=complex)
    terms = [reduce(np.kron, [SIGMA_X if j == i else eye for j in range(n)]) for i in range(n)]
    return -np.sum(terms, axis=0)


@dataclass(frozen=True)
class AqcInstance:
    """Cost diagonal ``costs`` over ``2^n`` bit strings (qubit 0 most significant)."""

    n: int
    costs: np.ndarray
    beginning: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if not 1 <= self.n <= MAX_QUBITS:
            raise ValueError(f"qubit count must lie in [1, {MAX_QUBITS}], got {self.n}")
        costs = np.asarray(self.costs, dtype=float)
        if costs.shape != (2 ** self.n,):
            raise ValueError(f"expected {2 ** self.n} costs, got shape {costs.shape}")
        object.__setattr__(self, "costs", costs)
        if self.problem_gap <= 1e-9 * max(np.max(np.abs(costs)), 1.0):
            raise ValueError("cost minimum is not unique")
        hb = transverse_field(self.n) if self.beginning is None else np.asarray(self.beginning, dtype=complex)
        object.__setattr__(self, "beginning", hb)
        e = np.linalg.eigvalsh(hb)
        if e[1] - e[0] <= 1e-9 * max(np.max(np.abs(e)), 1.0):
            raise ValueError("beginning Hamiltonian ground state is degenerate")

    @property
    def dim(self) -> int:
        return 2 ** self.n

    @property
    def problem(self) -> np.ndarray:
        return np.diag(self.costs).astype(complex)

    @property
    def minimizer(self) -> int:
        return int(np.argmin(self.costs))

    @property
    def problem_gap(self) -> float:
        c = np.sort(self.costs)
        return float(c[1] - c[0])

    def bitstring(self, index: int) -> str:
        return format(index, f"0{self.n}b")

    def path(self, T: float, shape: str = "linear", catalyst=None) -> HamiltonianPath:
        sched = Schedule(T, shape)
        hb, hp = self.beginning, self.problem
        hc = None if catalyst is None else np.asarray(catalyst, dtype=complex)

        def h(t):
            s = np.asarray(sched.s(t))[..., None, None]
            out = (1 - s) * hb + s * hp
            if hc is not None:
                out = out + (s * (1 - s)) ** 2 * hc
            return out

        def dh(t):
            s = np.asarray(sched.s(t))[..., None, None]
            ds = np.asarray(sched.ds(t))[..., None, None]
            out = ds * (hp - hb)
            if hc is not None:
                out = out + ds * 2 * s * (1 - s) * (1 - 2 * s) * hc
            return out

        return HamiltonianPath(self.dim, float(T), h, dh, None, None, False, "aqc",
                               {"shape": shape, "catalysed": hc is not None})

    def ground_gaps(self, shape: str = "linear", catalyst=None, points: int = GAP_SCAN_POINTS) -> np.ndarray:
        """Ground-to-first-excited gap on a uniform ``s`` grid (independent of ``T``)."""
        p = self.path(1.0, shape, catalyst)
        e = np.linalg.eigvalsh(p.hamiltonian(np.linspace(0.0, 1.0, points)))
        return e[:, 1] - e[:, 0]

    def adiabatic_parameter(self, catalyst=None, points: int = GAP_SCAN_POINTS) -> float:
        """``max_s ||Q d_sH |g>|| / gap(s)^2`` along the interpolation.

        The non-adiabatic leakage at a rate ``ds/dt = 1/T`` is small once
        this divided by ``T`` is small; unlike ``1/(gap T)`` it accounts
        for how strongly the path drives the ground state.
        """
        s = np.linspace(0.0, 1.0, points)
        p = self.path(1.0, "linear", catalyst)
        e, v = np.linalg.eigh(p.hamiltonian(s))
        g = v[:, :, 0]
        x = np.einsum("sij,sj->si", p.derivative(s), g)
        x = x - g * np.einsum("si,si->s", g.conj(), x)[:, None]
        return float(np.max(np.linalg.norm(x, axis=1) / (e[:, 1] - e[:, 0]) ** 2))

    def min_gap(self, shape: str = "linear", catalyst=None) -> float:
        """Smallest ground gap: grid scan refined by a bounded search around the minimum."""
        gaps = self.ground_gaps(shape, catalyst)
        k = int(np.argmin(gaps))
        h = 1.0 / (len(gaps) - 1)
        p = self.path(1.0, shape, catalyst)

        def gap(s):
            e = np.linalg.eigvalsh(p.hamiltonian(s))
            return e[1] - e[0]

        lo, hi = max(0.0, (k - 1) * h), min(1.0, (k + 1) * h)
        res = optimize.minimize_scalar(gap, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        g = float(min(gaps[k], res.fun))
        scale = max(float(np.max(np.abs(self.costs))), float(np.linalg.norm(self.beginning, 2)), 1.0)
        if not g > GAP_CLOSED_RTOL * scale:
            raise GapScanFailure(f"ground gap closes ({g:.2e}) near s = {float(res.x):.6f}")
        return g


def random_instance(n: int, rng: np.random.Generator, min_gap: float = 0.1,
                    attempts: int = 1000) -> AqcInstance:
    """Uniform random costs in ``[0, n]`` with a unique minimum and ground gap ``>= min_gap``."""
    for _ in range(attempts):
        costs = rng.uniform(0.0, float(n), 2 ** n)
        c = np.sort(costs)
        if c[1] - c[0] < min_gap:
            continue
        inst = AqcInstance(n, costs)
        if np.min(inst.ground_gaps()) >= min_gap:
            return inst
    raise GapScanFailure(f"no {n}-qubit instance with ground gap >= {min_gap} in {attempts} draws")


@dataclass(frozen=True)
class Readout:
    index: int
    bitstring: str
    probability: float
    margin: float
    uncertainty: float
    indecisive: bool
    near_indecisive: bool


def largest_probability_readout(psi, n: int | None = None, uncertainty: float = 1e-8) -> Readout:
    """Most probable computational basis state and its margin over the runner-up.

    ``indecisive`` is set when the margin is below twice ``uncertainty``;
    ``near_indecisive`` when the margin is below one half, i.e. the leader
    no longer dominates the distribution.
    """
    p = np.abs(np.asarray(psi)) ** 2
    n = int(round(math.log2(len(p)))) if n is None else n
    order = np.argsort(p)[::-1]
    best = int(order[0])
    margin = float(p[best] - (p[order[1]] if len(p) > 1 else 0.0))
    return Readout(best, format(best, f"0{n}b"), float(p[best]), margin, float(uncertainty),
                   margin < 2 * uncertainty, margin < NEAR_INDECISIVE_MARGIN)


@dataclass(frozen=True)
class AqcRun:
    state: np.ndarray
    probability: float
    correction_norm: float
    problem_gap: float
    min_gap: float
    estimate: float
    readout: Readout

    def to_dict(self) -> dict:
        r = self.readout
        return {
            "probability": self.probability,
            "correction_norm": self.correction_norm,
            "problem_gap": self.problem_gap,
            "min_gap": self.min_gap,
            "estimate": self.estimate,
            "readout": {"bitstring": r.bitstring, "index": r.index, "probability": r.probability,
                        "margin": r.margin, "uncertainty": r.uncertainty,
                        "indecisive": r.indecisive, "near_indecisive": r.near_indecisive},
        }


def run_aqc(instance: AqcInstance, T: float, tolerance: float = 1e-10, shape: str = "linear",
            catalyst=None, estimate_uncertainty: bool = True) -> AqcRun:
    """Integrate from the ground state of ``H_b`` and read out at ``T``.

    ``correction_norm`` is the norm of the final state's component orthogonal
    to the cost minimiser.  The readout uncertainty is the largest change in
    any basis probability when the run is repeated at a 100x looser tolerance
    (or just ``tolerance`` with ``estimate_uncertainty=False``).
    """
    gmin = instance.min_gap(shape, catalyst)
    path = instance.path(T, shape, catalyst)
    psi0 = eigendecompose(instance.beginning).eigenvectors[:, 0]
    psi = integrate_schrodinger(path, psi0, tolerance=tolerance)
    uncertainty = tolerance
    if estimate_uncertainty:
        loose = integrate_schrodinger(path, psi0, tolerance=min(100 * tolerance, 1e-6))
        uncertainty = max(float(np.max(np.abs(np.abs(psi) ** 2 - np.abs(loose) ** 2))), tolerance)
    p = float(abs(psi[instance.minimizer]) ** 2)
    return AqcRun(
        state=psi,
        probability=p,
        correction_norm=math.sqrt(max(0.0, 1.0 - p)),
        problem_gap=instance.problem_gap,
        min_gap=gmin,
        estimate=error_magnitude_estimate(gmin, T),
        readout=largest_probability_readout(psi, instance.n, uncertainty),
    )


@dataclass(frozen=True)
class PathIndependenceReport:
    labels: tuple
    estimates: np.ndarray  # first-order correction norm from endpoint data, per path
    vectors: np.ndarray = field(repr=False)
    endpoint_speeds: np.ndarray  # ||dH/dt(T)||
    ratios: np.ndarray  # estimates / estimates[0]
    scaled: np.ndarray  # estimates * problem_gap * T

    def identical(self, i: int, j: int) -> bool:
        return bool(np.array_equal(self.vectors[i], self.vectors[j]))


def path_independence_check(instance: AqcInstance, T: float, paths) -> PathIndependenceReport:
    """Endpoint first-order correction for each of several paths to ``H_p``.

    ``paths`` holds ``(label, shape, catalyst)`` triples.  Only ``H_p`` and
    ``dH/dt`` at ``T`` enter each estimate.
    """
    paths = list(paths)
    if len(paths) < 2:
        raise ValueError("need at least two interpolation paths")
    built = [instance.path(T, shape, cat) for _, shape, cat in paths]
    h0, h1 = built[0].hamiltonian(0.0), built[0].hamiltonian(T)
    for (label, _, _), p in zip(paths[1:], built[1:]):
        if not (np.allclose(p.hamiltonian(0.0), h0, atol=1e-12) and np.allclose(p.hamiltonian(T), h1, atol=1e-12)):
            raise EndpointMismatch(f"path {label!r} does not share the endpoints H_b, H_p")
    vectors, speeds = [], []
    for p in built:
        frame = eigendecompose(p.hamiltonian(T), time=T)
        dh = p.derivative(T)
        vectors.append(endpoint_correction(frame, dh, 0)[:, 0])
        speeds.append(float(np.linalg.norm(dh, 2)))
    vectors = np.array(vectors)
    est = np.linalg.norm(vectors, axis=1)
    return PathIndependenceReport(tuple(lab for lab, _, _ in paths), est, vectors, np.array(speeds),
                                  est / est[0], est * instance.problem_gap * T)
