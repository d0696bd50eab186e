"""Networks of adiabatic gates on a register of qubits.

Gates in one round act on pairwise-disjoint qubit subsets; rounds run in
sequence.  Qubit 0 is the most significant factor of the tensor product.
Qubits untouched in a round idle under ``idle`` (zero Hamiltonian by default)
for the round's duration, which is the longest gate in it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import DimensionOverflow, OutOfRange, QubitOverlap
from .exact import exact_propagator, integrate_schrodinger
from .geomphase import DEFAULT_STEPS, transport
from .hampath import HamiltonianPath
from .perturb import error_magnitude_estimate

MAX_QUBITS = 12


@dataclass(frozen=True, eq=False)
class GateOp:
    """One adiabatic gate placed on ``qubits``."""

    path: HamiltonianPath
    qubits: tuple
    kind: str = "berry"
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(set(self.qubits)) != len(self.qubits):
            raise QubitOverlap(f"gate {self.label} repeats a qubit: {self.qubits}")
        if self.path.dim != 2 ** len(self.qubits):
            raise ValueError(f"gate {self.label} has dimension {self.path.dim}, "
                             f"expected 2^{len(self.qubits)} for qubits {self.qubits}")

    @property
    def label(self) -> str:
        return self.name or self.path.name

    @property
    def duration(self) -> float:
        return self.path.duration


@dataclass(frozen=True)
class GateSchedule:
    rounds: tuple
    n_qubits: int
    idle: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "rounds", tuple(tuple(r) for r in self.rounds))
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise DimensionOverflow(f"{self.n_qubits} qubits exceeds the 2^{MAX_QUBITS} dimension limit"
                                    if self.n_qubits > MAX_QUBITS else "schedule needs at least one qubit")
        for k, gates in enumerate(self.rounds):
            used: set = set()
            for g in gates:
                bad = [q for q in g.qubits if not 0 <= q < self.n_qubits]
                if bad:
                    raise ValueError(f"round {k}: gate {g.label} addresses qubits {bad} outside the register")
                clash = used.intersection(g.qubits)
                if clash:
                    raise QubitOverlap(f"round {k}: qubits {sorted(clash)} used by more than one gate")
                used.update(g.qubits)
        if self.idle is not None:
            idle = np.asarray(self.idle, dtype=complex)
            if idle.shape != (2, 2) or not np.allclose(idle, idle.conj().T, atol=1e-12):
                raise ValueError("idle Hamiltonian must be a Hermitian 2x2 matrix")

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def round_duration(self, k: int) -> float:
        return max((g.duration for g in self.rounds[k]), default=0.0)

    def gates(self):
        """Iterate ``(round, gate)`` in execution order."""
        for k, gates in enumerate(self.rounds):
            for g in gates:
                yield k, g


def apply_on(op: np.ndarray, psi: np.ndarray, qubits, n_qubits: int) -> np.ndarray:
    """Apply a ``2^k x 2^k`` operator to ``qubits`` of an ``n_qubits`` state vector."""
    k = len(qubits)
    t = np.asarray(psi).reshape((2,) * n_qubits)
    o = np.asarray(op).reshape((2,) * (2 * k))
    out = np.tensordot(o, t, axes=(list(range(k, 2 * k)), list(qubits)))
    return np.moveaxis(out, list(range(k)), list(qubits)).reshape(-1)


def embed_operator(op: np.ndarray, qubits, n_qubits: int) -> np.ndarray:
    """Dense ``2^n`` matrix of ``op`` acting on ``qubits`` (identity elsewhere)."""
    d = 2 ** n_qubits
    return np.stack([apply_on(op, col, qubits, n_qubits) for col in np.eye(d, dtype=complex)], axis=1)


def embed_path(path: HamiltonianPath, qubits, n_qubits: int) -> HamiltonianPath:
    """The gate Hamiltonian on the full register with idle spectators."""
    k = len(qubits)
    rest = [q for q in range(n_qubits) if q not in qubits]
    perm = list(qubits) + rest
    inverse = np.argsort(perm)
    eye = np.eye(2 ** (n_qubits - k))

    def lift(m):
        m = np.asarray(m)
        batch = m.shape[:-2]
        big = np.einsum("...ij,kl->...ikjl", m, eye).reshape(batch + (2 ** n_qubits,) * 2)
        axes = big.reshape(batch + (2,) * (2 * n_qubits))
        nb = len(batch)
        order = list(range(nb)) + [nb + i for i in inverse] + [nb + n_qubits + i for i in inverse]
        return axes.transpose(order).reshape(batch + (2 ** n_qubits,) * 2)

    return HamiltonianPath(
        dim=2 ** n_qubits,
        duration=path.duration,
        h_func=lambda t: lift(path.hamiltonian(t)),
        dh_func=lambda t: lift(path.derivative(t)),
        gap_floor=None,
        closed=path.closed,
        name=f"{path.name}@{tuple(qubits)}",
    )


@dataclass(frozen=True)
class ErrorBudget:
    """Per-gate deviations and their accumulation over rounds.

    ``norms[j]`` is the size of gate ``j``'s deviation vector in context (gate
    ``j`` exact, every other gate adiabatic); ``predicted_sum`` adds the
    norms, ``vector_sum_norm`` is the norm of the summed vectors and
    ``round_totals[k]`` the sum of norms through round ``k``.
    """

    labels: tuple
    rounds: tuple
    norms: np.ndarray
    vectors: np.ndarray = field(repr=False)
    predicted_sum: float
    vector_sum_norm: float
    round_totals: np.ndarray
    estimates: np.ndarray

    def to_dict(self) -> dict:
        return {
            "gates": [{"label": lab, "round": r, "epsilon_norm": float(e), "estimate": float(s)}
                      for lab, r, e, s in zip(self.labels, self.rounds, self.norms, self.estimates)],
            "predicted_sum": self.predicted_sum,
            "vector_sum_norm": self.vector_sum_norm,
            "round_totals": [float(x) for x in self.round_totals],
        }


@dataclass(frozen=True)
class Composition:
    exact: np.ndarray
    zeroth: np.ndarray
    sigma: float
    budget: ErrorBudget
    measured_by_round: np.ndarray  # ||exact - zeroth|| after each round

    @property
    def second_order_residual(self) -> float:
        return abs(self.sigma - self.budget.vector_sum_norm)


def _gate_unitaries(g: GateOp, tolerance: float, steps: int) -> tuple:
    exact = exact_propagator(g.path, tolerance=tolerance)
    zeroth = transport(g.path, [g.duration], steps=steps).propagator()
    return exact, zeroth


def _idle_unitary(schedule: GateSchedule, k: int):
    if schedule.idle is None:
        return None
    return expm(-1j * np.asarray(schedule.idle, dtype=complex) * schedule.round_duration(k))


def compose_and_measure(schedule: GateSchedule, psi0, tolerance: float = 1e-10,
                        steps: int = DEFAULT_STEPS) -> Composition:
    """Run ``schedule`` exactly and in the adiabatic limit; attribute the difference per gate."""
    n = schedule.n_qubits
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (schedule.dim,):
        raise ValueError(f"input state has shape {psi0.shape}, expected ({schedule.dim},)")
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-10:
        raise ValueError("input state must have unit norm")

    # flat execution order of (round, gate); gate None is the idle step
    order = []
    for k, gates in enumerate(schedule.rounds):
        order += [(k, g) for g in gates]
        if schedule.idle is not None:
            order.append((k, None))
    unitaries = {id(g): _gate_unitaries(g, tolerance, steps) for _, g in order if g is not None}
    idles = {k: _idle_unitary(schedule, k) for k in range(len(schedule.rounds))}

    def run(psi, k, g, which):
        if g is None:
            busy = {q for h in schedule.rounds[k] for q in h.qubits}
            for q in range(n):
                if q not in busy:
                    psi = apply_on(idles[k], psi, [q], n)
            return psi
        return apply_on(unitaries[id(g)][which], psi, g.qubits, n)

    # each gate's deviation, injected along the adiabatic trajectory and carried to the end
    psi_z, injected = psi0, []
    for i, (k, g) in enumerate(order):
        if g is not None:
            exact, zeroth = unitaries[id(g)]
            injected.append((i, k, g, apply_on(exact - zeroth, psi_z, g.qubits, n)))
        psi_z = run(psi_z, k, g, 1)
    vectors = []
    for i, _, _, v in injected:
        for k, g in order[i + 1:]:
            v = run(v, k, g, 1)
        vectors.append(v)
    vectors = np.array(vectors).reshape(len(injected), schedule.dim)

    psi_x, psi_0, measured = psi0, psi0, []
    for r in range(len(schedule.rounds)):
        for k, g in order:
            if k == r:
                psi_x, psi_0 = run(psi_x, k, g, 0), run(psi_0, k, g, 1)
        measured.append(float(np.linalg.norm(psi_x - psi_0)))

    gates = [g for _, _, g, _ in injected]
    norms = np.linalg.norm(vectors, axis=1)
    rounds = tuple(k for _, k, _, _ in injected)
    totals = np.array([sum(e for e, r in zip(norms, rounds) if r <= k) for k in range(len(schedule.rounds))])
    estimates = np.array([error_magnitude_estimate(g.path.gap_floor or g.path.min_gap(), g.duration)
                          for g in gates])
    budget = ErrorBudget(
        labels=tuple(g.label for g in gates),
        rounds=rounds,
        norms=norms,
        vectors=vectors,
        predicted_sum=float(sum(norms)),
        vector_sum_norm=float(np.linalg.norm(vectors.sum(axis=0))),
        round_totals=totals,
        estimates=estimates,
    )
    sigma = float(np.linalg.norm(psi_x - psi_0))
    return Composition(psi_x, psi_0, sigma, budget, np.array(measured))


@dataclass(frozen=True)
class EntangledCheck:
    full: np.ndarray
    branchwise: np.ndarray
    deviation: float
    branches: int
    consistent: bool


def entangled_input_check(gate: GateOp, psi0, n_qubits: int, tolerance: float = 1e-11,
                          atol: float = 1e-9) -> EntangledCheck:
    """Compare full-register integration with branch-by-branch propagation.

    ``psi0`` is decomposed along the computational basis of the spectator
    qubits; each branch is propagated under the bare gate Hamiltonian and the
    results reassembled.  Spectators idle under the zero Hamiltonian.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    q = list(gate.qubits)
    rest = [i for i in range(n_qubits) if i not in q]
    full = integrate_schrodinger(embed_path(gate.path, q, n_qubits), psi0, tolerance=tolerance)

    t = np.moveaxis(psi0.reshape((2,) * n_qubits), q + rest, list(range(n_qubits)))
    t = t.reshape(2 ** len(q), -1)
    out = np.zeros_like(t)
    branches = 0
    for b in range(t.shape[1]):
        amp = np.linalg.norm(t[:, b])
        if amp == 0.0:
            continue
        branches += 1
        out[:, b] = amp * integrate_schrodinger(gate.path, t[:, b] / amp, tolerance=tolerance)
    out = out.reshape((2,) * n_qubits)
    branchwise = np.moveaxis(out, list(range(n_qubits)), q + rest).reshape(-1)
    dev = float(np.linalg.norm(full - branchwise))
    return EntangledCheck(full, branchwise, dev, branches, dev <= atol)


def bell_state() -> np.ndarray:
    return np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)


def ghz_state(n: int = 3) -> np.ndarray:
    psi = np.zeros(2 ** n, dtype=complex)
    psi[0] = psi[-1] = 1 / math.sqrt(2)
    return psi


def shor_bound(epsilon: float) -> tuple:
    """Gate-count and factorable-number limits for a per-gate error ``epsilon``.

    ``M_max = 1 / epsilon`` keeps the summed error below one; with
    ``M ~ 300 (log10 N)^3`` gates needed to factor ``N`` this gives
    ``N_max = 10 ** ((1 / (300 epsilon)) ** (1/3))``.
    """
    if not 0.0 < epsilon < 1.0:
        raise OutOfRange(f"per-gate error must lie in (0, 1), got {epsilon!r}")
    m_max = 1.0 / epsilon
    return m_max, 10.0 ** ((m_max / 300.0) ** (1.0 / 3.0))
