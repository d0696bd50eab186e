"""Zeroth- and first-order adiabatic propagation and non-adiabatic error.

The first-order term for a source level ``n`` evaluated at time ``t`` is

    U1 |chi_n(0)> = exp(i eta_n) * i * sum_{m != n} |chi_m(t)> <chi_m|d_t chi_n> / (E_m - E_n)

with ``chi`` the parallel-transported eigenbasis (hbar = 1).  It depends on the
frame, energies and ``dH/dt`` at ``t`` only.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateLevel, NonPositiveInput, PerturbativeRegimeViolated, SupportViolation
from .geomphase import DEFAULT_STEPS, Transport, transport
from .hampath import HamiltonianPath
from .spectral import InstantaneousFrame, coupling_matrix

HBAR = 1.0
SUPPORT_TOL = 1e-10


@dataclass(frozen=True)
class AmplitudeVector:
    """Amplitudes on the columns of ``frame``, with optional dynamic phases.

    The represented state is ``sum_k values[k] exp(i phases[k]) frame[:, k]``.
    """

    values: np.ndarray
    frame: InstantaneousFrame
    phases: np.ndarray | None = None

    @classmethod
    def from_state(cls, frame: InstantaneousFrame, psi) -> "AmplitudeVector":
        psi = np.asarray(psi, dtype=complex)
        return cls._normalized(frame.eigenvectors.conj().T @ psi, frame)

    @classmethod
    def level(cls, frame: InstantaneousFrame, n: int, alpha: int = 0) -> "AmplitudeVector":
        values = np.zeros(frame.dim, dtype=complex)
        values[frame.column((n, alpha))] = 1.0
        return cls(values, frame)

    @classmethod
    def from_levels(cls, frame: InstantaneousFrame, amplitudes: dict) -> "AmplitudeVector":
        """``amplitudes`` maps ``(level, index)`` to a complex amplitude."""
        values = np.zeros(frame.dim, dtype=complex)
        for key, a in amplitudes.items():
            values[frame.column(key)] = a
        return cls._normalized(values, frame)

    @classmethod
    def _normalized(cls, values, frame):
        dev = abs(np.linalg.norm(values) - 1.0)
        if dev > 1e-10:
            raise ValueError(f"initial amplitudes not normalised (|norm - 1| = {dev:.2e})")
        return cls(np.asarray(values, dtype=complex), frame)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    @property
    def norm_deviation(self) -> float:
        return abs(self.norm - 1.0)

    def state(self) -> np.ndarray:
        phases = np.zeros(len(self.values)) if self.phases is None else self.phases
        return self.frame.eigenvectors @ (self.values * np.exp(1j * phases))

    def block(self, n: int) -> np.ndarray:
        return self.values[list(self.frame.blocks[n])]

    def support(self, tol: float = SUPPORT_TOL) -> list:
        return [n for n in range(len(self.frame.blocks)) if np.linalg.norm(self.block(n)) > tol]


def error_magnitude_estimate(delta: float, T: float, k: int = 1, hbar: float = HBAR) -> float:
    """Order-of-magnitude ``k``-th order non-adiabatic correction ``(hbar / (delta T))^k``."""
    if not (delta > 0 and T > 0):
        raise NonPositiveInput(f"gap and duration must be positive (got {delta!r}, {T!r})")
    if int(k) != k or k < 1:
        raise NonPositiveInput(f"order k must be a positive integer (got {k!r})")
    return (hbar / (delta * T)) ** int(k)


def first_order_operator(frame: InstantaneousFrame, dh, eta=None) -> np.ndarray:
    """Matrix whose column ``c`` is ``U1 |chi_c(0)>`` expressed in the ambient basis.

    ``frame`` must carry the (transported) basis at the evaluation time and
    ``eta`` the per-column dynamic phases.  Only endpoint data enters.
    """
    c = coupling_matrix(frame, dh)
    labels = frame.level_of_column()
    energies = np.array([frame.level_energy(k) for k in labels])
    denom = energies[:, None] - energies[None, :]
    same = labels[:, None] == labels[None, :]
    amp = np.where(same, 0.0, 1j * HBAR * c / np.where(same, 1.0, denom))
    x = frame.eigenvectors @ amp
    if eta is not None:
        x = x * np.exp(1j * np.asarray(eta))[None, :]
    return x


def endpoint_correction(frame: InstantaneousFrame, dh, source: int) -> np.ndarray:
    """First-order correction vector for level ``source`` without phase factors."""
    x = first_order_operator(frame, dh)
    return x[:, list(frame.blocks[source])]


@dataclass(frozen=True)
class FirstOrderResult:
    time: float
    zeroth: np.ndarray
    correction: np.ndarray
    transitions: np.ndarray  # <phi_m(t)| U1 |phi_n(0)> in the reference bases
    gap: float
    estimate: float
    perturbative: bool
    transport: Transport = field(repr=False)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.correction))

    @property
    def state(self) -> np.ndarray:
        return self.zeroth + self.correction


def _support_gap(path: HamiltonianPath, levels) -> float:
    return float(min(np.min(path.level_gaps(n)) for n in levels))


def _transport_for(path, a0: AmplitudeVector, times, steps) -> Transport:
    return transport(path, times, t0=a0.frame.time, steps=steps, initial=a0.frame)


def zeroth_order_propagate(path: HamiltonianPath, a0: AmplitudeVector, t: float,
                           steps: int = DEFAULT_STEPS) -> np.ndarray:
    """Adiabatic-limit state: each block carried by its dynamic phase and holonomy."""
    tr = _transport_for(path, a0, [t], steps)
    return tr.propagator() @ a0.state()


def zeroth_order_trajectory(path: HamiltonianPath, a0: AmplitudeVector, times,
                            steps: int = DEFAULT_STEPS) -> np.ndarray:
    tr = _transport_for(path, a0, times, steps)
    psi0 = a0.state()
    return np.stack([tr.propagator(k) @ psi0 for k in range(len(tr.times))])


def first_order_propagate(path: HamiltonianPath, a0: AmplitudeVector, t: float,
                          steps: int = DEFAULT_STEPS, tr: Transport | None = None,
                          index: int = -1) -> FirstOrderResult:
    """Zeroth-order state plus the first-order endpoint correction at ``t``.

    Issues :class:`PerturbativeRegimeViolated` (and sets ``perturbative=False``)
    when ``hbar / (gap T) >= 1``; the result is returned regardless.
    """
    if tr is None:
        tr = _transport_for(path, a0, [t], steps)
    t = float(tr.times[index])
    frame = tr.frame(index)
    x = first_order_operator(frame, path.derivative(t), tr.dynamic[index])
    amps = a0.values
    zeroth = tr.propagator(index) @ a0.state()
    correction = x @ amps
    transitions = tr.reference[index].conj().T @ x
    levels = a0.support() or list(range(len(frame.blocks)))
    gap = _support_gap(path, levels)
    estimate = error_magnitude_estimate(gap, path.duration)
    ok = estimate < 1.0
    if not ok:
        warnings.warn(f"hbar/(gap T) = {estimate:.3g} >= 1: outside the perturbative regime",
                      PerturbativeRegimeViolated, stacklevel=2)
    return FirstOrderResult(t, zeroth, correction, transitions, gap, estimate, ok, tr)


def first_order_trajectory(path: HamiltonianPath, a0: AmplitudeVector, times,
                           steps: int = DEFAULT_STEPS) -> list:
    tr = _transport_for(path, a0, times, steps)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PerturbativeRegimeViolated)
        return [first_order_propagate(path, a0, t, tr=tr, index=k) for k, t in enumerate(tr.times)]


@dataclass(frozen=True)
class ErrorReport:
    """Non-adiabatic error of a gate at time ``T`` next to the ``hbar/(gap T)`` estimate.

    ``epsilon`` is the first-order deviation ket ``U1 |psi(0)>``;
    ``per_level`` its norm inside each target block;
    ``coefficients_as_written`` holds, per initial basis state ``c``, the
    amplitude ``a_c sum_{m not in block(c)} <phi_m(T)|U1|phi_c(0)>`` summed over
    target levels.  That last quantity depends on the eigenvector phases chosen
    at ``T`` and is reported for reference only.
    """

    gate_kind: str
    time: float
    epsilon: np.ndarray
    per_level: dict
    coefficients_as_written: np.ndarray
    gap: float
    estimate: float
    perturbative: bool

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.epsilon))

    def to_dict(self) -> dict:
        return {
            "gate_kind": self.gate_kind,
            "time": self.time,
            "epsilon_norm": self.norm,
            "per_level": {str(k): v for k, v in self.per_level.items()},
            "gap": self.gap,
            "estimate": self.estimate,
            "perturbative": self.perturbative,
            "epsilon": {"re": self.epsilon.real.tolist(), "im": self.epsilon.imag.tolist()},
        }


def nonadiabatic_error(path: HamiltonianPath, a0: AmplitudeVector, T: float | None = None,
                       gate_kind: str = "berry", steps: int = DEFAULT_STEPS) -> ErrorReport:
    """First-order error of a Berry-phase (``"berry"``) or holonomic (``"wz"``) gate."""
    T = path.duration if T is None else float(T)
    support = a0.support()
    frame0 = a0.frame
    if gate_kind == "wz":
        if len(support) != 1:
            raise SupportViolation(f"holonomic gate input spans levels {support}; expected one block")
    elif gate_kind == "berry":
        bad = [n for n in support if len(frame0.blocks[n]) > 1]
        if bad:
            raise DegenerateLevel(f"Berry-phase gate input occupies degenerate levels {bad}")
    else:
        raise ValueError(f"gate_kind must be 'berry' or 'wz', got {gate_kind!r}")

    res = first_order_propagate(path, a0, T, steps=steps)
    frame_t = res.transport.frame()
    per_level = {m: float(np.linalg.norm(frame_t.block_vectors(m).conj().T @ res.correction))
                 for m in range(len(frame_t.blocks))}
    labels = frame0.level_of_column()
    mask = labels[:, None] != labels[None, :]
    literal = a0.values * np.sum(np.where(mask, res.transitions, 0.0), axis=0)
    return ErrorReport(gate_kind, T, res.correction, per_level, literal, res.gap, res.estimate, res.perturbative)
