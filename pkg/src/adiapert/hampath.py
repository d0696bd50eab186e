"""Time-dependent Hamiltonian paths and the model zoo.

A :class:`HamiltonianPath` wraps a vectorised map ``t -> H(t)``: called with a
scalar it returns a ``(d, d)`` matrix, called with an array of times it
returns a stack ``(n, d, d)``.  All model constructors follow that convention,
so frames along a path can be computed with one batched ``eigh``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import NonPositiveGap, ZeroGap
from .spectral import (
    Degeneracy,
    InstantaneousFrame,
    check_hermitian,
    eigendecompose,
    eigendecompose_many,
    group_blocks,
)

TWO_PI = 2.0 * math.pi
SHAPES = ("linear", "smoothstep", "sinusoidal-ramp")

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class Schedule:
    """Ramp ``s(t)`` from 0 to 1 over ``[0, duration]``.

    ``linear`` moves at constant speed, ``smoothstep`` (3u^2 - 2u^3) starts and
    stops at rest, ``sinusoidal-ramp`` (1 - cos(pi u / 2)) starts at rest and
    arrives at speed ``pi / (2 T)``.
    """

    duration: float
    shape: str = "linear"

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError(f"schedule duration must be positive, got {self.duration}")
        if self.shape not in SHAPES:
            raise ValueError(f"unknown schedule shape {self.shape!r}; expected one of {SHAPES}")

    def s(self, t):
        u = np.asarray(t, dtype=float) / self.duration
        if self.shape == "linear":
            return u
        if self.shape == "smoothstep":
            return u * u * (3.0 - 2.0 * u)
        return 1.0 - np.cos(0.5 * np.pi * u)

    def ds(self, t):
        u = np.asarray(t, dtype=float) / self.duration
        if self.shape == "linear":
            return np.ones_like(u) / self.duration
        if self.shape == "smoothstep":
            return 6.0 * u * (1.0 - u) / self.duration
        return 0.5 * np.pi * np.sin(0.5 * np.pi * u) / self.duration

    def scaled(self, factor: float) -> "Schedule":
        return Schedule(self.duration * factor, self.shape)


@dataclass(frozen=True, eq=False)
class HamiltonianPath:
    """A Hermitian operator parametrised by time on ``[0, duration]``.

    ``gap_floor`` is the declared minimum separation between distinct blocks;
    ``degeneracy`` the declared block multiplicities (``None`` falls back to
    tolerance grouping).
    """

    dim: int
    duration: float
    h_func: Callable
    dh_func: Optional[Callable] = None
    degeneracy: Optional[tuple] = None
    gap_floor: Optional[float] = None
    closed: bool = False
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def hamiltonian(self, t) -> np.ndarray:
        return np.asarray(self.h_func(t), dtype=complex)

    def derivative(self, t) -> np.ndarray:
        """Analytic ``dH/dt`` when supplied, else a central difference with step 1e-6 T."""
        if self.dh_func is not None:
            return np.asarray(self.dh_func(t), dtype=complex)
        h = 1e-6 * self.duration
        t = np.asarray(t, dtype=float)
        return (self.hamiltonian(t + h) - self.hamiltonian(t - h)) / (2.0 * h)

    def frame(self, t: float, degeneracy: Degeneracy = None) -> InstantaneousFrame:
        deg = self.degeneracy if degeneracy is None else degeneracy
        return eigendecompose(self.hamiltonian(t), deg, time=t)

    def frames(self, times) -> list:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        return eigendecompose_many(self.hamiltonian(times), self.degeneracy, times)

    def spectra(self, times) -> np.ndarray:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        return np.linalg.eigvalsh(check_hermitian(self.hamiltonian(times)))

    def block_gaps(self, samples: int = 1000) -> np.ndarray:
        """Smallest inter-block gap at each of ``samples`` uniformly spaced times."""
        times = np.linspace(0.0, self.duration, samples)
        spectra = self.spectra(times)
        pattern = self.pattern()
        edges = np.cumsum(pattern)[:-1]
        if len(edges) == 0:
            return np.full(samples, np.inf)
        return np.min(spectra[:, edges] - spectra[:, edges - 1], axis=1)

    def level_gaps(self, level: int, samples: int = 1000) -> np.ndarray:
        """Gap from block ``level`` to its nearest neighbouring block over time."""
        times = np.linspace(0.0, self.duration, samples)
        spectra = self.spectra(times)
        starts = np.concatenate([[0], np.cumsum(self.pattern())])
        lo, hi = starts[level], starts[level + 1]
        gaps = np.full(samples, np.inf)
        if lo > 0:
            gaps = np.minimum(gaps, spectra[:, lo] - spectra[:, lo - 1])
        if hi < self.dim:
            gaps = np.minimum(gaps, spectra[:, hi] - spectra[:, hi - 1])
        return gaps

    def min_gap(self, samples: int = 1000) -> float:
        return float(np.min(self.block_gaps(samples)))

    def pattern(self) -> tuple:
        if self.degeneracy is not None:
            return tuple(self.degeneracy)
        return self.frame(0.0).pattern

    def validate(self, samples: int = 1000) -> None:
        """Check Hermiticity, closure and the non-crossing gap floor on a time sample."""
        times = np.linspace(0.0, self.duration, samples)
        hs = check_hermitian(self.hamiltonian(times))
        scale = max(float(np.max(np.linalg.norm(hs, 2, axis=(-2, -1)))), 1e-300)
        if self.closed:
            drift = np.max(np.abs(hs[-1] - hs[0]))
            if drift >= 1e-10 * scale:
                raise ValueError(f"path flagged closed but H(T) - H(0) = {drift:.2e}")
        for h in hs[:: max(1, samples // 50)]:
            group_blocks(np.linalg.eigvalsh(h), self.degeneracy, scale=scale)
        if self.gap_floor is not None:
            gmin = self.min_gap(samples)
            if gmin < 0.9 * self.gap_floor:
                raise ZeroGap(f"gap {gmin:.3e} falls below 0.9 x declared floor {self.gap_floor:.3e}")

    def reversed(self) -> "HamiltonianPath":
        """Traverse the same path backwards in time."""
        T = self.duration
        dh = None
        if self.dh_func is not None:
            dh = lambda t, f=self.dh_func: -np.asarray(f(T - np.asarray(t, dtype=float)))
        return HamiltonianPath(
            dim=self.dim,
            duration=T,
            h_func=lambda t, f=self.h_func: f(T - np.asarray(t, dtype=float)),
            dh_func=dh,
            degeneracy=self.degeneracy,
            gap_floor=self.gap_floor,
            closed=self.closed,
            name=f"{self.name}:reversed",
            params=dict(self.params),
        )


def constant_path(h, duration: float, degeneracy: Degeneracy = None) -> HamiltonianPath:
    h = check_hermitian(h)
    d = h.shape[0]

    def h_func(t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(h, t.shape + h.shape).copy()

    def dh_func(t):
        t = np.asarray(t, dtype=float)
        return np.zeros(t.shape + h.shape, dtype=complex)

    frame = eigendecompose(h, degeneracy)
    edges = [frame.eigenvalues[b[0]] - frame.eigenvalues[a[-1]] for a, b in zip(frame.blocks, frame.blocks[1:])]
    return HamiltonianPath(
        dim=d,
        duration=float(duration),
        h_func=h_func,
        dh_func=dh_func,
        degeneracy=frame.pattern,
        gap_floor=float(min(edges)) if edges else None,
        closed=True,
        name="constant",
    )


def _is_closed(h_func, duration) -> bool:
    h0, h1 = np.asarray(h_func(0.0)), np.asarray(h_func(duration))
    scale = max(np.linalg.norm(h0, 2), 1e-300)
    return bool(np.max(np.abs(h1 - h0)) < 1e-10 * scale)


def spin_half_field(rx, ry, rz) -> np.ndarray:
    """``R . sigma / 2`` broadcast over arrays of field components."""
    rx, ry, rz = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (rx, ry, rz)))
    return 0.5 * (
        rx[..., None, None] * SIGMA_X + ry[..., None, None] * SIGMA_Y + rz[..., None, None] * SIGMA_Z
    )


# --------------------------------------------------------------------------
# NMR: H = R . I, R = (w1 cos phi, w1 sin phi, w0 - w)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class NMRSingleParams:
    omega0: float
    omega1: float
    omega: float
    phi0: float = 0.0
    phi_sweep: float = TWO_PI

    @property
    def detuning(self) -> float:
        return self.omega0 - self.omega

    @property
    def gap(self) -> float:
        return math.hypot(self.omega1, self.detuning)

    @property
    def cone_angle(self) -> float:
        return math.atan2(self.omega1, self.detuning)

    @classmethod
    def from_cone(cls, gap: float, theta: float, **kw) -> "NMRSingleParams":
        """Parameters whose field has magnitude ``gap`` at polar angle ``theta``."""
        return cls(omega0=gap * math.cos(theta), omega1=gap * math.sin(theta), omega=0.0, **kw)


def _loop_angles(phi0, sweep, sched):
    return (
        lambda t: phi0 + sweep * sched.s(t),
        lambda t: sweep * sched.ds(t),
    )


def nmr_single_path(p: NMRSingleParams, sched: Schedule) -> HamiltonianPath:
    """Rotating-frame spin-1/2 whose RF phase sweeps ``phi0 -> phi0 + phi_sweep``."""
    if p.omega1 < 0:
        raise ValueError("omega1 must be non-negative")
    gap = p.gap
    if gap == 0.0:
        raise ZeroGap("omega1 = 0 and omega0 = omega: levels cross")
    phi, dphi = _loop_angles(p.phi0, p.phi_sweep, sched)
    w1, dz = p.omega1, p.detuning

    def h(t):
        f = phi(t)
        return spin_half_field(w1 * np.cos(f), w1 * np.sin(f), dz + 0.0 * f)

    def dh(t):
        f, df = phi(t), dphi(t)
        return spin_half_field(-w1 * np.sin(f) * df, w1 * np.cos(f) * df, 0.0 * f)

    return HamiltonianPath(
        dim=2,
        duration=sched.duration,
        h_func=h,
        dh_func=dh,
        degeneracy=(1, 1),
        gap_floor=gap,
        closed=_is_closed(h, sched.duration),
        name="nmr_single",
        params={"omega0": p.omega0, "omega1": p.omega1, "omega": p.omega, "phi0": p.phi0,
                "phi_sweep": p.phi_sweep, "shape": sched.shape, "cone_angle": p.cone_angle},
    )


@dataclass(frozen=True)
class NMRTwoQubitParams:
    """Qubit ``a`` is driven; qubit ``b`` conditions it through ``J I_az I_bz``."""

    omega1: float
    omega_a0: float
    omega: float
    J: float
    detuning_b: float = 0.0
    phi0: float = 0.0
    phi_sweep: float = TWO_PI

    def conditional(self, b_state: int) -> NMRSingleParams:
        """Effective single-qubit parameters for qubit ``b`` in ``|up>`` (+1) or ``|down>`` (-1)."""
        if b_state not in (1, -1):
            raise ValueError("b_state must be +1 (up) or -1 (down)")
        return NMRSingleParams(self.omega_a0 + b_state * self.J / 2.0, self.omega1, self.omega,
                               self.phi0, self.phi_sweep)


def nmr_two_qubit_path(p: NMRTwoQubitParams, sched: Schedule) -> HamiltonianPath:
    """Two J-coupled spins on ``C^2 (a) x C^2 (b)``, block diagonal in qubit ``b``."""
    for b in (1, -1):
        if p.conditional(b).gap == 0.0:
            raise ZeroGap(f"conditional block b={b:+d} has zero gap")
    phi, dphi = _loop_angles(p.phi0, p.phi_sweep, sched)
    iz = 0.5 * SIGMA_Z
    static = p.detuning_b * np.kron(IDENTITY_2, iz) + p.J * np.kron(iz, iz)

    def h(t):
        f = phi(t)
        ha = spin_half_field(p.omega1 * np.cos(f), p.omega1 * np.sin(f), (p.omega_a0 - p.omega) + 0.0 * f)
        return np.kron(ha, IDENTITY_2) + static

    def dh(t):
        f, df = phi(t), dphi(t)
        dha = spin_half_field(-p.omega1 * np.sin(f) * df, p.omega1 * np.cos(f) * df, 0.0 * f)
        return np.kron(dha, IDENTITY_2)

    h0 = h(0.0)
    frame = eigendecompose(h0)
    energies = [frame.level_energy(n) for n in range(len(frame.blocks))]
    gap = float(np.min(np.diff(energies))) if len(energies) > 1 else None
    return HamiltonianPath(
        dim=4,
        duration=sched.duration,
        h_func=h,
        dh_func=dh,
        degeneracy=frame.pattern,
        gap_floor=gap,
        closed=_is_closed(h, sched.duration),
        name="nmr_two_qubit",
        params={"omega1": p.omega1, "omega_a0": p.omega_a0, "omega": p.omega, "J": p.J,
                "detuning_b": p.detuning_b, "phi0": p.phi0, "phi_sweep": p.phi_sweep, "shape": sched.shape},
    )


def nmr_conditional_paths(p: NMRTwoQubitParams, sched: Schedule) -> dict:
    """The two 2x2 single-qubit paths seen by qubit ``a``, keyed by ``b`` = +1 / -1."""
    return {b: nmr_single_path(p.conditional(b), sched) for b in (1, -1)}


# --------------------------------------------------------------------------
# Josephson charge qubit: R = (E_J cos a, -E_J sin a, E_c (1 - 2 n_off))
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class JosephsonParams:
    e_j: float
    e_c: float
    n_off: float
    alpha0: float = 0.0
    alpha_sweep: float = TWO_PI

    @property
    def gap(self) -> float:
        return math.hypot(self.e_j, self.e_c * (1.0 - 2.0 * self.n_off))

    @property
    def charging_regime(self) -> bool:
        return self.e_c >= self.e_j


def josephson_charge_path(p: JosephsonParams, sched: Schedule) -> HamiltonianPath:
    if p.e_j < 0 or p.e_c <= 0:
        raise ValueError("require E_J >= 0 and E_c > 0")
    if p.gap == 0.0:
        raise ZeroGap("E_J = 0 at the charge degeneracy point n_off = 1/2")
    alpha, dalpha = _loop_angles(p.alpha0, p.alpha_sweep, sched)
    rz = p.e_c * (1.0 - 2.0 * p.n_off)

    def h(t):
        a = alpha(t)
        return spin_half_field(p.e_j * np.cos(a), -p.e_j * np.sin(a), rz + 0.0 * a)

    def dh(t):
        a, da = alpha(t), dalpha(t)
        return spin_half_field(-p.e_j * np.sin(a) * da, -p.e_j * np.cos(a) * da, 0.0 * a)

    return HamiltonianPath(
        dim=2,
        duration=sched.duration,
        h_func=h,
        dh_func=dh,
        degeneracy=(1, 1),
        gap_floor=p.gap,
        closed=_is_closed(h, sched.duration),
        name="josephson_charge",
        params={"e_j": p.e_j, "e_c": p.e_c, "n_off": p.n_off, "alpha0": p.alpha0,
                "alpha_sweep": p.alpha_sweep, "shape": sched.shape, "charging_regime": p.charging_regime},
    )


# --------------------------------------------------------------------------
# Trapped-ion tripod: H = |e>(w0 <0| + w1 <1| + wa <a|) + h.c., basis (e, 0, 1, a)
# --------------------------------------------------------------------------


def tripod_hamiltonian(w0, w1, wa) -> np.ndarray:
    w = np.stack(np.broadcast_arrays(*(np.asarray(x, dtype=complex) for x in (w0, w1, wa))), axis=-1)
    h = np.zeros(w.shape[:-1] + (4, 4), dtype=complex)
    h[..., 0, 1:] = w
    h[..., 1:, 0] = w.conj()
    return h


def tripod_eigensystem(w0: complex, w1: complex, wa: complex) -> tuple:
    """Closed-form spectrum ``(-w, 0, 0, w)`` and eigenvectors as columns.

    The two dark states are ``(w1|0> - w0|1>)/sqrt(|w0|^2+|w1|^2)`` and
    ``(wa w0*|0> + wa w1*|1> - (|w0|^2+|w1|^2)|a>)/(w sqrt(|w0|^2+|w1|^2))``.
    Raises ``ZeroGap`` when all couplings vanish and ``ValueError`` when
    ``w0 = w1 = 0`` (the closed forms are singular; use a numeric kernel).
    """
    w0, w1, wa = complex(w0), complex(w1), complex(wa)
    w = math.sqrt(abs(w0) ** 2 + abs(w1) ** 2 + abs(wa) ** 2)
    if w == 0.0:
        raise ZeroGap("all tripod couplings vanish")
    r = math.sqrt(abs(w0) ** 2 + abs(w1) ** 2)
    if r == 0.0:
        raise ValueError("closed-form dark states are singular when w0 = w1 = 0")
    bright = np.array([0, w0.conjugate(), w1.conjugate(), wa.conjugate()]) / w
    e = np.array([1, 0, 0, 0], dtype=complex)
    up = (e + bright) / math.sqrt(2.0)
    down = (-e + bright) / math.sqrt(2.0)
    dark_a = np.array([0, w1, -w0, 0]) / r
    dark_b = np.array([0, wa * w0.conjugate(), wa * w1.conjugate(), -(r ** 2)]) / (w * r)
    vectors = np.stack([down, dark_a, dark_b, up], axis=1)
    return np.array([-w, 0.0, 0.0, w]), vectors


@dataclass(frozen=True)
class TripodParams:
    """Couplings ``omega * (sin th cos ph, sin th sin ph, cos th)`` with ``ph`` swept.

    A custom ``couplings(s) -> (..., 3)`` map (and optionally its ``s``
    derivative) overrides the cone loop.
    """

    omega: float = 1.0
    theta: float = math.pi / 3
    phi0: float = 0.0
    phi_sweep: float = TWO_PI
    couplings: Optional[Callable] = None
    dcouplings: Optional[Callable] = None

    def cone(self, s):
        ph = self.phi0 + self.phi_sweep * np.asarray(s, dtype=float)
        st, ct = math.sin(self.theta), math.cos(self.theta)
        return self.omega * np.stack([st * np.cos(ph), st * np.sin(ph), ct + 0.0 * ph], axis=-1)

    def dcone(self, s):
        ph = self.phi0 + self.phi_sweep * np.asarray(s, dtype=float)
        st = math.sin(self.theta)
        return self.omega * self.phi_sweep * np.stack([-st * np.sin(ph), st * np.cos(ph), 0.0 * ph], axis=-1)


def tripod_ion_path(p: TripodParams, sched: Schedule) -> HamiltonianPath:
    """Tripod path with declared pattern ``(1, 2, 1)``; zero-energy block is the dark space."""
    coup = p.couplings or p.cone
    if p.couplings is None:
        dcoup = p.dcouplings or p.dcone
    elif p.dcouplings is not None:
        dcoup = p.dcouplings
    else:
        def dcoup(s, eps=1e-6):
            s = np.asarray(s, dtype=float)
            return (np.asarray(coup(s + eps)) - np.asarray(coup(s - eps))) / (2 * eps)

    def h(t):
        c = np.asarray(coup(sched.s(t)), dtype=complex)
        return tripod_hamiltonian(c[..., 0], c[..., 1], c[..., 2])

    def dh(t):
        c = np.asarray(dcoup(sched.s(t)), dtype=complex) * np.asarray(sched.ds(t))[..., None]
        return tripod_hamiltonian(c[..., 0], c[..., 1], c[..., 2])

    sample = np.asarray(coup(np.linspace(0.0, 1.0, 1001)))
    wmin = float(np.min(np.linalg.norm(sample, axis=-1)))
    if wmin == 0.0:
        raise ZeroGap("all tripod couplings vanish somewhere on the path")
    return HamiltonianPath(
        dim=4,
        duration=sched.duration,
        h_func=h,
        dh_func=dh,
        degeneracy=(1, 2, 1),
        gap_floor=wmin,
        closed=_is_closed(h, sched.duration),
        name="tripod_ion",
        params={"omega": p.omega, "theta": p.theta, "phi0": p.phi0, "phi_sweep": p.phi_sweep,
                "shape": sched.shape, "custom": p.couplings is not None},
    )


# --------------------------------------------------------------------------
# Two-ion phase gate on span{|11>, |aa>, |ee>}
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class IonTwoBitParams:
    omega_1: float
    omega_a: float
    eta: float
    delta: float
    phi0: float = 0.0
    phi_sweep: float = TWO_PI

    @property
    def coupling(self) -> float:
        return self.eta ** 2 / self.delta

    @property
    def gap(self) -> float:
        return abs(self.coupling) * math.sqrt(self.omega_1 ** 4 + self.omega_a ** 4)


def ion_two_bit_matrix(omega_1, omega_a, eta, delta, phi) -> np.ndarray:
    """Hamiltonian in the basis ``(|11>, |aa>, |ee>)`` with laser phases ``phi_1 = phi/2, phi_a = 0``."""
    g = eta ** 2 / delta
    phi = np.asarray(phi, dtype=float)
    h = np.zeros(phi.shape + (3, 3), dtype=complex)
    h[..., 2, 0] = -g * abs(omega_1) ** 2 * np.exp(1j * phi)
    h[..., 2, 1] = g * abs(omega_a) ** 2
    h[..., 0, 2] = np.conj(h[..., 2, 0])
    h[..., 1, 2] = np.conj(h[..., 2, 1])
    return h


def ion_two_bit_eigensystem(omega_1, omega_a, eta, delta, phi) -> tuple:
    """Closed-form eigenvalues ``(-E, 0, E)`` and eigenvectors (columns) for ``delta > 0``."""
    g = eta ** 2 / delta
    o1, oa = abs(omega_1) ** 2, abs(omega_a) ** 2
    root = math.sqrt(o1 ** 2 + oa ** 2)
    if root == 0.0:
        raise ZeroGap("Omega_1 = Omega_a = 0")
    ph = np.exp(1j * phi)
    ee = np.array([0, 0, 1], dtype=complex)
    bright = np.array([-o1 / ph, oa, 0]) / root
    dark = np.array([oa, o1 * ph, 0]) / root
    plus = (bright + ee) / math.sqrt(2.0)
    minus = (bright - ee) / math.sqrt(2.0)
    energies = np.array([-g * root, 0.0, g * root])
    vectors = np.stack([minus, dark, plus], axis=1) if g > 0 else np.stack([plus, dark, minus], axis=1)
    return np.sort(energies), vectors


def ion_two_bit_path(p: IonTwoBitParams, sched: Schedule) -> HamiltonianPath:
    if p.delta == 0:
        raise ValueError("detuning delta must be non-zero")
    if p.gap == 0.0:
        raise ZeroGap("Omega_1 = Omega_a = 0")
    phi, dphi = _loop_angles(p.phi0, p.phi_sweep, sched)
    g = p.coupling

    def h(t):
        return ion_two_bit_matrix(p.omega_1, p.omega_a, p.eta, p.delta, phi(t))

    def dh(t):
        f, df = phi(t), dphi(t)
        out = np.zeros(np.shape(f) + (3, 3), dtype=complex)
        out[..., 2, 0] = -g * p.omega_1 ** 2 * 1j * df * np.exp(1j * f)
        out[..., 0, 2] = np.conj(out[..., 2, 0])
        return out

    return HamiltonianPath(
        dim=3,
        duration=sched.duration,
        h_func=h,
        dh_func=dh,
        degeneracy=(1, 1, 1),
        gap_floor=p.gap,
        closed=_is_closed(h, sched.duration),
        name="ion_two_bit",
        params={"omega_1": p.omega_1, "omega_a": p.omega_a, "eta": p.eta, "delta": p.delta,
                "phi0": p.phi0, "phi_sweep": p.phi_sweep, "shape": sched.shape},
    )


# --------------------------------------------------------------------------
# Gap formulas for proposals given only through their spectra
# --------------------------------------------------------------------------


def _charge_bias(params: dict) -> float:
    if "h" in params:
        return float(params["h"])
    return float(params["e_c"]) * (1.0 - 2.0 * float(params["n_off"])) / 2.0


def named_gap_estimate(model: str, **params) -> float:
    """Working-level gap for the spectrum-only Josephson WZ proposals.

    ``choi_single``: ``h`` (or ``e_c``, ``n_off``), ``j1``, ``j2``.
    ``choi_two``: ``h`` (or ``e_c``, ``n_off``), ``j_b``.
    ``faoro_single``: ``delta_ec`` and ``j`` (or ``j_l``, ``j_m``, ``j_r``);
    ``upper_variant`` selects ``"J2"`` (default) or ``"2J2"`` under the root of
    the upper level.
    ``faoro_two``: ``j_x``, ``j_m2``.
    """
    if model == "choi_single":
        h = _charge_bias(params)
        gap = math.sqrt(h * h + abs(params["j1"]) ** 2 + abs(params["j2"]) ** 2) - h
    elif model == "choi_two":
        h2 = 2.0 * _charge_bias(params)
        gap = min(math.sqrt(abs(params["j_b"]) ** 2 + h2 * h2) - h2, h2)
    elif model == "faoro_single":
        dec = float(params["delta_ec"])
        if "j" in params:
            j2 = abs(params["j"]) ** 2
        else:
            j2 = sum(abs(params[k]) ** 2 for k in ("j_l", "j_m", "j_r"))
        variant = params.get("upper_variant", "J2")
        if variant not in ("J2", "2J2"):
            raise ValueError(f"upper_variant must be 'J2' or '2J2', got {variant!r}")
        upper = dec + math.sqrt(dec * dec + (2.0 if variant == "2J2" else 1.0) * j2)
        lower = dec - math.sqrt(dec * dec + j2)
        gap = min(abs(upper), abs(lower))
    elif model == "faoro_two":
        gap = math.sqrt(abs(params["j_x"]) ** 2 + abs(params["j_m2"]) ** 2) / 2.0
    else:
        raise ValueError(f"unknown model {model!r}")
    if not gap > 0:
        raise NonPositiveGap(f"{model}: gap {gap!r} is not positive")
    return float(gap)
