"""Reference gates on the bundled model Hamiltonians.

Each entry pairs a path factory (duration -> path) with the initial level it
acts on and the kind of geometric gate it realises.  The parameter choices
keep every gap at order one so that ``hbar / (gap T)`` is set by ``T`` alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .hampath import (
    HamiltonianPath,
    IonTwoBitParams,
    JosephsonParams,
    NMRSingleParams,
    NMRTwoQubitParams,
    Schedule,
    TripodParams,
    ion_two_bit_path,
    josephson_charge_path,
    nmr_single_path,
    nmr_two_qubit_path,
    tripod_ion_path,
)
from .perturb import AmplitudeVector

DEFAULT_SHAPE = "sinusoidal-ramp"


@dataclass(frozen=True)
class ModelGate:
    """A named gate: ``build(T)`` returns the path, ``level`` the input state."""

    name: str
    kind: str  # "berry" or "wz"
    build: Callable[[float], HamiltonianPath]
    level: tuple

    def path(self, T: float) -> HamiltonianPath:
        return self.build(float(T))

    def initial(self, path: HamiltonianPath) -> AmplitudeVector:
        return AmplitudeVector.level(path.frame(0.0), *self.level)

    def duration_for(self, ratio: float) -> float:
        """Duration at which ``1 / (gap_floor T)`` equals ``ratio``."""
        return 1.0 / (ratio * self.path(1.0).gap_floor)


def _nmr(T, shape=DEFAULT_SHAPE):
    return nmr_single_path(NMRSingleParams.from_cone(1.0, math.pi / 3), Schedule(T, shape))


def _nmr2(T, shape=DEFAULT_SHAPE):
    return nmr_two_qubit_path(NMRTwoQubitParams(0.6, 0.5, 0.0, 0.6), Schedule(T, shape))


def _josephson(T, shape=DEFAULT_SHAPE):
    return josephson_charge_path(JosephsonParams(1.0, 2.0, 0.1), Schedule(T, shape))


def _tripod(T, shape=DEFAULT_SHAPE):
    return tripod_ion_path(TripodParams(theta=math.pi / 4), Schedule(T, shape))


def _ion(T, shape=DEFAULT_SHAPE):
    return ion_two_bit_path(IonTwoBitParams(1.0, 1.2, 0.5, 0.25), Schedule(T, shape))


MODEL_GATES = {
    "nmr_single": ModelGate("nmr_single", "berry", _nmr, (0, 0)),
    "nmr_two_qubit": ModelGate("nmr_two_qubit", "berry", _nmr2, (0, 0)),
    "josephson": ModelGate("josephson", "berry", _josephson, (0, 0)),
    "tripod": ModelGate("tripod", "wz", _tripod, (1, 0)),
    "ion_two_bit": ModelGate("ion_two_bit", "berry", _ion, (1, 0)),
}


def model_gate(name: str) -> ModelGate:
    try:
        return MODEL_GATES[name]
    except KeyError:
        raise KeyError(f"unknown model gate {name!r}; choose from {sorted(MODEL_GATES)}") from None


def window_times(path: HamiltonianPath, points: int = 41) -> np.ndarray:
    """Final-time window spanning one dynamical period ``2 pi / gap_floor``."""
    period = 2.0 * math.pi / path.gap_floor
    start = max(0.0, path.duration - period)
    return np.linspace(start, path.duration, points)
