"""Trajectory tensors and evaluation records.

Positions are dense float arrays of shape [num_agents, num_frames, 2].
Coordinates are meters for ETH-UCY data and pixels for SDD; the unit is
carried as a tag and never converted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..errors import ContractViolation, DataValidationError


class Unit(str, Enum):
    METERS = "meters"
    PIXELS = "pixels"


def _as_position_array(data, ndim, what):
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != ndim or arr.shape[-1] != 2:
        raise ContractViolation(
            f"{what} must have shape [{'K x ' if ndim == 4 else ''}num_agents x "
            f"num_frames x 2], got {arr.shape}"
        )
    if not np.isfinite(arr).all():
        raise DataValidationError(f"{what} contains non-finite positions")
    return arr


@dataclass(frozen=True)
class TrajTensor:
    """Positions for a group of agents over consecutive frames."""

    data: np.ndarray
    unit: Unit = Unit.METERS

    def __post_init__(self):
        object.__setattr__(
            self, "data", _as_position_array(self.data, 3, "trajectory tensor")
        )

    @property
    def num_agents(self) -> int:
        return self.data.shape[0]

    @property
    def num_frames(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class Scene:
    """One prediction instance: observed histories plus ground-truth futures."""

    history: TrajTensor
    future: TrajTensor
    scene_id: str = ""

    def __post_init__(self):
        if self.history.num_agents != self.future.num_agents:
            raise ContractViolation(
                f"scene {self.scene_id!r}: history has {self.history.num_agents} "
                f"agents but future has {self.future.num_agents}"
            )
        if self.history.unit != self.future.unit:
            raise ContractViolation(
                f"scene {self.scene_id!r}: history/future unit mismatch"
            )

    @property
    def num_agents(self) -> int:
        return self.history.num_agents

    @property
    def unit(self) -> Unit:
        return self.history.unit


@dataclass(frozen=True)
class PredictionSet:
    """K candidate futures, shape [K x num_agents x T_pred x 2]."""

    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "data", _as_position_array(self.data, 4, "prediction set")
        )
        if self.k == 0:
            raise DataValidationError("prediction set must contain at least one set")

    @property
    def k(self) -> int:
        return self.data.shape[0]

    @property
    def num_agents(self) -> int:
        return self.data.shape[1]

    @property
    def t_pred(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class EvalMetrics:
    """Best-of-K evaluation result for one scene.

    ``best_k`` is the jointly selected set index, ``per_agent_best_index``
    the per-agent argmin-ADE indices used by the statistics feedback.
    ``objective_j`` is always 0.6 * min_ade + 0.4 * min_fde.
    """

    min_ade: float
    min_fde: float
    best_k: int
    objective_j: float
    per_agent_best_index: list[int] = field(default_factory=list)

    def __post_init__(self):
        if self.min_ade < 0 or self.min_fde < 0:
            raise ContractViolation("displacement errors must be nonnegative")
        expected = 0.6 * self.min_ade + 0.4 * self.min_fde
        scale = max(abs(expected), 1.0)
        if abs(self.objective_j - expected) > 1e-12 * scale:
            raise ContractViolation(
                f"objective_j={self.objective_j!r} is not 0.6*min_ade + 0.4*min_fde"
            )
