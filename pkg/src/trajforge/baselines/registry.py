"""Name-addressable predictor registry.

Every predictor shares one calling convention:

    fn(history, k, t_pred, rng, **params) -> PredictionSet

where history is [num_agents, t_obs, 2] and rng is a numpy Generator.
Deterministic predictors accept rng but never draw from it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import PredictionSet, TrajTensor
from ..errors import ContractViolation, DataValidationError, UnknownHeuristicError


@dataclass(frozen=True)
class PredictorSpec:
    name: str
    params: dict = field(default_factory=dict)
    deterministic: bool = False


@dataclass(frozen=True)
class RegisteredPredictor:
    spec: PredictorSpec
    fn: object

    def __call__(self, history, k, t_pred, seed=None, **overrides) -> PredictionSet:
        params = dict(self.spec.params)
        for key, value in overrides.items():
            if key not in params:
                raise ContractViolation(
                    f"predictor {self.spec.name!r} has no parameter {key!r}"
                )
            params[key] = value
        return self.fn(history, k, t_pred, as_rng(seed), **params)


_REGISTRY: dict[str, RegisteredPredictor] = {}


def register(spec: PredictorSpec, fn) -> None:
    if spec.name in _REGISTRY:
        raise ContractViolation(f"predictor name {spec.name!r} already registered")
    _REGISTRY[spec.name] = RegisteredPredictor(spec=spec, fn=fn)


def get_heuristic(name: str) -> RegisteredPredictor:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownHeuristicError(name, registered_names()) from None


def registered_names() -> list[str]:
    return sorted(_REGISTRY)


def as_rng(seed) -> np.random.Generator:
    """Normalize a seed into a Generator; Generator-like objects pass through."""
    if hasattr(seed, "normal") and hasattr(seed, "uniform"):
        return seed
    return np.random.default_rng(seed)


def history_array(history) -> np.ndarray:
    """Accept a TrajTensor or bare [A, T, 2] array; validate shape and finiteness."""
    if isinstance(history, TrajTensor):
        return history.data
    arr = np.asarray(history, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise DataValidationError(
            f"history must have shape [agents, frames, 2], got {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise DataValidationError("history contains non-finite values")
    return arr


def require_frames(history: np.ndarray, minimum: int, who: str) -> None:
    if history.shape[1] < minimum:
        raise DataValidationError(
            f"{who} needs at least {minimum} history frames, got {history.shape[1]}"
        )
