"""Predictor implementations and the registry they live in."""

from .registry import (
    PredictorSpec,
    RegisteredPredictor,
    as_rng,
    get_heuristic,
    register,
    registered_names,
)
from .classical import (
    ANGLE_SIGMA_DEFAULT,
    OMEGA_EPS,
    constant_acc,
    ctrv,
    cvm,
    cvm_s,
    linreg,
    social_force,
)
from .evolved import trajevo_zara1

__all__ = [
    "ANGLE_SIGMA_DEFAULT",
    "OMEGA_EPS",
    "PredictorSpec",
    "RegisteredPredictor",
    "as_rng",
    "constant_acc",
    "ctrv",
    "cvm",
    "cvm_s",
    "get_heuristic",
    "linreg",
    "register",
    "registered_names",
    "social_force",
    "trajevo_zara1",
]
