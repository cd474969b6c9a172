from .trajectory import Unit, TrajTensor, Scene, PredictionSet, EvalMetrics
from .metrics import (
    SelectionRule,
    W_ADE,
    W_FDE,
    ade,
    fde,
    evaluate_min_of_k,
    best_index_histogram,
    combined_objective,
)

__all__ = [
    "Unit",
    "TrajTensor",
    "Scene",
    "PredictionSet",
    "EvalMetrics",
    "SelectionRule",
    "W_ADE",
    "W_FDE",
    "ade",
    "fde",
    "evaluate_min_of_k",
    "best_index_histogram",
    "combined_objective",
]
