"""Displacement metrics and best-of-K selection.

ADE is the mean Euclidean displacement over all agents and all predicted
frames; FDE the mean displacement at the final frame only. For a K-sample
prediction the single set index with the smallest overall error is
selected jointly for all agents, and both metrics are reported for that
set. The combined objective is J = 0.6 * minADE + 0.4 * minFDE.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from ..errors import ContractViolation, DataValidationError
from .trajectory import EvalMetrics, PredictionSet, TrajTensor

W_ADE = 0.6
W_FDE = 0.4


class SelectionRule(str, Enum):
    """How the joint best set index is scored.

    ADE: argmin of the per-set mean ADE (default reading).
    WEIGHTED: argmin of 0.6 * ADE_k + 0.4 * FDE_k.
    """

    ADE = "ade"
    WEIGHTED = "weighted"


def combined_objective(min_ade: float, min_fde: float) -> float:
    return W_ADE * min_ade + W_FDE * min_fde


def _check_pair(pred: TrajTensor, gt: TrajTensor):
    if pred.data.shape != gt.data.shape:
        raise ContractViolation(
            f"prediction shape {pred.data.shape} != ground truth {gt.data.shape}"
        )
    if pred.unit != gt.unit:
        raise ContractViolation(f"unit mismatch: {pred.unit} vs {gt.unit}")


def ade(pred: TrajTensor, gt: TrajTensor) -> float:
    """Mean displacement over all agents and frames."""
    _check_pair(pred, gt)
    return float(np.linalg.norm(pred.data - gt.data, axis=-1).mean())


def fde(pred: TrajTensor, gt: TrajTensor) -> float:
    """Mean displacement over agents at the final frame."""
    _check_pair(pred, gt)
    return float(np.linalg.norm(pred.data[:, -1] - gt.data[:, -1], axis=-1).mean())


def evaluate_min_of_k(
    preds: PredictionSet,
    gt: TrajTensor,
    selection_rule: SelectionRule = SelectionRule.ADE,
) -> EvalMetrics:
    """Select the jointly best of the K sets and report its metrics.

    Ties are broken toward the lowest index. ``per_agent_best_index``
    holds, independently of the joint choice, the index minimizing each
    agent's own ADE.
    """
    if preds.num_agents != gt.num_agents or preds.t_pred != gt.num_frames:
        raise ContractViolation(
            f"prediction set [{preds.k} x {preds.num_agents} x {preds.t_pred}] does "
            f"not match ground truth [{gt.num_agents} x {gt.num_frames}]"
        )

    # [K, A, T] displacement per agent and frame
    disp = np.linalg.norm(preds.data - gt.data[np.newaxis], axis=-1)
    ade_per_agent = disp.mean(axis=2)          # [K, A]
    ade_per_set = ade_per_agent.mean(axis=1)   # [K]
    fde_per_set = disp[:, :, -1].mean(axis=1)  # [K]

    if selection_rule == SelectionRule.WEIGHTED:
        scores = W_ADE * ade_per_set + W_FDE * fde_per_set
    else:
        scores = ade_per_set
    best_k = int(np.argmin(scores))  # argmin returns the first (lowest) index

    min_ade = float(ade_per_set[best_k])
    min_fde = float(fde_per_set[best_k])
    return EvalMetrics(
        min_ade=min_ade,
        min_fde=min_fde,
        best_k=best_k,
        objective_j=combined_objective(min_ade, min_fde),
        per_agent_best_index=[int(i) for i in np.argmin(ade_per_agent, axis=0)],
    )


def best_index_histogram(results: list[EvalMetrics], k: int) -> dict[int, int]:
    """Count per-agent lowest-ADE indices over many evaluated instances.

    Every index 0..K-1 is present in the result, zero-filled.
    """
    counts = dict.fromkeys(range(k), 0)
    for res in results:
        for idx in res.per_agent_best_index:
            if not 0 <= idx < k:
                raise DataValidationError(
                    f"best index {idx} out of range for K={k}"
                )
            counts[idx] += 1
    return counts
