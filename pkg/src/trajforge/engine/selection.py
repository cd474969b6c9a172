"""Parent selection and cross-generation elite sampling."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ContractViolation, SamplingError, SelectionError
from .candidate import Candidate, EliteArchive, Status

UNIFORM_SHARE = 0.7


def _ok_only(candidates) -> list:
    return [c for c in candidates if c.status == Status.OK]


def _rank_key(candidate: Candidate):
    return (candidate.objective_j, candidate.id)


def elite_pool(candidates, elite_ratio: float) -> list:
    """Lowest-J ceil(elite_ratio * n) successful candidates, ties by id."""
    ok = sorted(_ok_only(candidates), key=_rank_key)
    if not ok:
        return []
    take = math.ceil(elite_ratio * len(ok))
    return ok[:take]


def draw_parent(candidates, elite_ratio: float, rng) -> tuple:
    """One parent draw; returns (candidate, pool) with pool uniform|elite."""
    ok = _ok_only(candidates)
    if not ok:
        raise SelectionError("no successful candidates to draw from")
    if rng.random() < UNIFORM_SHARE:
        return ok[int(rng.integers(len(ok)))], "uniform"
    pool = elite_pool(ok, elite_ratio)
    return pool[int(rng.integers(len(pool)))], "elite"


def select_parents(candidates, elite_ratio: float, rng, max_retries: int = 16) -> tuple:
    """A (worse, better) pair of distinct successful candidates.

    Identical draws are rejected and redrawn; after max_retries the
    second parent falls back to the best-ranked candidate that differs
    from the first, keeping the procedure total.
    """
    ok = _ok_only(candidates)
    if len(ok) < 2:
        raise SelectionError(
            f"parent selection needs >= 2 successful candidates, have {len(ok)}"
        )
    first, _ = draw_parent(ok, elite_ratio, rng)
    second = None
    for _ in range(max_retries):
        drawn, _ = draw_parent(ok, elite_ratio, rng)
        if drawn.id != first.id:
            second = drawn
            break
    if second is None:
        second = next(c for c in sorted(ok, key=_rank_key) if c.id != first.id)
    worse, better = sorted((first, second), key=_rank_key, reverse=True)
    return worse, better


def cges_probabilities(objectives, temperature: float) -> np.ndarray:
    """Softmax over negated objectives, max-subtracted for stability."""
    if temperature <= 0:
        raise ContractViolation(f"temperature must be positive, got {temperature}")
    objectives = np.asarray(objectives, dtype=float)
    if objectives.size == 0:
        raise SamplingError("cannot form a distribution over zero entries")
    logits = -objectives / temperature
    logits = logits - logits.max()
    weights = np.exp(logits)
    return weights / weights.sum()


def cges_sample(archive: EliteArchive, temperature: float, rng, size=None):
    """Sample archive entries proportional to exp(-J/T); lower J wins more.

    Returns a candidate id, or a list of ids when size is given.
    """
    entries = archive.entries
    if not entries:
        raise SamplingError("elite archive is empty")
    probs = cges_probabilities([e.objective_j for e in entries], temperature)
    if size is None:
        return entries[int(rng.choice(len(entries), p=probs))].candidate_id
    picks = rng.choice(len(entries), p=probs, size=size)
    return [entries[int(i)].candidate_id for i in picks]
