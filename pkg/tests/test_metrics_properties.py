"""Property tests for the metric layer."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from trajforge.core import (
    SelectionRule,
    ade,
    combined_objective,
    evaluate_min_of_k,
    fde,
)

from conftest import make_preds, make_traj

finite = st.floats(-100.0, 100.0, allow_nan=False, width=32)


def pred_and_gt(k_max=6, a_max=4, t_max=5):
    return st.tuples(
        st.integers(1, k_max), st.integers(1, a_max), st.integers(2, t_max)
    ).flatmap(
        lambda dims: st.tuples(
            arrays(np.float64, (dims[0], dims[1], dims[2], 2), elements=finite),
            arrays(np.float64, (dims[1], dims[2], 2), elements=finite),
        )
    )


@given(pred_and_gt())
@settings(max_examples=60, deadline=None)
def test_joint_min_ade_lower_bounds_every_set(data):
    preds, gt = data
    res = evaluate_min_of_k(make_preds(preds), make_traj(gt), SelectionRule.ADE)
    for k in range(preds.shape[0]):
        assert res.min_ade <= ade(make_traj(preds[k]), make_traj(gt)) + 1e-12


@given(st.floats(0, 50, allow_nan=False), st.floats(0, 50, allow_nan=False))
def test_objective_slopes_are_exact(a, f):
    base = combined_objective(a, f)
    assert combined_objective(a + 1.0, f) - base == pytest.approx(0.6, abs=1e-12)
    assert combined_objective(a, f + 1.0) - base == pytest.approx(0.4, abs=1e-12)


@given(pred_and_gt(), st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_permuting_k_axis_remaps_indices(data, pyrand):
    preds, gt = data
    k = preds.shape[0]
    perm = list(range(k))
    pyrand.shuffle(perm)
    base = evaluate_min_of_k(make_preds(preds), make_traj(gt))
    shuffled = evaluate_min_of_k(make_preds(preds[perm]), make_traj(gt))
    # metrics identical; selected indices map to equally-scored sets
    assert shuffled.min_ade == pytest.approx(base.min_ade, rel=1e-12, abs=1e-12)
    assert shuffled.min_fde == pytest.approx(base.min_fde, rel=1e-12, abs=1e-12)
    for agent, idx in enumerate(shuffled.per_agent_best_index):
        orig = base.per_agent_best_index[agent]
        assert float(
            np.linalg.norm(preds[perm[idx]][agent] - gt[agent], axis=-1).mean()
        ) == pytest.approx(
            float(np.linalg.norm(preds[orig][agent] - gt[agent], axis=-1).mean()),
            rel=1e-12,
            abs=1e-12,
        )


@given(pred_and_gt(), arrays(np.float64, (2,), elements=st.floats(-1000, 1000)))
@settings(max_examples=60, deadline=None)
def test_translation_invariance(data, shift):
    preds, gt = data
    a0 = ade(make_traj(gt + shift), make_traj(preds[0] + shift))
    f0 = fde(make_traj(gt + shift), make_traj(preds[0] + shift))
    assert abs(a0 - ade(make_traj(gt), make_traj(preds[0]))) < 1e-9
    assert abs(f0 - fde(make_traj(gt), make_traj(preds[0]))) < 1e-9
