import numpy as np
import pytest

from trajforge.core import (
    EvalMetrics,
    PredictionSet,
    SelectionRule,
    TrajTensor,
    Unit,
    ade,
    best_index_histogram,
    evaluate_min_of_k,
    fde,
)
from trajforge.errors import ContractViolation, DataValidationError

from conftest import make_preds, make_traj
from oracles import ade_loop, fde_loop, min_of_k_loop


class TestAde:
    def test_identity_is_zero(self, rng):
        gt = make_traj(rng.normal(size=(3, 5, 2)))
        assert ade(gt, gt) == 0.0

    def test_uniform_unit_offset(self):
        gt = make_traj(np.zeros((2, 4, 2)))
        pred = make_traj(np.broadcast_to([1.0, 0.0], (2, 4, 2)))
        assert ade(pred, gt) == pytest.approx(1.0, abs=0)

    def test_matches_summation_oracle(self, rng):
        pred = rng.normal(size=(2, 3, 2))
        gt = rng.normal(size=(2, 3, 2))
        expected = ade_loop(pred.tolist(), gt.tolist())
        assert ade(make_traj(pred), make_traj(gt)) == pytest.approx(expected, rel=1e-12)

    def test_shape_mismatch_rejected(self, rng):
        with pytest.raises(ContractViolation):
            ade(make_traj(rng.normal(size=(2, 3, 2))), make_traj(rng.normal(size=(2, 4, 2))))

    def test_unit_mismatch_rejected(self, rng):
        a = make_traj(rng.normal(size=(1, 3, 2)), Unit.METERS)
        b = make_traj(rng.normal(size=(1, 3, 2)), Unit.PIXELS)
        with pytest.raises(ContractViolation):
            ade(a, b)

    def test_non_finite_rejected(self):
        with pytest.raises(DataValidationError):
            make_traj([[[np.nan, 0.0], [0.0, 0.0]]])


class TestFde:
    def test_identity_is_zero(self, rng):
        gt = make_traj(rng.normal(size=(4, 6, 2)))
        assert fde(gt, gt) == 0.0

    def test_three_four_five_final_offset(self):
        gt = np.zeros((1, 5, 2))
        pred = gt.copy()
        pred[0, -1] = [3.0, 4.0]
        assert fde(make_traj(pred), make_traj(gt)) == pytest.approx(5.0, abs=0)
        # earlier frames do not contribute
        pred[0, 0] = [100.0, 100.0]
        assert fde(make_traj(pred), make_traj(gt)) == pytest.approx(5.0, abs=0)

    def test_matches_final_frame_oracle(self, rng):
        pred = rng.normal(size=(3, 4, 2))
        gt = rng.normal(size=(3, 4, 2))
        expected = fde_loop(pred.tolist(), gt.tolist())
        assert fde(make_traj(pred), make_traj(gt)) == pytest.approx(expected, rel=1e-12)


class TestEvaluateMinOfK:
    def test_degenerate_k1(self, rng):
        gt = rng.normal(size=(2, 4, 2))
        pred = rng.normal(size=(1, 2, 4, 2))
        res = evaluate_min_of_k(make_preds(pred), make_traj(gt))
        assert res.best_k == 0
        assert res.min_ade == pytest.approx(ade(make_traj(pred[0]), make_traj(gt)))
        assert res.min_fde == pytest.approx(fde(make_traj(pred[0]), make_traj(gt)))

    def test_exact_match_set_selected(self, rng):
        gt = rng.normal(size=(3, 4, 2))
        preds = rng.normal(size=(3, 3, 4, 2))
        preds[2] = gt
        res = evaluate_min_of_k(make_preds(preds), make_traj(gt))
        assert res.best_k == 2
        assert res.min_ade == 0.0
        assert res.min_fde == 0.0
        assert res.objective_j == 0.0
        assert res.per_agent_best_index == [2, 2, 2]

    @pytest.mark.parametrize("rule", [SelectionRule.ADE, SelectionRule.WEIGHTED])
    def test_matches_enumeration_oracle(self, rng, rule):
        preds = rng.normal(size=(5, 3, 4, 2))
        gt = rng.normal(size=(3, 4, 2))
        best_k, min_ade, min_fde, per_agent = min_of_k_loop(
            preds.tolist(), gt.tolist(), weighted=rule == SelectionRule.WEIGHTED
        )
        res = evaluate_min_of_k(make_preds(preds), make_traj(gt), rule)
        assert res.best_k == best_k
        assert res.min_ade == pytest.approx(min_ade, rel=1e-12)
        assert res.min_fde == pytest.approx(min_fde, rel=1e-12)
        assert res.per_agent_best_index == per_agent

    def test_tie_broken_to_lowest_index(self):
        gt = np.zeros((1, 2, 2))
        pred = np.ones((4, 1, 2, 2))  # all sets identical
        res = evaluate_min_of_k(make_preds(pred), make_traj(gt))
        assert res.best_k == 0
        assert res.per_agent_best_index == [0]

    def test_empty_k_rejected(self):
        with pytest.raises(DataValidationError):
            PredictionSet(np.zeros((0, 1, 2, 2)))

    def test_agent_count_mismatch_rejected(self, rng):
        preds = make_preds(rng.normal(size=(2, 3, 4, 2)))
        gt = make_traj(rng.normal(size=(2, 4, 2)))
        with pytest.raises(ContractViolation):
            evaluate_min_of_k(preds, gt)


class TestEvalMetricsInvariants:
    def test_objective_weighting_enforced(self):
        with pytest.raises(ContractViolation):
            EvalMetrics(min_ade=1.0, min_fde=1.0, best_k=0, objective_j=0.5)

    def test_negative_error_rejected(self):
        with pytest.raises(ContractViolation):
            EvalMetrics(min_ade=-1.0, min_fde=0.0, best_k=0, objective_j=-0.6)


class TestBestIndexHistogram:
    def test_single_instance(self):
        res = EvalMetrics(0.0, 0.0, 0, 0.0, per_agent_best_index=[0, 0])
        assert best_index_histogram([res], 3) == {0: 2, 1: 0, 2: 0}

    def test_counts_total_equals_agents(self, rng):
        results = []
        total_agents = 0
        for _ in range(100):
            n = int(rng.integers(1, 6))
            total_agents += n
            idx = [int(i) for i in rng.integers(0, 20, size=n)]
            results.append(EvalMetrics(0.0, 0.0, 0, 0.0, per_agent_best_index=idx))
        hist = best_index_histogram(results, 20)
        assert sorted(hist) == list(range(20))
        assert sum(hist.values()) == total_agents

    def test_out_of_range_rejected(self):
        res = EvalMetrics(0.0, 0.0, 0, 0.0, per_agent_best_index=[5])
        with pytest.raises(DataValidationError):
            best_index_histogram([res], 3)
