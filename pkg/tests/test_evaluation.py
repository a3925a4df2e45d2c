import math

import numpy as np
import pandas as pd
import pytest
from conftest import point_task
from hypothesis import given, settings
from hypothesis import strategies as st

from spatiocv.evaluation import (
    FeaturelessLearner,
    KNNLearner,
    LeakageError,
    LearnerError,
    LogisticLearner,
    PlanMismatch,
    UndefinedMeasure,
    auroc,
    misclassification,
    nested_resample,
    predict,
    resample,
    rmse,
    train,
)
from spatiocv.evaluation.resample import _fit_and_score
from spatiocv.evaluation.measures import get_measure
from spatiocv.partitioners import PartitionError, custom_cv, make_plan, random_cv, repeat_plan
from spatiocv.synthgen import make_classification_task, sample_grf
from spatiocv.task import build_task


def brute_auroc(scores, labels):
    pos = [s for s, l in zip(scores, labels) if l]
    neg = [s for s, l in zip(scores, labels) if not l]
    total = 0.0
    for p in pos:
        for q in neg:
            total += 1.0 if p > q else 0.5 if p == q else 0.0
    return total / (len(pos) * len(neg))


class TestAuroc:
    def test_examples(self):
        assert auroc([0.8, 0.3, 0.5, 0.1], [1, 1, 0, 0]) == 0.75
        assert auroc([0.9, 0.8, 0.2], [1, 1, 0]) == 1.0
        assert auroc([0.4] * 5, [1, 0, 1, 0, 0]) == 0.5

    def test_single_class(self):
        with pytest.raises(UndefinedMeasure):
            auroc([0.1, 0.2], [1, 1])

    @settings(max_examples=200, deadline=None)
    @given(
        data=st.lists(st.tuples(st.integers(0, 6).map(lambda v: v / 6), st.booleans()), min_size=2, max_size=30)
    )
    def test_matches_pair_counting(self, data):
        scores, labels = zip(*data)
        if len(set(labels)) < 2:
            return
        assert abs(auroc(scores, labels) - brute_auroc(scores, labels)) <= 1e-12
        assert auroc(np.exp(3 * np.array(scores)) - 7, labels) == auroc(scores, labels)


def test_misclassification_and_rmse():
    assert misclassification(["a", "b", "a", "a"], ["a", "a", "a", "b"]) == 0.5
    assert rmse([1.0, 2.0], [1.0, 4.0]) == pytest.approx(math.sqrt(2))


class TestLearners:
    def test_knn_resubstitution(self):
        rng = np.random.default_rng(0)
        task = point_task(rng.uniform(size=(30, 2)), labels=rng.choice(["0", "1"], 30))
        model = train(KNNLearner(1), task, np.arange(30))
        pred = predict(model, task, np.arange(30), "response")
        assert misclassification(task.response, pred) == 0.0

    def test_knn_exact_match_probability(self):
        task = point_task([(0, 0), (1, 0), (2, 0)], labels=["1", "0", "1"], positive="1")
        model = train(KNNLearner(1), task, [0, 1])
        assert predict(model, task, [1], "probability").tolist() == [0.0]
        assert predict(model, task, [0], "probability").tolist() == [1.0]

    def test_knn_vote_fraction(self):
        task = build_task(
            pd.DataFrame({"r": ["+", "+", "-", "-", "?"], "x": [0, 0, 0, 0, 0], "y": [0] * 5, "f": [1.0, 1.1, 1.2, 5.0, 1.05]}),
            {"response": "r", "positive": "+"},
        )
        model = train(KNNLearner(3), task, [0, 1, 2, 3])
        assert predict(model, task, [4], "probability")[0] == pytest.approx(2 / 3)

    def test_knn_too_few_rows(self):
        task = point_task([(0, 0), (1, 0), (2, 0)])
        with pytest.raises(LearnerError):
            train(KNNLearner(5), task, [0, 1])

    def test_logistic_separable(self):
        rng = np.random.default_rng(1)
        f = np.concatenate([rng.uniform(-3, -0.5, 20), rng.uniform(0.5, 3, 20)])
        lab = ["0"] * 20 + ["1"] * 20
        task = build_task(pd.DataFrame({"r": lab, "x": f, "y": f, "f": f}), {"response": "r", "positive": "1"})
        model = train(LogisticLearner(epochs=200), task, np.arange(40))
        pred = predict(model, task, np.arange(40), "response")
        assert misclassification(task.response, pred) == 0.0
        prob = predict(model, task, np.arange(40), "probability")
        assert np.all((prob >= 0) & (prob <= 1))

    def test_logistic_single_class(self):
        task = point_task([(0, 0), (1, 0), (2, 0)], labels=["1", "1", "0"])
        with pytest.raises(LearnerError):
            train(LogisticLearner(), task, [0, 1])

    def test_empty_train_and_predict(self):
        task = point_task([(0, 0), (1, 0), (2, 0)])
        with pytest.raises(LearnerError, match="empty"):
            train(KNNLearner(1), task, [])
        model = train(KNNLearner(1), task, [0, 1])
        assert len(predict(model, task, [])) == 0

    def test_feature_count_mismatch(self):
        task = point_task([(0, 0), (1, 0), (2, 0)])
        model = train(KNNLearner(1), task, [0, 1])
        with pytest.raises(LearnerError, match="feature-count mismatch"):
            model.predict(np.zeros((2, 3)))


def _majority_task():
    # every custom fold holds four "a" and one "b"
    labels = (["a"] * 4 + ["b"]) * 4
    rng = np.random.default_rng(2)
    return point_task(rng.uniform(size=(20, 2)), labels=labels, extra={"zone": np.repeat(list("wxyz"), 5)})


class TestResample:
    def test_constant_predictor_minority_rate(self):
        task = _majority_task()
        plan = custom_cv(task, col="zone")
        res = resample(task, FeaturelessLearner(), plan, "misclassification")
        assert [f.value for f in res.per_fold] == [0.2] * 4
        assert res.aggregate == pytest.approx(0.2, abs=1e-12)

    def test_per_fold_length_and_mean(self, small_task):
        plan = repeat_plan(small_task, "cv", {"folds": 4}, repeats=3, seed=2)
        res = resample(small_task, KNNLearner(3), plan, "misclassification")
        assert len(res.per_fold) == 12
        assert abs(res.aggregate - np.mean(res.values)) < 1e-12

    def test_deterministic(self, small_task):
        plan = make_plan(small_task, "spcv_coords", {"folds": 4}, seed=5)
        a = resample(small_task, KNNLearner(1), plan)
        b = resample(small_task, KNNLearner(1), plan)
        assert a.to_json() == b.to_json()

    def test_undefined_folds_are_skipped(self):
        labels = ["1", "1", "0", "0", "1", "0"]
        task = point_task([(i, 0) for i in range(6)], labels=labels, positive="1")
        plan = custom_cv(task, factor=["a", "a", "b", "b", "c", "c"])
        res = resample(task, KNNLearner(1), plan, "auroc")
        assert math.isnan(res.per_fold[0].value) and math.isnan(res.per_fold[1].value)
        assert len(res.warnings) == 2
        assert res.aggregate == res.per_fold[2].value
        assert res.to_dict()["per_fold"][0]["value"] is None

    def test_mismatch(self, small_task):
        plan = random_cv(small_task, folds=3)
        with pytest.raises(PlanMismatch, match="plan/task mismatch"):
            resample(small_task.subset(np.arange(30)), KNNLearner(1), plan)

    def test_leakage_check(self, small_task):
        with pytest.raises(LeakageError):
            _fit_and_score(small_task, KNNLearner(1), np.arange(10), np.arange(5, 15), get_measure("auroc"))

    def test_result_json_schema(self, small_task):
        res = resample(small_task, KNNLearner(1), random_cv(small_task, 3, seed=1))
        d = res.to_dict()
        assert set(d) == {"measure", "aggregate", "warnings", "per_fold"}
        assert set(d["per_fold"][0]) == {"repeat", "fold", "value", "n_test"}


class TestNested:
    def test_grid_of_one_equals_resample(self, small_task):
        outer = random_cv(small_task, folds=3, seed=4)
        nested = nested_resample(small_task, KNNLearner(), [{"k_neighbors": 5}], "cv", {"folds": 3}, outer)
        plain = resample(small_task, KNNLearner(5), outer)
        assert nested.result.to_dict() == plain.to_dict()
        assert nested.chosen == ({"k_neighbors": 5},) * 3

    def test_smooth_task_prefers_more_neighbors(self):
        wins = 0
        for seed in range(10):
            task = make_classification_task(sample_grf(300, rho=0.1, seed=seed), 2, seed=seed)
            outer = make_plan(task, "spcv_coords", {"folds": 4}, seed=seed)
            res = nested_resample(
                task, KNNLearner(), [{"k_neighbors": 1}, {"k_neighbors": 15}], "spcv_coords", {"folds": 4}, outer,
                seed=seed,
            )
            picks = [c["k_neighbors"] for c in res.chosen]
            wins += picks.count(15) > len(picks) / 2
        assert wins >= 8

    def test_inner_needs_enough_locations(self):
        rows = [{"v": float(i), "x": float(i % 3), "y": 0.0, "site": f"L{i % 3}"} for i in range(12)]
        task = build_task(pd.DataFrame(rows), {"response": "v", "location": "site"})
        outer = make_plan(task, "sptcv_cstf", {"folds": 3, "space_var": "site"})
        with pytest.raises(PartitionError):
            nested_resample(task, KNNLearner(), [{"k_neighbors": 1}], "sptcv_cstf", {"folds": 3, "space_var": "site"},
                            outer, measure="rmse")

    def test_empty_grid(self, small_task):
        with pytest.raises(ValueError):
            nested_resample(small_task, KNNLearner(), [], "cv", {}, random_cv(small_task, 3))
