import json

import numpy as np
import pytest

from spatiocv.partitioners import make_plan
from spatiocv.plan import BlockSet, Fold, ResamplingPlan, validate_plan


def _plan(folds, method="cv"):
    return ResamplingPlan(method, {}, 0, 1, len(folds), tuple(folds))


def test_valid_hand_plan():
    plan = _plan([Fold.from_indices(1, [0, 1], [2, 3]), Fold.from_indices(2, [2, 3], [0, 1])])
    report = validate_plan(plan, 4)
    assert report.passed and report.violations == []


def test_overlap_between_test_and_train_is_reported():
    plan = _plan([Fold.from_indices(1, [0, 1], [1, 2, 3]), Fold.from_indices(2, [2, 3], [0, 1])])
    report = validate_plan(plan, 4)
    assert not report.passed
    assert any("test and train" in v for v in report.violations)


def test_index_out_of_range():
    plan = _plan([Fold.from_indices(1, [0, 4], [1, 2, 3]), Fold.from_indices(2, [1, 2, 3], [0])])
    report = validate_plan(plan, 4)
    assert not report.passed
    assert any("index out of range" in v for v in report.violations)


def test_unsorted_deserialized_fold_is_reported():
    raw = {"method": "cv", "folds": [{"id": 1, "test": [2, 1], "train": [3]}, {"id": 2, "test": [3], "train": [1, 2]}]}
    report = validate_plan(ResamplingPlan.from_dict(raw), 3)
    assert any("sorted" in v for v in report.violations)


def test_empty_sets_and_missing_coverage():
    plan = _plan([Fold.from_indices(1, [], [0, 1]), Fold.from_indices(2, [0], [])])
    report = validate_plan(plan, 3)
    text = " ".join(report.violations)
    assert "empty test" in text and "empty train" in text and "cover" in text


def test_overlapping_tests_allowed_only_for_disc():
    folds = [Fold.from_indices(1, [0, 1], [2, 3]), Fold.from_indices(2, [1, 2], [0, 3])]
    assert not validate_plan(_plan(folds), 4).passed
    assert validate_plan(_plan(folds, "spcv_disc"), 4).passed


def test_fold_sets_are_sorted_and_unique():
    f = Fold.from_indices(1, [3, 1, 3], [0, 2])
    np.testing.assert_array_equal(f.test, [1, 3])
    assert not f.test.flags.writeable


def test_json_round_trip_is_one_based(small_task):
    plan = make_plan(small_task, "spcv_coords", {"folds": 3}, seed=7)
    d = json.loads(plan.to_json())
    assert set(d) == {"method", "params", "seed", "repeats", "k_per_repeat", "folds"}
    all_test = sorted(i for f in d["folds"] for i in f["test"])
    assert all_test == list(range(1, small_task.n + 1))
    back = ResamplingPlan.from_json(plan.to_json())
    assert back.to_json() == plan.to_json()


def test_blockset_labels_must_be_contiguous():
    BlockSet(np.array([1, 2, 2, 1]), 2, "custom")
    with pytest.raises(ValueError):
        BlockSet(np.array([1, 3, 3]), 3, "custom")
    with pytest.raises(ValueError):
        BlockSet(np.array([1, 1]), 1, "magic")
