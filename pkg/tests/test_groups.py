import itertools

import numpy as np
import pandas as pd
import pytest
from conftest import point_task, random_task

from spatiocv.partitioners import (
    PartitionError,
    custom_cv,
    grouped_cv,
    make_plan,
    random_cv,
    repeat_plan,
    sptcv_cstf,
)
from spatiocv.plan import validate_plan
from spatiocv.task import build_task, set_role


@pytest.fixture
def grid_task():
    xy = [(i, j) for i in range(4) for j in range(2)]
    return point_task(xy)


class TestRandomCV:
    def test_sizes(self, grid_task):
        plan = random_cv(grid_task, folds=4, seed=1)
        assert [len(f.test) for f in plan.folds] == [2, 2, 2, 2]
        assert all(len(f.train) == 6 and len(f.omitted) == 0 for f in plan.folds)

    def test_loo(self, grid_task):
        plan = random_cv(grid_task, folds=8, seed=1)
        assert sorted(int(f.test[0]) for f in plan.folds) == list(range(8))
        assert all(len(f.test) == 1 for f in plan.folds)

    def test_seeded(self, grid_task):
        assert random_cv(grid_task, 3, seed=5).to_json() == random_cv(grid_task, 3, seed=5).to_json()
        assert random_cv(grid_task, 3, seed=5).to_json() != random_cv(grid_task, 3, seed=6).to_json()

    def test_too_many_folds(self, grid_task):
        with pytest.raises(PartitionError):
            random_cv(grid_task, folds=9)

    def test_seed_range(self, grid_task):
        random_cv(grid_task, 2, seed=2**64 - 1)
        with pytest.raises(PartitionError):
            random_cv(grid_task, 2, seed=2**64)
        with pytest.raises(PartitionError):
            random_cv(grid_task, 2, seed=-1)


class TestGroupedCV:
    def _task(self, n_groups, n=40, seed=0):
        rng = np.random.default_rng(seed)
        return random_task(rng, n, n_groups=n_groups)

    @pytest.mark.parametrize("seed", range(5))
    def test_eight_groups_three_folds(self, seed):
        task = self._task(8, seed=seed)
        plan = grouped_cv(task, folds=3, seed=seed)
        counts = sorted(len(set(task.group[f.test])) for f in plan.folds)
        assert counts == [2, 3, 3]

    def test_groups_never_split(self):
        task = self._task(7)
        plan = grouped_cv(task, folds=3, seed=4)
        for f in plan.folds:
            assert not set(task.group[f.test]) & set(task.group[f.train])

    def test_cv_dispatches_on_group_role(self):
        task = self._task(6)
        assert make_plan(task, "cv", {"folds": 3}, seed=2).to_json() == grouped_cv(task, 3, seed=2).to_json()

    def test_unique_groups_equal_random_cv(self, grid_task):
        with_group = set_role(
            build_task(grid_task.data.assign(g=[f"g{i}" for i in range(8)]), grid_task.schema), "g", "group"
        )
        for f in grouped_cv(with_group, 4, seed=0).folds:
            assert len(f.test) == 2

    def test_errors(self, grid_task):
        with pytest.raises(PartitionError, match="group"):
            grouped_cv(grid_task, 2)
        with pytest.raises(PartitionError):
            grouped_cv(self._task(3), folds=4)

    def test_set_role_then_grouped(self, grid_task):
        data = grid_task.data.assign(blk=[0, 0, 1, 1, 2, 2, 3, 3])
        task = set_role(build_task(data, {"response": "y_", "features": ["f1", "blk"]}), "blk", "group")
        plan = make_plan(task, "cv", {"folds": 2}, seed=3)
        for f in plan.folds:
            assert not set(task.group[f.test]) & set(task.group[f.train])


class TestCustomCV:
    def test_hand_factor(self):
        task = point_task([(0, 0), (1, 0), (2, 0)])
        plan = custom_cv(task, factor=["a", "b", "a"])
        assert [f.test.tolist() for f in plan.folds] == [[0, 2], [1]]

    def test_quantile_zones(self):
        rng = np.random.default_rng(3)
        dem = rng.normal(2000, 300, 200)
        edges = np.quantile(dem, np.linspace(0, 1, 6))
        zone = np.clip(np.searchsorted(edges, dem, side="right"), 1, 5)
        task = point_task(rng.uniform(size=(200, 2)), extra={"zone": zone.astype(str)})
        assert len(custom_cv(task, col="zone").folds) == 5

    def test_errors(self):
        task = point_task([(0, 0), (1, 0), (2, 0)])
        with pytest.raises(PartitionError):
            custom_cv(task, factor=["a", "a", "a"])
        with pytest.raises(PartitionError):
            custom_cv(task, factor=["a", "b"])

    def test_not_repeatable(self):
        task = point_task([(0, 0), (1, 0), (2, 0)])
        with pytest.raises(PartitionError, match="deterministic method"):
            repeat_plan(task, "custom_cv", {"factor": ["a", "b", "a"]}, repeats=2)


def _st_task(n_loc, n_time, reps=1):
    rows = []
    for loc, t, r in itertools.product(range(n_loc), range(n_time), range(reps)):
        rows.append({"v": float(loc * 10 + t), "x": float(loc), "y": float(t), "site": f"L{loc}", "day": t, "r": float(r)})
    return build_task(pd.DataFrame(rows), {"response": "v", "location": "site", "time": "day"})


class TestCSTF:
    def test_lto(self):
        task = _st_task(4, 5)
        plan = sptcv_cstf(task, folds=5, time_var="day", seed=1)
        for f in plan.folds:
            assert len(set(task.time[f.test])) == 1
            assert len(f.omitted) == 0

    def test_llo(self):
        task = _st_task(5, 3)
        plan = sptcv_cstf(task, folds=5, space_var="site", seed=1)
        for f in plan.folds:
            sites = set(task.location_id[f.test])
            assert len(sites) == 1
            assert len(f.test) == 3

    def test_llto_three_by_three(self):
        task = _st_task(3, 3)
        plan = sptcv_cstf(task, folds=3, space_var="site", time_var="day", seed=0)
        assert len(plan.folds) == 3
        for f in plan.folds:
            assert len(f.test) == 1
            (loc,), (t,) = set(task.location_id[f.test]), set(task.time[f.test])
            expected_train = {
                i for i in range(task.n) if task.location_id[i] != loc and task.time[i] != t
            }
            assert set(f.train.tolist()) == expected_train
            assert len(expected_train) == 4 and len(f.omitted) == 4

    def test_errors(self):
        task = _st_task(3, 3)
        with pytest.raises(PartitionError):
            sptcv_cstf(task, folds=3)
        with pytest.raises(PartitionError):
            sptcv_cstf(task, folds=4, time_var="day")

    def test_valid(self):
        task = _st_task(4, 4, reps=2)
        plan = sptcv_cstf(task, folds=2, space_var="site", time_var="day", seed=9)
        assert validate_plan(plan, task).passed
