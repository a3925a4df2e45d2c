"""Leave-one-cluster-out CV: k-means on coordinates or on standardized features."""

from __future__ import annotations

from typing import Any, Sequence

import numpy as np

from ..clustering import kmeans, standardize
from ..plan import BlockSet
from ..task import Task
from ._base import PartitionError, assemble, folds_from_labels, make_rng


def _cluster_folds(points: np.ndarray, k: int, rng, repeat: int, what: str):
    n_distinct = len(np.unique(points, axis=0))
    if k > n_distinct:
        raise PartitionError(f"folds={k} exceeds the number of distinct {what} ({n_distinct})")
    res = kmeans(points, k, seed=int(rng.integers(2**63)))
    labels = res.assignment - 1
    return folds_from_labels(labels, k, repeat), BlockSet(res.assignment, k, "clustered")


def _coords_folds(task: Task, params: dict[str, Any], rng, repeat: int):
    return _cluster_folds(task.coords, params["folds"], rng, repeat, "locations")


def _env_folds(task: Task, params: dict[str, Any], rng, repeat: int):
    names = list(params["features"])
    if not names:
        raise PartitionError("spcv_env needs at least one feature")
    cols = []
    for name in names:
        if name in task.feature_names:
            cols.append(task.feature(name))
            continue
        if name not in task.data.columns:
            raise PartitionError(f"unknown feature {name!r}")
        try:
            cols.append(np.asarray(task.data[name], dtype=float))
        except (TypeError, ValueError):
            raise PartitionError(f"feature {name!r} is not numeric") from None
    try:
        z, _, _ = standardize(np.column_stack(cols), names)
    except ValueError as e:
        raise PartitionError(str(e)) from None
    return _cluster_folds(z, params["folds"], rng, repeat, "feature vectors")


def spcv_coords(task: Task, folds: int = 5, seed: int = 0):
    """Each k-means cluster of the coordinates is one test fold."""
    params = {"folds": int(folds)}
    f, blocks = _coords_folds(task, params, make_rng(seed), 1)
    return assemble("spcv_coords", params, seed, [f], blocks)


def spcv_env(task: Task, features: Sequence[str], folds: int = 5, seed: int = 0):
    """Environmental blocking: k-means on the standardized named features."""
    if isinstance(features, str):
        features = [features]
    params = {"features": list(features), "folds": int(folds)}
    f, blocks = _env_folds(task, params, make_rng(seed), 1)
    return assemble("spcv_env", params, seed, [f], blocks)
