"""Partitioners driven by labels: random CV, grouped CV, custom factors and
the leave-location/time-out family."""

from __future__ import annotations

from typing import Any, Optional, Sequence

import numpy as np

from ..plan import BlockSet, Fold
from ..task import Task
from ._base import PartitionError, assemble, deal, folds_from_labels, levels, make_rng


def _random_folds(task: Task, params: dict[str, Any], rng, repeat: int):
    k = params["folds"]
    if k > task.n:
        raise PartitionError(f"folds={k} exceeds the number of observations ({task.n})")
    return folds_from_labels(deal(task.n, k, rng), k, repeat), None


def _grouped_folds(task: Task, params: dict[str, Any], rng, repeat: int):
    if task.group is None:
        raise PartitionError("grouped CV needs a task with a group role")
    k = params["folds"]
    uniq, inverse = levels(task.group)
    if k > len(uniq):
        raise PartitionError(f"folds={k} exceeds the number of groups ({len(uniq)})")
    fold_of_group = deal(len(uniq), k, rng)
    blocks = BlockSet(inverse + 1, len(uniq), "custom")
    return folds_from_labels(fold_of_group[inverse], k, repeat), blocks


def _cv_folds(task: Task, params: dict[str, Any], rng, repeat: int):
    if task.group is not None:
        return _grouped_folds(task, params, rng, repeat)
    return _random_folds(task, params, rng, repeat)


def random_cv(task: Task, folds: int = 5, seed: int = 0):
    """Uniform random k-fold CV. ``folds == task.n`` gives leave-one-out."""
    params = {"folds": int(folds)}
    f, _ = _random_folds(task, params, make_rng(seed), 1)
    return assemble("cv", params, seed, [f])


def grouped_cv(task: Task, folds: int = 5, seed: int = 0):
    """k-fold CV at the group level; a group never straddles folds."""
    params = {"folds": int(folds)}
    f, blocks = _grouped_folds(task, params, make_rng(seed), 1)
    return assemble("cv", params, seed, [f], blocks)


def _factor(task: Task, params: dict[str, Any]) -> np.ndarray:
    if params.get("col") is not None:
        return np.asarray(task.column(params["col"]))
    factor = params.get("factor")
    if factor is None:
        raise PartitionError("custom_cv needs a factor or a column name")
    factor = np.asarray(factor)
    if len(factor) != task.n:
        raise PartitionError(f"factor length {len(factor)} does not match task size {task.n}")
    return factor


def _custom_folds(task: Task, params: dict[str, Any], rng, repeat: int):
    factor = np.array([str(v) for v in _factor(task, params)], dtype=object)
    uniq, inverse = levels(factor)
    if len(uniq) < 2:
        raise PartitionError("custom_cv needs at least two factor levels")
    return folds_from_labels(inverse, len(uniq), repeat), BlockSet(inverse + 1, len(uniq), "custom")


def custom_cv(task: Task, factor: Optional[Sequence] = None, col: Optional[str] = None, seed: int = 0):
    """Leave-one-level-out CV; folds follow the lexicographic level order.

    Pass the levels directly as ``factor`` or name a task column with ``col``.
    """
    params: dict[str, Any] = {"col": col} if col is not None else {"factor": [str(v) for v in factor]}
    f, blocks = _custom_folds(task, params, None, 1)
    return assemble("custom_cv", params, seed, [f], blocks)


def _var(task: Task, name: str, kind: str) -> np.ndarray:
    values = task.column(name)
    if values is None:
        raise PartitionError(f"{kind} variable {name!r} has no values")
    return np.array([str(v) for v in values], dtype=object) if values.dtype.kind not in "iu" else values


def _cstf_folds(task: Task, params: dict[str, Any], rng, repeat: int):
    k = params["folds"]
    space_var, time_var = params.get("space_var"), params.get("time_var")
    if space_var is None and time_var is None:
        raise PartitionError("sptcv_cstf needs space_var, time_var or both")

    fold_of: dict[str, np.ndarray] = {}
    for kind, name in (("space", space_var), ("time", time_var)):
        if name is None:
            continue
        uniq, inverse = levels(_var(task, name, kind))
        if k > len(uniq):
            raise PartitionError(f"folds={k} exceeds the number of unique {kind} levels ({len(uniq)})")
        fold_of[kind] = deal(len(uniq), k, rng)[inverse]

    if len(fold_of) == 1:
        (kind, obs_fold), = fold_of.items()
        provenance = "locational" if kind == "space" else "temporal"
        blocks = BlockSet(levels(obs_fold)[1] + 1, len(np.unique(obs_fold)), provenance)
        return folds_from_labels(obs_fold, k, repeat), blocks

    s, t = fold_of["space"], fold_of["time"]
    out = []
    for j in range(k):
        test = np.flatnonzero((s == j) & (t == j))
        train = np.flatnonzero((s != j) & (t != j))
        omitted = np.flatnonzero(((s == j) | (t == j)) & ~((s == j) & (t == j)))
        out.append(Fold.from_indices(j + 1, test, train, omitted, repeat))
    return out, None


def sptcv_cstf(
    task: Task,
    folds: int = 5,
    space_var: Optional[str] = None,
    time_var: Optional[str] = None,
    seed: int = 0,
):
    """Leave-location-out, leave-time-out, or leave-location-and-time-out CV.

    With both variables, fold ``i`` tests the rows whose location is in the
    ``i``-th location fold and whose time is in the ``i``-th time fold; rows
    sharing either with the test set but not both are omitted.
    """
    params = {"folds": int(folds), "space_var": space_var, "time_var": time_var}
    f, blocks = _cstf_folds(task, params, make_rng(seed), 1)
    return assemble("sptcv_cstf", params, seed, [f], blocks)
