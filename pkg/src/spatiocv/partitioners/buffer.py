"""Spatial leave-one-out with a buffer, and leave-one-disc-out.

Boundary rule: an observation at distance <= threshold from the test point
(or disc center) is inside the buffer and never used for training. The one
exception is presence/background mode without added background, where the
training set is everything at distance >= the range.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
from scipy.spatial.distance import cdist

from ..plan import Fold
from ..task import Task
from ._base import PartitionError, assemble, make_rng


@dataclass(frozen=True)
class BufferSpec:
    distance: float

    def __post_init__(self):
        if not np.isfinite(self.distance) or self.distance < 0:
            raise PartitionError("buffer distance must be finite and non-negative")


def _buffer_folds(task: Task, params: dict[str, Any], rng, repeat: int):
    r = params["the_range"]
    mode = params["sp_data_type"]
    coords = task.coords
    folds = []
    if mode == "PA":
        d = cdist(coords, coords)
        for i in range(task.n):
            near = d[i] <= r
            near[i] = False
            folds.append((np.array([i]), np.flatnonzero(d[i] > r), np.flatnonzero(near)))
    else:
        if task.positive_label is None:
            raise PartitionError("presence/background mode needs a task with positive_label")
        presence = task.binary_response()
        centers = np.flatnonzero(presence)
        d = cdist(coords[centers], coords)
        for c, di in zip(centers, d):
            if params["add_bg"]:
                within = di <= r
                test = np.union1d([c], np.flatnonzero(within & ~presence))
                train = np.flatnonzero(~within)
                omitted = np.setdiff1d(np.flatnonzero(within & presence), [c])
            else:
                test = np.array([c])
                train = np.flatnonzero(di >= r)
                train = train[train != c]
                omitted = np.setdiff1d(np.arange(task.n), np.union1d(test, train))
            folds.append((test, train, omitted))
    return [Fold.from_indices(j + 1, te, tr, om, repeat) for j, (te, tr, om) in enumerate(folds)], None


def spcv_buffer(task: Task, the_range: float, sp_data_type: str = "PA", add_bg: bool = True, seed: int = 0):
    """Leave-one-out with a circular exclusion buffer of radius ``the_range``.

    ``sp_data_type="PA"`` makes one fold per observation. ``"PB"`` makes one
    fold per presence (rows whose response is the task's positive label);
    with ``add_bg`` the background rows inside the range join the test fold.
    """
    the_range = float(BufferSpec(float(the_range)).distance)
    if not the_range > 0:
        raise PartitionError("the_range must be positive")
    if sp_data_type not in ("PA", "PB"):
        raise PartitionError(f"sp_data_type must be 'PA' or 'PB', not {sp_data_type!r}")
    params = {"the_range": the_range, "sp_data_type": sp_data_type, "add_bg": bool(add_bg)}
    f, _ = _buffer_folds(task, params, None, 1)
    return assemble("spcv_buffer", params, seed, [f])


def _disc_folds(task: Task, params: dict[str, Any], rng, repeat: int):
    n = task.n
    k = params["folds"]
    radius, buffer = params["radius"], params["buffer"]
    if params["replace"]:
        centers = rng.integers(0, n, size=k)
    elif k == n:
        centers = np.arange(n)
    else:
        centers = np.sort(rng.choice(n, size=k, replace=False))
    d = cdist(task.coords[centers], task.coords)
    folds = []
    for j, dj in enumerate(d):
        test = np.flatnonzero(dj <= radius)
        omitted = np.flatnonzero((dj > radius) & (dj <= radius + buffer))
        train = np.flatnonzero(dj > radius + buffer)
        folds.append(Fold.from_indices(j + 1, test, train, omitted, repeat))
    return folds, None


def spcv_disc(
    task: Task,
    folds: Optional[int] = None,
    radius: float = 0.0,
    buffer: float = 0.0,
    replace: bool = False,
    seed: int = 0,
):
    """Leave-one-disc-out: discs of ``radius`` around sampled observations,
    surrounded by an omitted ring of width ``buffer``.

    ``folds`` defaults to ``task.n``; when it equals ``task.n`` without
    replacement every observation is a center, in row order.
    """
    k = task.n if folds is None else int(folds)
    if k < 1:
        raise PartitionError("folds must be >= 1")
    if not replace and k > task.n:
        raise PartitionError(f"folds={k} exceeds the number of observations ({task.n}) without replacement")
    radius = BufferSpec(float(radius)).distance
    buffer = BufferSpec(float(buffer)).distance
    params = {"folds": k, "radius": radius, "buffer": buffer, "replace": bool(replace)}
    f, _ = _disc_folds(task, params, make_rng(seed), 1)
    return assemble("spcv_disc", params, seed, [f])


def is_disc_random(params: dict[str, Any], n: Optional[int] = None) -> bool:
    return bool(params.get("replace")) or (n is not None and params.get("folds", n) != n)
