from __future__ import annotations

from typing import Any, Iterable, Optional, Sequence

import numpy as np

from ..plan import BlockSet, Fold, ResamplingPlan

MAX_SEED = 2**64


class PartitionError(ValueError):
    """Raised when a partitioner cannot build a valid plan for a task."""


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < MAX_SEED:
        raise PartitionError("seed must be a 64-bit unsigned integer")
    return seed


def make_rng(seed: int, repeat: int = 0) -> np.random.Generator:
    """Generator for repeat ``repeat`` (0-based) derived from ``(seed, repeat)``."""
    return np.random.default_rng([check_seed(seed), repeat])


def deal(n_items: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Shuffle items and deal them round-robin into folds 0..k-1.

    Fold sizes differ by at most one, and the first folds get the extras.
    """
    if k > n_items:
        raise PartitionError(f"cannot deal {n_items} items into {k} folds")
    order = rng.permutation(n_items)
    fold_of = np.empty(n_items, dtype=np.int64)
    fold_of[order] = np.arange(n_items) % k
    return fold_of


def folds_from_labels(labels: np.ndarray, n_folds: int, repeat: int = 1) -> list[Fold]:
    """Leave-one-label-out folds for 0-based labels 0..n_folds-1."""
    out = []
    for j in range(n_folds):
        test = np.flatnonzero(labels == j)
        train = np.flatnonzero(labels != j)
        out.append(Fold.from_indices(j + 1, test, train, (), repeat))
    return out


def folds_from_sets(
    sets: Iterable[tuple[Sequence[int], Sequence[int], Sequence[int]]], repeat: int = 1
) -> list[Fold]:
    return [Fold.from_indices(i + 1, te, tr, om, repeat) for i, (te, tr, om) in enumerate(sets)]


def check_folds(folds: Sequence[Fold], method: str) -> None:
    for f in folds:
        if len(f.test) == 0:
            raise PartitionError(f"{method}: fold {f.id} has an empty test set")
        if len(f.train) == 0:
            raise PartitionError(f"{method}: fold {f.id} has an empty training set")


def assemble(
    method: str,
    params: dict[str, Any],
    seed: int,
    per_repeat: Sequence[Sequence[Fold]],
    blocks: Optional[BlockSet] = None,
) -> ResamplingPlan:
    folds: list[Fold] = []
    for folds_r in per_repeat:
        check_folds(folds_r, method)
        folds.extend(folds_r)
    return ResamplingPlan(
        method=method,
        params=dict(params),
        seed=check_seed(seed),
        repeats=len(per_repeat),
        k_per_repeat=len(per_repeat[0]),
        folds=tuple(folds),
        blocks=blocks,
    )


def levels(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sorted unique levels and the 0-based level index of each value."""
    uniq, inverse = np.unique(np.asarray(values), return_inverse=True)
    return uniq, inverse.reshape(-1)
