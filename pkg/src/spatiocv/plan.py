"""Resampling plans, folds, block sets and plan validation.

Index sets are 0-based numpy arrays in memory and 1-based in serialized form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

# Methods whose test sets may overlap within one repeat.
OVERLAPPING_METHODS = frozenset({"spcv_disc"})


def _index_array(values: Sequence[int]) -> np.ndarray:
    arr = np.unique(np.asarray(values, dtype=np.int64))
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Fold:
    """One train/test split. ``id`` is 1-based within its repeat."""

    id: int
    test: np.ndarray
    train: np.ndarray
    omitted: np.ndarray
    repeat: int = 1

    @classmethod
    def from_indices(cls, id: int, test, train, omitted=(), repeat: int = 1) -> "Fold":
        return cls(id, _index_array(test), _index_array(train), _index_array(omitted), repeat)

    def to_dict(self) -> dict[str, Any]:
        return {
            "repeat": self.repeat,
            "id": self.id,
            "test": (self.test + 1).tolist(),
            "train": (self.train + 1).tolist(),
            "omitted": (self.omitted + 1).tolist(),
        }


@dataclass(frozen=True, eq=False)
class BlockSet:
    """Grouping of observations into blocks prior to fold assignment.

    ``block_of`` holds 1-based contiguous labels. ``geometry`` optionally maps
    block label to a rectangle ``((xmin, ymin), (xmax, ymax))``.
    """

    block_of: np.ndarray
    n_z: int
    provenance: str
    geometry: Optional[dict[int, tuple[tuple[float, float], tuple[float, float]]]] = None

    def __post_init__(self):
        labels = np.unique(self.block_of)
        if self.n_z < 1 or not np.array_equal(labels, np.arange(1, self.n_z + 1)):
            raise ValueError("block labels must be contiguous 1..n_z")
        if self.provenance not in {"geometric", "clustered", "custom", "temporal", "locational"}:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def members(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.block_of == label)


@dataclass(frozen=True, eq=False)
class ResamplingPlan:
    method: str
    params: dict[str, Any]
    seed: int
    repeats: int
    k_per_repeat: int
    folds: tuple[Fold, ...]
    blocks: Optional[BlockSet] = field(default=None, repr=False)

    @property
    def overlapping(self) -> bool:
        if self.method in OVERLAPPING_METHODS:
            return True
        return self.method == "spcv_buffer" and self.params.get("sp_data_type") == "PB"

    def __len__(self) -> int:
        return len(self.folds)

    def fold(self, id: int, repeat: int = 1) -> Fold:
        for f in self.folds:
            if f.id == id and f.repeat == repeat:
                return f
        raise KeyError(f"no fold {id} in repeat {repeat}")

    def by_repeat(self) -> dict[int, list[Fold]]:
        out: dict[int, list[Fold]] = {}
        for f in self.folds:
            out.setdefault(f.repeat, []).append(f)
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "params": _jsonable(self.params),
            "seed": self.seed,
            "repeats": self.repeats,
            "k_per_repeat": self.k_per_repeat,
            "folds": [f.to_dict() for f in self.folds],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"), sort_keys=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ResamplingPlan":
        folds = tuple(
            Fold(
                id=int(f["id"]),
                test=np.asarray(f["test"], dtype=np.int64) - 1,
                train=np.asarray(f["train"], dtype=np.int64) - 1,
                omitted=np.asarray(f.get("omitted", []), dtype=np.int64) - 1,
                repeat=int(f.get("repeat", 1)),
            )
            for f in d["folds"]
        )
        return cls(
            method=d["method"],
            params=dict(d.get("params", {})),
            seed=int(d.get("seed", 0)),
            repeats=int(d.get("repeats", 1)),
            k_per_repeat=int(d.get("k_per_repeat", len(folds))),
            folds=folds,
        )

    @classmethod
    def from_json(cls, text: str) -> "ResamplingPlan":
        return cls.from_dict(json.loads(text))


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in sorted(value.items())}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


@dataclass
class ValidationReport:
    passed: bool
    violations: list[str]
    n_folds: int

    def __bool__(self) -> bool:
        return self.passed


def validate_plan(plan: ResamplingPlan, task_or_n) -> ValidationReport:
    """Check disjointness, coverage and non-emptiness of every fold.

    Never raises; failures are listed in the report.
    """
    n = task_or_n if isinstance(task_or_n, (int, np.integer)) else task_or_n.n
    violations: list[str] = []
    everything = np.arange(n)

    for f in plan.folds:
        tag = f"repeat {f.repeat} fold {f.id}"
        parts = {"test": f.test, "train": f.train, "omitted": f.omitted}
        bad_range = False
        for name, idx in parts.items():
            idx = np.asarray(idx)
            if idx.size and (idx.min() < 0 or idx.max() >= n):
                violations.append(f"{tag}: {name} index out of range")
                bad_range = True
            if idx.size > 1 and np.any(np.diff(idx) <= 0):
                violations.append(f"{tag}: {name} not sorted or has duplicates")
        if len(f.test) == 0:
            violations.append(f"{tag}: empty test set")
        if len(f.train) == 0:
            violations.append(f"{tag}: empty train set")
        for a, b in (("test", "train"), ("test", "omitted"), ("train", "omitted")):
            common = np.intersect1d(parts[a], parts[b])
            if common.size:
                violations.append(f"{tag}: {a} and {b} share {common.size} indices")
        if not bad_range:
            union = np.union1d(np.union1d(f.test, f.train), f.omitted)
            if not np.array_equal(union, everything):
                violations.append(f"{tag}: test, train and omitted do not cover 1..{n}")

    if not plan.overlapping:
        for rep, folds in plan.by_repeat().items():
            seen = np.zeros(n, dtype=np.int64)
            for f in folds:
                idx = np.asarray(f.test)
                idx = idx[(idx >= 0) & (idx < n)]
                seen[idx] += 1
            if np.any(seen > 1):
                violations.append(f"repeat {rep}: test sets of distinct folds overlap")
            omitting = any(len(f.omitted) for f in folds)
            if not omitting and np.any(seen == 0):
                violations.append(f"repeat {rep}: test sets do not cover every observation")

    return ValidationReport(passed=not violations, violations=violations, n_folds=len(plan.folds))
