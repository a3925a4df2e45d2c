"""Resampling methods addressable by name.

>>> plan = make_plan(task, "spcv_coords", {"folds": 5}, seed=42)   # doctest: +SKIP
>>> plan = repeat_plan(task, "spcv_coords", {"folds": 4}, repeats=2, seed=42)   # doctest: +SKIP
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Mapping

from ..plan import ResamplingPlan
from ..task import Task
from ._base import PartitionError, assemble, check_seed, deal, make_rng
from .autorange import RangeEstimate, empirical_semivariogram, estimate_autocorrelation_range
from .buffer import BufferSpec, _buffer_folds, _disc_folds, spcv_buffer, spcv_disc
from .clusters import _coords_folds, _env_folds, spcv_coords, spcv_env
from .grid import BlockSpec, TileSpec, _block_folds, _tiles_folds, spcv_block, spcv_tiles, systematic_fold
from .groups import (
    _cstf_folds,
    _custom_folds,
    _cv_folds,
    custom_cv,
    grouped_cv,
    random_cv,
    sptcv_cstf,
)


@dataclass(frozen=True)
class Method:
    name: str
    build: Callable
    normalize: Callable[[Task, Mapping[str, Any]], dict]
    is_random: Callable[[Task, dict], bool]


def _norm_folds(default: int = 5):
    def norm(task, p):
        out = dict(p)
        out["folds"] = int(out.get("folds", default))
        return out

    return norm


def _norm_buffer(task, p):
    if "the_range" not in p:
        raise PartitionError("spcv_buffer needs the_range")
    the_range = float(p["the_range"])
    if not the_range > 0:
        raise PartitionError("the_range must be positive")
    mode = p.get("sp_data_type", "PA")
    if mode not in ("PA", "PB"):
        raise PartitionError(f"sp_data_type must be 'PA' or 'PB', not {mode!r}")
    return {"the_range": the_range, "sp_data_type": mode, "add_bg": _bool(p.get("add_bg", True))}


def _norm_disc(task, p):
    k = int(p.get("folds", task.n))
    replace = _bool(p.get("replace", False))
    if not replace and k > task.n:
        raise PartitionError(f"folds={k} exceeds the number of observations ({task.n}) without replacement")
    return {
        "folds": k,
        "radius": BufferSpec(float(p.get("radius", 0.0))).distance,
        "buffer": BufferSpec(float(p.get("buffer", 0.0))).distance,
        "replace": replace,
    }


def _pair(v, cast):
    if v is None:
        return None
    if isinstance(v, str):
        v = [s for s in v.replace("x", ",").split(",") if s]
    if not isinstance(v, (list, tuple)):
        v = [v, v]
    if len(v) == 1:
        v = [v[0], v[0]]
    return tuple(cast(x) for x in v)


def _norm_tiles(task, p):
    return {
        "nsplit": _pair(p.get("nsplit"), int),
        "dsplit": _pair(p.get("dsplit"), float),
        "rotation": float(p.get("rotation", 0.0)),
        "min_n": None if p.get("min_n") is None else int(p["min_n"]),
        "min_frac": None if p.get("min_frac") is None else float(p["min_frac"]),
    }


def _norm_block(task, p):
    rows_cols = p.get("rows_cols")
    if rows_cols is None and p.get("rows") is not None:
        rows_cols = (p["rows"], p["cols"])
    spec = BlockSpec(
        range=None if p.get("range") is None else float(p["range"]),
        rows_cols=_pair(rows_cols, int),
        folds=int(p.get("folds", 5)),
        selection=p.get("selection", "random"),
    )
    return {"range": spec.range, "rows_cols": spec.rows_cols, "folds": spec.folds, "selection": spec.selection}


def _norm_custom(task, p):
    if p.get("col") is not None:
        return {"col": p["col"]}
    if p.get("factor") is None:
        raise PartitionError("custom_cv needs a factor or a column name")
    return {"factor": [str(v) for v in p["factor"]]}


def _norm_env(task, p):
    feats = p.get("features")
    if feats is None:
        raise PartitionError("spcv_env needs features")
    if isinstance(feats, str):
        feats = [s for s in feats.split(",") if s]
    return {"features": list(feats), "folds": int(p.get("folds", 5))}


def _norm_cstf(task, p):
    return {"folds": int(p.get("folds", 5)), "space_var": p.get("space_var"), "time_var": p.get("time_var")}


def _bool(v) -> bool:
    if isinstance(v, str):
        if v.lower() in ("true", "1", "yes"):
            return True
        if v.lower() in ("false", "0", "no"):
            return False
        raise PartitionError(f"not a boolean: {v!r}")
    return bool(v)


def _always(task, p):
    return True


def _never(task, p):
    return False


METHODS: dict[str, Method] = {
    m.name: m
    for m in (
        Method("cv", _cv_folds, _norm_folds(), _always),
        Method("spcv_buffer", _buffer_folds, _norm_buffer, _never),
        Method("spcv_disc", _disc_folds, _norm_disc, lambda t, p: p["replace"] or p["folds"] != t.n),
        Method("spcv_coords", _coords_folds, _norm_folds(), _always),
        Method("spcv_tiles", _tiles_folds, _norm_tiles, _never),
        Method("custom_cv", _custom_folds, _norm_custom, _never),
        Method("spcv_block", _block_folds, _norm_block, lambda t, p: p["selection"] == "random"),
        Method("spcv_env", _env_folds, _norm_env, _always),
        Method("sptcv_cstf", _cstf_folds, _norm_cstf, _always),
    )
}


def get_method(name: str) -> Method:
    try:
        return METHODS[name]
    except KeyError:
        raise PartitionError(f"unknown method {name!r}; known: {sorted(METHODS)}") from None


def make_plan(task: Task, method: str, params: Mapping[str, Any] | None = None, seed: int = 0) -> ResamplingPlan:
    """Instantiate ``method`` with a flat parameter record."""
    return repeat_plan(task, method, params, repeats=1, seed=seed)


def repeat_plan(
    task: Task,
    method: str,
    params: Mapping[str, Any] | None = None,
    repeats: int = 1,
    seed: int = 0,
) -> ResamplingPlan:
    """``repeats`` independent instantiations of a random method.

    Repeat ``r`` (1-based) draws from a generator seeded with ``(seed, r - 1)``,
    so ``repeats=1`` reproduces the single plan.
    """
    m = get_method(method)
    check_seed(seed)
    if repeats < 1:
        raise PartitionError("repeats must be >= 1")
    p = m.normalize(task, dict(params or {}))
    if repeats > 1 and not m.is_random(task, p):
        raise PartitionError(f"{method} with these parameters is a deterministic method; it cannot be repeated")
    per_repeat, blocks = [], None
    for r in range(repeats):
        folds, b = m.build(task, p, make_rng(seed, r), r + 1)
        per_repeat.append(folds)
        if r == 0:
            blocks = b
    return assemble(method, p, seed, per_repeat, blocks if repeats == 1 else None)


__all__ = [
    "BlockSpec",
    "BufferSpec",
    "METHODS",
    "PartitionError",
    "RangeEstimate",
    "TileSpec",
    "custom_cv",
    "deal",
    "empirical_semivariogram",
    "estimate_autocorrelation_range",
    "grouped_cv",
    "make_plan",
    "random_cv",
    "repeat_plan",
    "spcv_block",
    "spcv_buffer",
    "spcv_coords",
    "spcv_disc",
    "spcv_env",
    "spcv_tiles",
    "sptcv_cstf",
    "systematic_fold",
]
