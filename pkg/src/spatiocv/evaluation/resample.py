"""The k-fold CV estimator: fit on each training set, score on its test set,
average the fold scores."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from ..partitioners import make_plan
from ..plan import ResamplingPlan, validate_plan
from ..task import Task
from .learners import Learner, predict, train
from .measures import Measure, UndefinedMeasure, get_measure

log = logging.getLogger(__name__)


class LeakageError(AssertionError):
    """A test row was handed to the learner for training."""


class PlanMismatch(ValueError):
    pass


@dataclass(frozen=True)
class FoldScore:
    repeat: int
    fold: int
    value: float
    n_test: int

    @property
    def defined(self) -> bool:
        return not math.isnan(self.value)


@dataclass(frozen=True, eq=False)
class EvaluationResult:
    measure: str
    per_fold: tuple[FoldScore, ...]
    aggregate: float
    warnings: tuple[str, ...] = ()
    method: str = ""
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    @property
    def values(self) -> np.ndarray:
        return np.array([f.value for f in self.per_fold])

    def to_dict(self) -> dict[str, Any]:
        return {
            "measure": self.measure,
            "aggregate": None if math.isnan(self.aggregate) else self.aggregate,
            "warnings": list(self.warnings),
            "per_fold": [
                {"repeat": f.repeat, "fold": f.fold, "value": None if math.isnan(f.value) else f.value, "n_test": f.n_test}
                for f in self.per_fold
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _aggregate(per_fold: Sequence[FoldScore]) -> float:
    vals = [f.value for f in per_fold if f.defined]
    return float(np.mean(vals)) if vals else float("nan")


def _fit_and_score(task, learner, train_idx, test_idx, measure: Measure) -> float:
    if np.intersect1d(train_idx, test_idx).size:
        raise LeakageError("test rows found in the training rows")
    model = train(learner, task, train_idx)
    pred = predict(model, task, test_idx, measure.predict_type)
    return measure.score(task, test_idx, pred)


def resample(task: Task, learner: Learner, plan: ResamplingPlan, measure="auroc") -> EvaluationResult:
    """Run ``plan`` and return per-fold scores and their mean.

    Omitted rows are used for neither training nor testing. A fold whose
    measure is undefined (e.g. a single-class test set under AUROC) is
    recorded as NaN, excluded from the mean and reported in ``warnings``.
    """
    measure = get_measure(measure)
    report = validate_plan(plan, task)
    if any("out of range" in v or "cover" in v for v in report.violations):
        raise PlanMismatch(f"plan/task mismatch: {report.violations[0]}")
    if not report.passed:
        raise PlanMismatch(f"invalid plan: {report.violations[0]}")

    scores, warnings = [], []
    for f in plan.folds:
        try:
            value = _fit_and_score(task, learner, f.train, f.test, measure)
        except UndefinedMeasure as e:
            value = float("nan")
            warnings.append(f"repeat {f.repeat} fold {f.id}: {e}")
            log.warning("undefined %s in repeat %d fold %d: %s", measure.id, f.repeat, f.id, e)
        scores.append(FoldScore(f.repeat, f.id, value, len(f.test)))
    return EvaluationResult(
        measure=measure.id,
        per_fold=tuple(scores),
        aggregate=_aggregate(scores),
        warnings=tuple(warnings),
        method=plan.method,
        params=dict(plan.params),
        seed=plan.seed,
    )


@dataclass(frozen=True, eq=False)
class NestedResult:
    result: EvaluationResult
    chosen: tuple[dict[str, Any], ...]
    inner_scores: tuple[tuple[float, ...], ...]


def nested_resample(
    task: Task,
    learner: Learner,
    grid: Sequence[Mapping[str, Any]],
    inner_method: str,
    inner_params: Mapping[str, Any],
    outer: ResamplingPlan,
    measure="auroc",
    seed: int = 0,
) -> NestedResult:
    """Nested CV for hyperparameter tuning.

    For each outer fold the inner method is instantiated on the outer training
    rows, every grid point is scored there, and the best (first on ties) is
    refit on all outer training rows and scored on the outer test rows.
    """
    measure = get_measure(measure)
    grid = [dict(g) for g in grid]
    if not grid:
        raise ValueError("hyperparameter grid is empty")
    report = validate_plan(outer, task)
    if not report.passed:
        raise PlanMismatch(f"plan/task mismatch: {report.violations[0]}")

    scores, chosen, inner_all, warnings = [], [], [], []
    for j, f in enumerate(outer.folds):
        sub = task.subset(f.train)
        inner_plan = make_plan(sub, inner_method, inner_params, seed=_inner_seed(seed, j))
        inner_scores = []
        for point in grid:
            res = resample(sub, learner.with_params(**point), inner_plan, measure)
            inner_scores.append(res.aggregate)
        best = None
        for i, s in enumerate(inner_scores):
            if math.isnan(s):
                continue
            if best is None or measure.better(s, inner_scores[best]):
                best = i
        if best is None:
            best = 0
            warnings.append(f"repeat {f.repeat} fold {f.id}: no grid point had a defined inner score")
        chosen.append(grid[best])
        inner_all.append(tuple(inner_scores))
        try:
            value = _fit_and_score(task, learner.with_params(**grid[best]), f.train, f.test, measure)
        except UndefinedMeasure as e:
            value = float("nan")
            warnings.append(f"repeat {f.repeat} fold {f.id}: {e}")
        scores.append(FoldScore(f.repeat, f.id, value, len(f.test)))

    result = EvaluationResult(
        measure=measure.id,
        per_fold=tuple(scores),
        aggregate=_aggregate(scores),
        warnings=tuple(warnings),
        method=outer.method,
        params=dict(outer.params),
        seed=outer.seed,
    )
    return NestedResult(result, tuple(chosen), tuple(inner_all))


def _inner_seed(seed: int, outer_index: int) -> int:
    return int(np.random.SeedSequence([seed, outer_index]).generate_state(2, np.uint32).view(np.uint64)[0])
