"""Performance measures."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import rankdata


class UndefinedMeasure(ValueError):
    """The measure is not defined for the given fold (e.g. single-class AUROC)."""


def auroc(scores, labels) -> float:
    """Area under the ROC curve in its Mann-Whitney form.

    Equals the fraction of (positive, negative) pairs in which the positive
    scores higher, counting ties as one half.
    """
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels).astype(bool)
    if s.shape != y.shape:
        raise ValueError("scores and labels differ in length")
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMeasure("AUROC needs both classes")
    ranks = rankdata(s)
    u = ranks[y].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def misclassification(truth, predicted) -> float:
    t = np.asarray(truth)
    if len(t) == 0:
        raise UndefinedMeasure("misclassification of an empty set")
    return float(np.mean(t != np.asarray(predicted)))


def rmse(truth, predicted) -> float:
    t = np.asarray(truth, dtype=float)
    if len(t) == 0:
        raise UndefinedMeasure("rmse of an empty set")
    return float(np.sqrt(np.mean((t - np.asarray(predicted, dtype=float)) ** 2)))


@dataclass(frozen=True)
class Measure:
    """A fold-level performance measure.

    ``predict_type`` is what the measure consumes: ``"probability"`` (scores
    for the positive class) or ``"response"`` (labels or values).
    """

    id: str
    direction: str
    predict_type: str
    task_type: str
    fn: Callable

    def score(self, task, test_idx, predictions) -> float:
        if self.id == "auroc":
            return self.fn(predictions, task.binary_response()[test_idx])
        return self.fn(task.response[test_idx], predictions)

    def better(self, a: float, b: float) -> bool:
        return a > b if self.direction == "maximize" else a < b


MEASURES = {
    "auroc": Measure("auroc", "maximize", "probability", "classif", auroc),
    "misclassification": Measure("misclassification", "minimize", "response", "classif", misclassification),
    "rmse": Measure("rmse", "minimize", "response", "regr", rmse),
}


def get_measure(measure) -> Measure:
    if isinstance(measure, Measure):
        return measure
    try:
        return MEASURES[measure]
    except KeyError:
        raise ValueError(f"unknown measure {measure!r}; known: {sorted(MEASURES)}") from None
