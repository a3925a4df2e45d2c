"""Small, deterministic learners: k-nearest neighbors, L2 logistic regression,
and a featureless baseline."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
from scipy.spatial.distance import cdist

from ..task import Task


class LearnerError(ValueError):
    pass


@dataclass
class Model:
    """A fitted learner bound to the training rows' features and labels."""

    learner: "Learner"
    n_features: int
    task_type: str
    positive: Optional[str]
    state: dict[str, Any] = field(repr=False)
    train_indices: np.ndarray = field(repr=False, default=None)

    def predict(self, X: np.ndarray, predict_type: Optional[str] = None) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise LearnerError(f"feature-count mismatch: model has {self.n_features}, got {X.shape[-1]}")
        ptype = predict_type or self.learner.predict_type
        if self.task_type == "regr" and ptype == "probability":
            raise LearnerError("probability predictions need a classification task")
        if len(X) == 0:
            return np.empty(0, dtype=float if ptype == "probability" or self.task_type == "regr" else object)
        return self.learner._predict(self, X, ptype)


class Learner:
    id = "learner"
    predict_type = "response"

    def params(self) -> dict[str, Any]:
        return {}

    def with_params(self, **params) -> "Learner":
        merged = {**self.params(), **params}
        return type(self)(**merged)

    def fit(self, X: np.ndarray, y: np.ndarray, task_type: str, positive: Optional[str]) -> dict:
        raise NotImplementedError

    def _predict(self, model: Model, X: np.ndarray, ptype: str) -> np.ndarray:
        raise NotImplementedError


def _positive_fraction_to_label(prob: np.ndarray, positive: str, negative: str) -> np.ndarray:
    return np.where(prob >= 0.5, positive, negative).astype(object)


@dataclass
class KNNLearner(Learner):
    """k-nearest neighbors with Euclidean distance.

    Distance ties go to the lower training row. In response mode, vote ties
    go to the class of the nearest tied neighbor.
    """

    k_neighbors: int = 1
    predict_type: str = "probability"
    id = "knn"

    def params(self):
        return {"k_neighbors": self.k_neighbors, "predict_type": self.predict_type}

    def fit(self, X, y, task_type, positive):
        if self.k_neighbors < 1:
            raise LearnerError("k_neighbors must be >= 1")
        if self.k_neighbors > len(X):
            raise LearnerError(f"k_neighbors={self.k_neighbors} exceeds the training size ({len(X)})")
        return {"X": X, "y": y}

    def _neighbors(self, model: Model, X: np.ndarray) -> np.ndarray:
        d = cdist(X, model.state["X"])
        return np.argsort(d, axis=1, kind="stable")[:, : self.k_neighbors]

    def _predict(self, model, X, ptype):
        nb = self._neighbors(model, X)
        ny = model.state["y"][nb]
        if model.task_type == "regr":
            return ny.astype(float).mean(axis=1)
        if ptype == "probability":
            if model.positive is None:
                raise LearnerError("probability predictions need a positive label")
            return (ny == model.positive).mean(axis=1)
        out = np.empty(len(X), dtype=object)
        for i, row in enumerate(ny):
            labels, counts = np.unique(row, return_counts=True)
            winners = set(labels[counts == counts.max()])
            out[i] = next(lab for lab in row if lab in winners)
        return out


@dataclass
class LogisticLearner(Learner):
    """Binary logistic regression with an L2 penalty, fitted by full-batch
    gradient descent on internally standardized features."""

    l2: float = 0.0
    epochs: int = 200
    learning_rate: float = 0.5
    predict_type: str = "probability"
    id = "logistic"

    def params(self):
        return {"l2": self.l2, "epochs": self.epochs, "learning_rate": self.learning_rate, "predict_type": self.predict_type}

    def fit(self, X, y, task_type, positive):
        if task_type != "classif":
            raise LearnerError("logistic regression needs a classification task")
        classes = sorted(set(y.tolist()))
        if len(classes) != 2:
            raise LearnerError(f"logistic regression needs exactly two classes in training, got {len(classes)}")
        if positive is None:
            positive = classes[1]
        negative = classes[0] if classes[1] == positive else classes[1]
        t = (y == positive).astype(float)
        mu = X.mean(axis=0)
        sd = X.std(axis=0)
        sd[sd == 0] = 1.0
        Z = (X - mu) / sd
        w = np.zeros(X.shape[1])
        b = 0.0
        n = len(t)
        for _ in range(self.epochs):
            p = _sigmoid(Z @ w + b)
            g = p - t
            w -= self.learning_rate * (Z.T @ g / n + self.l2 * w)
            b -= self.learning_rate * g.mean()
        return {"mu": mu, "sd": sd, "w": w, "b": b, "positive": positive, "negative": negative}

    def _predict(self, model, X, ptype):
        s = model.state
        prob = _sigmoid(((X - s["mu"]) / s["sd"]) @ s["w"] + s["b"])
        if ptype == "probability":
            return prob
        return _positive_fraction_to_label(prob, s["positive"], s["negative"])


@dataclass
class FeaturelessLearner(Learner):
    """Ignores the features: class frequencies or the training mean."""

    predict_type: str = "response"
    id = "featureless"

    def params(self):
        return {"predict_type": self.predict_type}

    def fit(self, X, y, task_type, positive):
        if task_type == "regr":
            return {"mean": float(np.mean(y.astype(float)))}
        labels, counts = np.unique(y, return_counts=True)
        frac = float(np.mean(y == positive)) if positive is not None else None
        return {"majority": labels[np.argmax(counts)], "positive_fraction": frac}

    def _predict(self, model, X, ptype):
        s = model.state
        if model.task_type == "regr":
            return np.full(len(X), s["mean"])
        if ptype == "probability":
            if s["positive_fraction"] is None:
                raise LearnerError("probability predictions need a positive label")
            return np.full(len(X), s["positive_fraction"])
        return np.array([s["majority"]] * len(X), dtype=object)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * x))


LEARNERS = {"knn": KNNLearner, "logistic": LogisticLearner, "featureless": FeaturelessLearner}


def make_learner(id: str, **params) -> Learner:
    try:
        cls = LEARNERS[id]
    except KeyError:
        raise LearnerError(f"unknown learner {id!r}; known: {sorted(LEARNERS)}") from None
    return cls(**params)


def train(learner: Learner, task: Task, train_indices) -> Model:
    """Fit ``learner`` on the 0-based ``train_indices`` rows of ``task``."""
    idx = np.asarray(train_indices, dtype=np.int64)
    if idx.size == 0:
        raise LearnerError("empty training set")
    X = task.features[idx]
    y = task.response[idx]
    state = learner.fit(X, y, task.task_type, task.positive_label)
    return Model(learner, task.p, task.task_type, task.positive_label, state, idx)


def predict(model: Model, task: Task, test_indices, predict_type: Optional[str] = None) -> np.ndarray:
    """Predictions for the 0-based ``test_indices`` rows: positive-class scores
    in probability mode, labels or values in response mode."""
    idx = np.asarray(test_indices, dtype=np.int64)
    return model.predict(task.features[idx] if idx.size else np.empty((0, task.p)), predict_type)
