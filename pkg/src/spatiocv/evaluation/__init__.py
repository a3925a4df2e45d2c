from .learners import (
    FeaturelessLearner,
    KNNLearner,
    Learner,
    LearnerError,
    LogisticLearner,
    Model,
    make_learner,
    predict,
    train,
)
from .measures import MEASURES, Measure, UndefinedMeasure, auroc, get_measure, misclassification, rmse
from .resample import (
    EvaluationResult,
    FoldScore,
    LeakageError,
    NestedResult,
    PlanMismatch,
    nested_resample,
    resample,
)

__all__ = [
    "EvaluationResult",
    "FeaturelessLearner",
    "FoldScore",
    "KNNLearner",
    "LeakageError",
    "Learner",
    "LearnerError",
    "LogisticLearner",
    "MEASURES",
    "Measure",
    "Model",
    "NestedResult",
    "PlanMismatch",
    "UndefinedMeasure",
    "auroc",
    "get_measure",
    "make_learner",
    "misclassification",
    "nested_resample",
    "predict",
    "resample",
    "rmse",
    "train",
]
