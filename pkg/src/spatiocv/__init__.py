"""Spatial and spatiotemporal cross-validation toolkit."""

from .clustering import KMeansResult, kmeans, standardize
from .evaluation import (
    EvaluationResult,
    KNNLearner,
    LogisticLearner,
    auroc,
    make_learner,
    nested_resample,
    resample,
)
from .io import load_task_csv, load_task_geojson, read_plan, write_plan, write_task_csv
from .partitioners import (
    PartitionError,
    estimate_autocorrelation_range,
    make_plan,
    repeat_plan,
)
from .plan import BlockSet, Fold, ResamplingPlan, ValidationReport, validate_plan
from .plot import PlotSpec, render_partition_svg
from .synthgen import make_classification_task, sample_grf
from .task import Task, TaskError, TaskSchema, build_task, set_role

__version__ = "0.1.0"

__all__ = [
    "BlockSet",
    "EvaluationResult",
    "Fold",
    "KMeansResult",
    "KNNLearner",
    "LogisticLearner",
    "PartitionError",
    "PlotSpec",
    "ResamplingPlan",
    "Task",
    "TaskError",
    "TaskSchema",
    "ValidationReport",
    "auroc",
    "build_task",
    "estimate_autocorrelation_range",
    "kmeans",
    "load_task_csv",
    "load_task_geojson",
    "make_classification_task",
    "make_learner",
    "make_plan",
    "nested_resample",
    "read_plan",
    "render_partition_svg",
    "repeat_plan",
    "resample",
    "sample_grf",
    "set_role",
    "standardize",
    "validate_plan",
    "write_plan",
    "write_task_csv",
]
