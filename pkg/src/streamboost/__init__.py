"""Streaming binary classification via online gentle boosting.

Weak learners (regression stumps, Hoeffding trees) combine into additive
ensembles trained one instance at a time; a prequential harness and CLI
benchmark them against the Oza-Russell online ensembles.
"""

__version__ = "0.1.0"

from .boosting import (
    BatchGentleBoost,
    OnlineGentleBoost,
    OzaBag,
    OzaBoost,
    batch_fit,
    pointwise_newton_step,
    step_size,
)
from .core import (
    ConfigError,
    DataError,
    Instance,
    StepSizeParam,
    clamp_score,
    exponential_loss,
    make_instance,
    sign_of,
)
from .data import CsvStream, StreamSchema, SyntheticSpec, generate, load_schema
from .evaluation import MetricUndefinedError, RunRecord, prequential_run, roc_auc
from .models import ModelSpec, build_model, parse_model_spec
from .weak import ExactStump, HoeffdingTree, RegressionStump, prob_to_score

__all__ = [
    "BatchGentleBoost",
    "ConfigError",
    "CsvStream",
    "DataError",
    "ExactStump",
    "HoeffdingTree",
    "Instance",
    "MetricUndefinedError",
    "ModelSpec",
    "OnlineGentleBoost",
    "OzaBag",
    "OzaBoost",
    "RegressionStump",
    "RunRecord",
    "StepSizeParam",
    "StreamSchema",
    "SyntheticSpec",
    "batch_fit",
    "build_model",
    "clamp_score",
    "exponential_loss",
    "generate",
    "load_schema",
    "make_instance",
    "parse_model_spec",
    "pointwise_newton_step",
    "prequential_run",
    "prob_to_score",
    "roc_auc",
    "sign_of",
    "step_size",
]
