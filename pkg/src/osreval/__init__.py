"""Open set recognition evaluation under known/unknown class imbalance."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    UNKNOWN,
    BinaryConfusionMatrix,
    ClassCatalog,
    GeneralConfusionMatrix,
    OSREvalError,
    PredictionRecord,
    build_general_matrix,
    validate_records,
)
from .protocol import holdout_plan, openness, outlier_plan  # noqa: E402
from .scores import BaseMetric, ScoreSuite, balanced_accuracy, score_suite  # noqa: E402
from .simulate import RandomPredictorMode, imbalance_grid, random_baseline_study  # noqa: E402

__all__ = [
    "UNKNOWN",
    "BaseMetric",
    "BinaryConfusionMatrix",
    "ClassCatalog",
    "GeneralConfusionMatrix",
    "OSREvalError",
    "PredictionRecord",
    "RandomPredictorMode",
    "ScoreSuite",
    "balanced_accuracy",
    "build_general_matrix",
    "holdout_plan",
    "imbalance_grid",
    "openness",
    "outlier_plan",
    "random_baseline_study",
    "score_suite",
    "validate_records",
]
