"""Lesion-contour morphometrics, selection, nomograms, and evaluation."""

from .birads import BiradsRecord, EncodingSpec, decode, encode
from .dataset import CohortDataset, PipelineConfig, load_cohort
from .geometry import BinaryMask, LesionContour, contour_from_mask
from .lasso import LassoConfig, LassoPath, lasso_select
from .logistic import LogisticModel, fit_logistic, fit_multivariable, screen_univariable
from .metrics import (
    ConfusionMatrix,
    DelongResult,
    RocCurve,
    binary_metrics,
    consensus_reference,
    delong_paired,
    delong_variance,
    roc_auc,
    youden_threshold,
)
from .moments import MomentSet, moment_ellipse, region_moments
from .morphometry import FEATURE_NAMES, ShapeFeatureVector, extract_features
from .nomogram import Nomogram, build_nomogram, paper_fixture_nomogram, score
from .pipeline import export_nomogram, import_nomogram, run_pipeline
from .selection import FeatureMatrix, IccReport, collinearity_prune, icc_filter, univariable_auc

__version__ = "0.1.0"

__all__ = [
    "BinaryMask",
    "BiradsRecord",
    "CohortDataset",
    "ConfusionMatrix",
    "DelongResult",
    "EncodingSpec",
    "FEATURE_NAMES",
    "FeatureMatrix",
    "IccReport",
    "LassoConfig",
    "LassoPath",
    "LesionContour",
    "LogisticModel",
    "MomentSet",
    "Nomogram",
    "PipelineConfig",
    "RocCurve",
    "ShapeFeatureVector",
    "binary_metrics",
    "build_nomogram",
    "collinearity_prune",
    "consensus_reference",
    "contour_from_mask",
    "decode",
    "delong_paired",
    "delong_variance",
    "encode",
    "export_nomogram",
    "extract_features",
    "fit_logistic",
    "fit_multivariable",
    "icc_filter",
    "import_nomogram",
    "lasso_select",
    "load_cohort",
    "moment_ellipse",
    "paper_fixture_nomogram",
    "region_moments",
    "roc_auc",
    "run_pipeline",
    "score",
    "screen_univariable",
    "univariable_auc",
    "youden_threshold",
]
