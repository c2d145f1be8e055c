"""Cross-lingual transfer matrix toolkit.

Computes row-normalized transfer matrices from experiment performance
logs, their aggregate diagnostics and seed-stability statistics, detects
dynamic training intervals from learning curves, implements the
verification/classification evaluation metrics, and generates synthetic
experiments with analytically known transfer structure.
"""

from .curves import (
    DynamicInterval,
    LearningCurve,
    LogisticFit,
    build_curve,
    detect_dynamic_interval,
    fit_logistic,
)
from .diagnostics import DiagnosticsReport, compute_diagnostics, row_profiles
from .errors import CltmError
from .evalmetrics import (
    LabeledPrediction,
    TrialPair,
    Utterance,
    centroid_distances,
    cosine_score,
    embed_utterance,
    macro_f1,
    make_sv_trials,
    roc_auc,
    score_trials,
    trials_auc,
)
from .heatmap import HeatmapSpec, render_heatmap
from .records import (
    BalanceManifest,
    Condition,
    LanguageId,
    MetadataRow,
    PerformanceRecord,
    TransferGrid,
    aggregate_grid,
    build_balance_manifest,
    ingest_records,
    serialize_records,
    validate_balance,
)
from .stability import StabilityReport, per_seed_cltm, stability_report
from .synth import SyntheticTruth, generate_experiment, planted_truth, preset
from .transfer import Cltm, GainMatrix, assemble_cltm, compute_gains

__version__ = "0.1.0"

__all__ = [
    "BalanceManifest",
    "Cltm",
    "CltmError",
    "Condition",
    "DiagnosticsReport",
    "DynamicInterval",
    "GainMatrix",
    "HeatmapSpec",
    "LabeledPrediction",
    "LanguageId",
    "LearningCurve",
    "LogisticFit",
    "MetadataRow",
    "PerformanceRecord",
    "StabilityReport",
    "SyntheticTruth",
    "TransferGrid",
    "TrialPair",
    "Utterance",
    "aggregate_grid",
    "assemble_cltm",
    "build_balance_manifest",
    "build_curve",
    "centroid_distances",
    "compute_diagnostics",
    "compute_gains",
    "cosine_score",
    "detect_dynamic_interval",
    "embed_utterance",
    "fit_logistic",
    "generate_experiment",
    "ingest_records",
    "macro_f1",
    "make_sv_trials",
    "per_seed_cltm",
    "planted_truth",
    "preset",
    "render_heatmap",
    "roc_auc",
    "row_profiles",
    "score_trials",
    "serialize_records",
    "stability_report",
    "trials_auc",
    "validate_balance",
]
