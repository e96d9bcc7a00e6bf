"""Deterministic late-fusion decision engine and evaluation harness for
audio/video emotion probability distributions."""

from .core import (
    CANONICAL_LABELS,
    EmotionLabel,
    Modality,
    ModalityPrediction,
    ProbabilityVector,
    TieBreakPolicy,
    argmax_label,
    normalize,
)
from .datasets import (
    CremaMeta,
    RavdessMeta,
    SplitManifest,
    build_holdout_split,
    canonical_label,
    parse_crema_filename,
    parse_ravdess_filename,
)
from .evaluation import (
    ClipRecord,
    EvaluationReport,
    Manifest,
    compute_metrics,
    confusion_matrix,
    evaluate,
    load_manifest,
    save_manifest,
)
from .fusion import (
    DynamicMode,
    FusedPrediction,
    FusionConfig,
    Provenance,
    fuse,
    fuse_average,
    fuse_confidence_threshold,
    fuse_dynamic_weighting,
    fuse_rule_based,
    fuse_weighted_average,
)
from .reports import render_report, report_from_json
from .synth import SynthParams, generate_manifest, run_benchmark

__version__ = "0.1.0"

__all__ = [
    "CANONICAL_LABELS",
    "ClipRecord",
    "CremaMeta",
    "DynamicMode",
    "EmotionLabel",
    "EvaluationReport",
    "FusedPrediction",
    "FusionConfig",
    "Manifest",
    "Modality",
    "ModalityPrediction",
    "ProbabilityVector",
    "Provenance",
    "RavdessMeta",
    "SplitManifest",
    "SynthParams",
    "TieBreakPolicy",
    "argmax_label",
    "build_holdout_split",
    "canonical_label",
    "compute_metrics",
    "confusion_matrix",
    "evaluate",
    "fuse",
    "fuse_average",
    "fuse_confidence_threshold",
    "fuse_dynamic_weighting",
    "fuse_rule_based",
    "fuse_weighted_average",
    "generate_manifest",
    "load_manifest",
    "normalize",
    "parse_crema_filename",
    "parse_ravdess_filename",
    "render_report",
    "report_from_json",
    "run_benchmark",
    "save_manifest",
    "__version__",
]
