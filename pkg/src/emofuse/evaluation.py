"""Manifest loading, per-method evaluation, and the metric suite.

Per-clip prediction is embarrassingly parallel in principle; this
implementation walks clips in clip_id order so reports are deterministic.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .core import (
    CANONICAL_LABELS,
    EmotionLabel,
    Modality,
    ModalityPrediction,
    N_LABELS,
    parse_label,
    ingest,
)
from .errors import (
    DomainError,
    EmptyInput,
    InvalidParams,
    IoError,
    LengthMismatch,
    NoEligibleClips,
    SchemaError,
    ValidationError,
)
from .fusion import FUSION_METHODS, FusionConfig, fuse

SCHEMA_VERSIONS = ("1.0",)
DATASETS = ("ravdess", "crema_d", "synthetic")

AUDIO_ONLY = "audio_only"
VIDEO_ONLY = "video_only"
UNIMODAL_METHODS: tuple[str, ...] = (AUDIO_ONLY, VIDEO_ONLY)
# Presentation order for reports: unimodal baselines first, then the five
# decision methods.
METHOD_ORDER: tuple[str, ...] = UNIMODAL_METHODS + FUSION_METHODS


@dataclass(frozen=True)
class ClipRecord:
    """One media clip: identity, ground truth, and per-modality predictions."""

    clip_id: str
    dataset: str
    ground_truth: EmotionLabel
    audio: ModalityPrediction | None = None
    video: ModalityPrediction | None = None


@dataclass(frozen=True)
class ModelInfo:
    """Identity and holdout accuracy of one upstream model."""

    id: str
    holdout_accuracy: float | None = None


@dataclass(frozen=True)
class Manifest:
    """A validated collection of clips plus model metadata."""

    schema_version: str
    clips: tuple[ClipRecord, ...]
    models: dict[str, ModelInfo] = field(default_factory=dict)

    def sorted_clips(self) -> list[ClipRecord]:
        return sorted(self.clips, key=lambda c: c.clip_id)


# --- manifest serialization -------------------------------------------------

def manifest_to_dict(manifest: Manifest) -> dict:
    doc: dict = {"schema_version": manifest.schema_version}
    if manifest.models:
        doc["models"] = {
            key: (
                {"id": info.id}
                if info.holdout_accuracy is None
                else {"id": info.id, "holdout_accuracy": info.holdout_accuracy}
            )
            for key, info in manifest.models.items()
        }
    clips = []
    for clip in manifest.sorted_clips():
        entry: dict = {
            "clip_id": clip.clip_id,
            "dataset": clip.dataset,
            "ground_truth": clip.ground_truth.value,
        }
        if clip.audio is not None:
            entry["audio"] = {"probs": clip.audio.probs.as_dict()}
        if clip.video is not None:
            entry["video"] = {"probs": clip.video.probs.as_dict()}
        clips.append(entry)
    doc["clips"] = clips
    return doc


def manifest_to_json_bytes(manifest: Manifest) -> bytes:
    """Canonical serialization: sorted keys, two-space indent, one newline."""
    return (json.dumps(manifest_to_dict(manifest), sort_keys=True, indent=2) + "\n").encode("utf-8")


def manifest_digest(manifest: Manifest) -> str:
    """sha256 over the canonical serialization, hex encoded."""
    return hashlib.sha256(manifest_to_json_bytes(manifest)).hexdigest()


def save_manifest(manifest: Manifest, path) -> str:
    """Write the canonical JSON form; returns its digest."""
    data = manifest_to_json_bytes(manifest)
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise IoError(f"cannot write manifest {path!r}: {exc}") from exc
    return hashlib.sha256(data).hexdigest()


def _require(mapping: Mapping, key: str, kind: type, where: str):
    if key not in mapping:
        raise SchemaError(f"{where}: missing field {key!r}")
    value = mapping[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaError(f"{where}: field {key!r} must be a number")
        return float(value)
    if not isinstance(value, kind):
        raise SchemaError(f"{where}: field {key!r} must be {kind.__name__}")
    return value


def _prediction_from_dict(entry, modality: Modality, where: str) -> ModalityPrediction:
    if not isinstance(entry, dict):
        raise SchemaError(f"{where}: {modality} must be an object")
    extra = set(entry) - {"probs"}
    if extra:
        raise SchemaError(f"{where}: unknown {modality} fields {sorted(extra)}")
    probs = _require(entry, "probs", dict, where)
    expected = {label.value for label in CANONICAL_LABELS}
    if set(probs) != expected:
        raise SchemaError(
            f"{where}: {modality} probs must carry exactly the six canonical labels"
        )
    raw = []
    for label in CANONICAL_LABELS:
        value = probs[label.value]
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaError(f"{where}: {modality} prob for {label} must be a number")
        raw.append(float(value))
    try:
        vector = ingest(raw, context=f"{where} {modality}: ")
    except DomainError as exc:
        raise ValidationError(str(exc)) from exc
    return ModalityPrediction.from_probs(modality, vector)


def manifest_from_dict(doc) -> Manifest:
    if not isinstance(doc, dict):
        raise SchemaError("manifest root must be an object")
    extra = set(doc) - {"schema_version", "models", "clips"}
    if extra:
        raise SchemaError(f"unknown manifest fields {sorted(extra)}")
    version = _require(doc, "schema_version", str, "manifest")
    if version not in SCHEMA_VERSIONS:
        raise SchemaError(f"unrecognized schema_version {version!r}")
    models: dict[str, ModelInfo] = {}
    for key, entry in (doc.get("models") or {}).items():
        if key not in ("audio", "video"):
            raise SchemaError(f"models: unknown key {key!r}")
        if not isinstance(entry, dict):
            raise SchemaError(f"models.{key} must be an object")
        model_id = _require(entry, "id", str, f"models.{key}")
        accuracy = None
        if "holdout_accuracy" in entry:
            accuracy = _require(entry, "holdout_accuracy", float, f"models.{key}")
            if not 0.0 < accuracy <= 1.0:
                raise ValidationError(
                    f"models.{key}: holdout_accuracy must be in (0, 1], got {accuracy}"
                )
        models[key] = ModelInfo(id=model_id, holdout_accuracy=accuracy)
    raw_clips = _require(doc, "clips", list, "manifest")
    clips: list[ClipRecord] = []
    seen: set[str] = set()
    for i, entry in enumerate(raw_clips):
        where = f"clips[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError(f"{where}: must be an object")
        extra = set(entry) - {"clip_id", "dataset", "ground_truth", "audio", "video"}
        if extra:
            raise SchemaError(f"{where}: unknown fields {sorted(extra)}")
        clip_id = _require(entry, "clip_id", str, where)
        dataset = _require(entry, "dataset", str, where)
        if dataset not in DATASETS:
            raise SchemaError(f"{where}: unknown dataset {dataset!r}")
        truth_name = _require(entry, "ground_truth", str, where)
        try:
            truth = parse_label(truth_name)
        except DomainError:
            raise SchemaError(f"{where}: unknown ground_truth {truth_name!r}") from None
        if clip_id in seen:
            raise ValidationError(f"{where}: duplicate clip_id {clip_id!r}")
        seen.add(clip_id)
        audio = video = None
        if "audio" in entry:
            audio = _prediction_from_dict(entry["audio"], Modality.AUDIO, f"{where} ({clip_id})")
        if "video" in entry:
            video = _prediction_from_dict(entry["video"], Modality.VIDEO, f"{where} ({clip_id})")
        clips.append(
            ClipRecord(
                clip_id=clip_id,
                dataset=dataset,
                ground_truth=truth,
                audio=audio,
                video=video,
            )
        )
    return Manifest(schema_version=version, clips=tuple(clips), models=models)


def load_manifest(path) -> Manifest:
    """Read, parse, and validate a manifest JSON file."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read manifest {path!r}: {exc}") from exc
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path!r} is not valid JSON: {exc}") from exc
    return manifest_from_dict(doc)


# --- metrics -----------------------------------------------------------------

@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class MetricBundle:
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    per_class: dict[EmotionLabel, ClassMetrics]


def confusion_matrix(
    predictions: Sequence[EmotionLabel], truths: Sequence[EmotionLabel]
) -> tuple[tuple[int, ...], ...]:
    """6x6 count matrix with truth on rows, prediction on columns."""
    if len(predictions) != len(truths):
        raise LengthMismatch(
            f"{len(predictions)} predictions vs {len(truths)} truths"
        )
    if not truths:
        raise EmptyInput("cannot tally an empty label list")
    counts = [[0] * N_LABELS for _ in range(N_LABELS)]
    for pred, truth in zip(predictions, truths):
        counts[truth.index][pred.index] += 1
    return tuple(tuple(row) for row in counts)


def compute_metrics(
    predictions: Sequence[EmotionLabel], truths: Sequence[EmotionLabel]
) -> MetricBundle:
    """Accuracy plus per-class precision/recall/F1 with macro and weighted means.

    Zero-division cases (no predictions or no truths for a class) score 0;
    macro averages run over the classes present in the truth list, weighted
    averages weight those classes by support.
    """
    matrix = confusion_matrix(predictions, truths)
    n = len(truths)
    accuracy = sum(matrix[i][i] for i in range(N_LABELS)) / n
    per_class: dict[EmotionLabel, ClassMetrics] = {}
    for label in CANONICAL_LABELS:
        i = label.index
        tp = matrix[i][i]
        support = sum(matrix[i])
        predicted = sum(matrix[j][i] for j in range(N_LABELS))
        precision = tp / predicted if predicted else 0.0
        recall = tp / support if support else 0.0
        f1 = (
            2.0 * precision * recall / (precision + recall)
            if precision + recall
            else 0.0
        )
        per_class[label] = ClassMetrics(precision, recall, f1, support)
    present = [label for label in CANONICAL_LABELS if per_class[label].support > 0]
    k = len(present)
    macro_p = sum(per_class[c].precision for c in present) / k
    macro_r = sum(per_class[c].recall for c in present) / k
    macro_f1 = sum(per_class[c].f1 for c in present) / k
    weighted_p = sum(per_class[c].precision * per_class[c].support for c in present) / n
    weighted_r = sum(per_class[c].recall * per_class[c].support for c in present) / n
    weighted_f1 = sum(per_class[c].f1 * per_class[c].support for c in present) / n
    return MetricBundle(
        accuracy=accuracy,
        macro_precision=macro_p,
        macro_recall=macro_r,
        macro_f1=macro_f1,
        weighted_precision=weighted_p,
        weighted_recall=weighted_r,
        weighted_f1=weighted_f1,
        per_class=per_class,
    )


# --- evaluation --------------------------------------------------------------

@dataclass(frozen=True)
class MethodMetrics:
    """One report row: the metric suite plus the confusion matrix."""

    accuracy: float
    macro_f1: float
    weighted_f1: float
    macro_precision: float
    macro_recall: float
    confusion: tuple[tuple[int, ...], ...]
    n_clips: int


@dataclass(frozen=True)
class EvaluationReport:
    per_method: dict[str, MethodMetrics]
    config_echo: FusionConfig
    manifest_digest: str


def resolve_weights(manifest: Manifest, config: FusionConfig) -> FusionConfig:
    """Fill unset fusion weights from the manifest's model accuracies."""
    w_audio, w_video = config.weight_audio, config.weight_video
    if w_audio is None and "audio" in manifest.models:
        w_audio = manifest.models["audio"].holdout_accuracy
    if w_video is None and "video" in manifest.models:
        w_video = manifest.models["video"].holdout_accuracy
    if (w_audio, w_video) == (config.weight_audio, config.weight_video):
        return config
    return replace(config, weight_audio=w_audio, weight_video=w_video)


def expand_methods(methods: Iterable[str] | str) -> tuple[str, ...]:
    """Normalize a method request ("all", names, or an iterable) to METHOD_ORDER."""
    if isinstance(methods, str):
        names = METHOD_ORDER if methods == "all" else tuple(
            m.strip() for m in methods.split(",") if m.strip()
        )
    else:
        names = tuple(methods)
    if not names:
        raise InvalidParams("at least one method must be requested")
    unknown = [m for m in names if m not in METHOD_ORDER]
    if unknown:
        raise InvalidParams(f"unknown methods {unknown}; valid: {list(METHOD_ORDER)}")
    requested = set(names)
    return tuple(m for m in METHOD_ORDER if m in requested)


def evaluate(
    manifest: Manifest,
    methods: Iterable[str] | str,
    config: FusionConfig | None = None,
) -> EvaluationReport:
    """Score the requested methods over a manifest.

    Unimodal rows run over clips carrying that modality; fusion rows run only
    over clips carrying both. Missing weights for the weighted method are
    resolved from the manifest's model metadata.
    """
    config = resolve_weights(manifest, config or FusionConfig())
    requested = expand_methods(methods)
    clips = manifest.sorted_clips()
    bimodal = [c for c in clips if c.audio is not None and c.video is not None]
    per_method: dict[str, MethodMetrics] = {}
    for method in requested:
        if method == AUDIO_ONLY:
            eligible = [c for c in clips if c.audio is not None]
            predictions = [c.audio.label for c in eligible]
        elif method == VIDEO_ONLY:
            eligible = [c for c in clips if c.video is not None]
            predictions = [c.video.label for c in eligible]
        else:
            eligible = bimodal
            method_config = replace(config, method=method)
            predictions = [fuse(c, method_config).label for c in eligible]
        if not eligible:
            raise NoEligibleClips(f"no clip in the manifest is eligible for {method!r}")
        truths = [c.ground_truth for c in eligible]
        bundle = compute_metrics(predictions, truths)
        per_method[method] = MethodMetrics(
            accuracy=bundle.accuracy,
            macro_f1=bundle.macro_f1,
            weighted_f1=bundle.weighted_f1,
            macro_precision=bundle.macro_precision,
            macro_recall=bundle.macro_recall,
            confusion=confusion_matrix(predictions, truths),
            n_clips=len(eligible),
        )
    return EvaluationReport(
        per_method=per_method,
        config_echo=config,
        manifest_digest=manifest_digest(manifest),
    )
