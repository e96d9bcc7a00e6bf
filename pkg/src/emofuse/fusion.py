"""The five decision rules that combine an audio and a video prediction.

All functions are pure; every blended output is a valid distribution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

from .core import (
    EmotionLabel,
    ModalityPrediction,
    N_LABELS,
    ProbabilityVector,
    TieBreakPolicy,
    argmax_label,
)
from .errors import (
    InvalidParams,
    MissingModality,
    NonPositiveWeight,
    ValidationError,
    ZeroConfidence,
)

if TYPE_CHECKING:
    from .evaluation import ClipRecord

AVERAGE = "average"
WEIGHTED_AVERAGE = "weighted_average"
CONFIDENCE_THRESHOLD = "confidence_threshold"
DYNAMIC_WEIGHTING = "dynamic_weighting"
RULE_BASED = "rule_based"

FUSION_METHODS: tuple[str, ...] = (
    AVERAGE,
    WEIGHTED_AVERAGE,
    CONFIDENCE_THRESHOLD,
    DYNAMIC_WEIGHTING,
    RULE_BASED,
)


class DynamicMode(Enum):
    """How dynamic weighting turns confidences into weights."""

    INVERSE_CONFIDENCE = "inverse_confidence"
    PROPORTIONAL_CONFIDENCE = "proportional_confidence"


class Provenance(Enum):
    BLENDED = "blended"
    AUDIO_SELECTED = "audio_selected"
    VIDEO_SELECTED = "video_selected"
    AGREED = "agreed"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class FusionConfig:
    """Thresholds, weights, and tie-break policy for the decision methods.

    Weights default to None and are resolved from manifest model metadata
    (holdout accuracies) when the weighted method is evaluated.
    """

    method: str = AVERAGE
    video_conf_threshold: float = 0.7
    agreement_threshold: float = 0.5
    weight_audio: float | None = None
    weight_video: float | None = None
    dynamic_mode: DynamicMode = DynamicMode.INVERSE_CONFIDENCE
    tie_break: TieBreakPolicy = field(default=TieBreakPolicy.LOWEST_INDEX)

    def __post_init__(self) -> None:
        if self.method not in FUSION_METHODS:
            raise InvalidParams(f"unknown fusion method {self.method!r}")
        for name, value in (
            ("video_conf_threshold", self.video_conf_threshold),
            ("agreement_threshold", self.agreement_threshold),
        ):
            if not 0.0 <= value <= 1.0:
                raise InvalidParams(f"{name} must be in [0, 1], got {value!r}")
        for name, value in (
            ("weight_audio", self.weight_audio),
            ("weight_video", self.weight_video),
        ):
            if value is not None and value <= 0.0:
                raise NonPositiveWeight(f"{name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class FusedPrediction:
    """The final decision for one clip.

    fused_probs is None for selection-style outcomes that pick one modality's
    label without blending a vector.
    """

    label: EmotionLabel
    confidence: float
    fused_probs: ProbabilityVector | None
    method: str
    provenance: Provenance

    def __post_init__(self) -> None:
        if self.fused_probs is not None:
            expected, conf = argmax_label(self.fused_probs)
            if self.fused_probs[self.label] != conf or self.confidence != conf:
                raise ValidationError(
                    "label/confidence disagree with the blended vector"
                )


def _blend(
    audio: ProbabilityVector,
    video: ProbabilityVector,
    w_audio: float,
    w_video: float,
    method: str,
    tie_break: TieBreakPolicy,
) -> FusedPrediction:
    total = w_audio + w_video
    mass = tuple(
        (w_audio * audio[i] + w_video * video[i]) / total for i in range(N_LABELS)
    )
    probs = ProbabilityVector(mass)
    label, confidence = argmax_label(probs, tie_break)
    return FusedPrediction(
        label=label,
        confidence=confidence,
        fused_probs=probs,
        method=method,
        provenance=Provenance.BLENDED,
    )


def fuse_average(
    audio: ProbabilityVector,
    video: ProbabilityVector,
    tie_break: TieBreakPolicy = TieBreakPolicy.LOWEST_INDEX,
) -> FusedPrediction:
    """Component-wise mean of the two distributions."""
    return _blend(audio, video, 0.5, 0.5, AVERAGE, tie_break)


def fuse_weighted_average(
    audio: ProbabilityVector,
    video: ProbabilityVector,
    w_audio: float,
    w_video: float,
    tie_break: TieBreakPolicy = TieBreakPolicy.LOWEST_INDEX,
) -> FusedPrediction:
    """Mean scaled by per-model weights (normally the holdout accuracies).

    The output is normalized by the weight total so it stays a distribution;
    the argmax is invariant to that normalization.
    """
    if w_audio <= 0.0:
        raise NonPositiveWeight(f"audio weight must be > 0, got {w_audio!r}")
    if w_video <= 0.0:
        raise NonPositiveWeight(f"video weight must be > 0, got {w_video!r}")
    return _blend(audio, video, w_audio, w_video, WEIGHTED_AVERAGE, tie_break)


def fuse_confidence_threshold(
    audio: ModalityPrediction,
    video: ModalityPrediction,
    threshold: float = 0.7,
    tie_break: TieBreakPolicy = TieBreakPolicy.LOWEST_INDEX,
) -> FusedPrediction:
    """Trust the video model outright when it is confident enough.

    Video confidence strictly above the threshold selects the video label;
    otherwise the clip falls through to plain averaging.
    """
    if not 0.0 <= threshold <= 1.0:
        raise InvalidParams(f"threshold must be in [0, 1], got {threshold!r}")
    if video.confidence > threshold:
        return FusedPrediction(
            label=video.label,
            confidence=video.confidence,
            fused_probs=None,
            method=CONFIDENCE_THRESHOLD,
            provenance=Provenance.VIDEO_SELECTED,
        )
    blended = _blend(audio.probs, video.probs, 0.5, 0.5, CONFIDENCE_THRESHOLD, tie_break)
    return blended


def fuse_dynamic_weighting(
    audio: ModalityPrediction,
    video: ModalityPrediction,
    mode: DynamicMode = DynamicMode.INVERSE_CONFIDENCE,
    tie_break: TieBreakPolicy = TieBreakPolicy.LOWEST_INDEX,
) -> FusedPrediction:
    """Blend with weights derived from the two prediction confidences.

    inverse_confidence weights each model by 1/confidence (the less confident
    model counts more); proportional_confidence weights by confidence itself.
    Weights are normalized to sum to 1 before blending.
    """
    conf_a, conf_v = audio.confidence, video.confidence
    if conf_a <= 0.0 or conf_v <= 0.0:
        # Unreachable for valid vectors (max component >= 1/6), guarded anyway.
        raise ZeroConfidence("dynamic weighting needs strictly positive confidences")
    if mode is DynamicMode.INVERSE_CONFIDENCE:
        raw_a, raw_v = 1.0 / conf_a, 1.0 / conf_v
    else:
        raw_a, raw_v = conf_a, conf_v
    w_a = raw_a / (raw_a + raw_v)
    return _blend(audio.probs, video.probs, w_a, 1.0 - w_a, DYNAMIC_WEIGHTING, tie_break)


def fuse_rule_based(
    audio: ModalityPrediction,
    video: ModalityPrediction,
    agreement_threshold: float = 0.5,
) -> FusedPrediction:
    """Return the agreed label when both models are confident, else the more
    confident model's label.

    Agreement requires identical labels with both confidences strictly above
    the threshold; the agreed confidence is the larger of the two. The
    fallback tie (equal confidences, different labels) goes to video, the
    stronger standalone model.
    """
    if not 0.0 <= agreement_threshold <= 1.0:
        raise InvalidParams(
            f"agreement_threshold must be in [0, 1], got {agreement_threshold!r}"
        )
    if (
        audio.label is video.label
        and audio.confidence > agreement_threshold
        and video.confidence > agreement_threshold
    ):
        return FusedPrediction(
            label=audio.label,
            confidence=max(audio.confidence, video.confidence),
            fused_probs=None,
            method=RULE_BASED,
            provenance=Provenance.AGREED,
        )
    if audio.confidence > video.confidence:
        winner, provenance = audio, Provenance.AUDIO_SELECTED
    else:
        winner, provenance = video, Provenance.VIDEO_SELECTED
    return FusedPrediction(
        label=winner.label,
        confidence=winner.confidence,
        fused_probs=None,
        method=RULE_BASED,
        provenance=provenance,
    )


def fuse(clip: "ClipRecord", config: FusionConfig) -> FusedPrediction:
    """Dispatch a two-modality clip to the configured decision method."""
    if clip.audio is None or clip.video is None:
        missing = "audio" if clip.audio is None else "video"
        raise MissingModality(f"clip {clip.clip_id!r} lacks the {missing} modality")
    audio, video = clip.audio, clip.video
    if config.method == AVERAGE:
        return fuse_average(audio.probs, video.probs, config.tie_break)
    if config.method == WEIGHTED_AVERAGE:
        missing = [
            name
            for name, value in (
                ("weight_audio", config.weight_audio),
                ("weight_video", config.weight_video),
            )
            if value is None
        ]
        if missing:
            raise ValidationError(
                "weighted_average requires " + " and ".join(missing)
                + " (pass weights or provide model holdout accuracies)"
            )
        return fuse_weighted_average(
            audio.probs, video.probs, config.weight_audio, config.weight_video, config.tie_break
        )
    if config.method == CONFIDENCE_THRESHOLD:
        return fuse_confidence_threshold(
            audio, video, config.video_conf_threshold, config.tie_break
        )
    if config.method == DYNAMIC_WEIGHTING:
        return fuse_dynamic_weighting(audio, video, config.dynamic_mode, config.tie_break)
    return fuse_rule_based(audio, video, config.agreement_threshold)
