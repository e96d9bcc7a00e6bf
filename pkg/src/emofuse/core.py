"""Canonical emotion labels and probability-vector arithmetic.

Everything here is an immutable value or a pure function, safe to use from
any number of workers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .errors import AllZero, NegativeMass, ValidationError

logger = logging.getLogger(__name__)

# Sum of a valid probability vector may drift from 1 by at most this much.
SUM_TOLERANCE = 1e-6
# Ingested vectors drifting past this are rejected instead of renormalized.
INGEST_TOLERANCE = 1e-3


class EmotionLabel(Enum):
    """The six emotions shared by both datasets, in canonical order."""

    ANGER = "anger"
    DISGUST = "disgust"
    FEARFUL = "fearful"
    HAPPY = "happy"
    NEUTRAL = "neutral"
    SAD = "sad"

    def __str__(self) -> str:
        return self.value

    @property
    def index(self) -> int:
        return _LABEL_INDEX[self]


CANONICAL_LABELS: tuple[EmotionLabel, ...] = tuple(EmotionLabel)
_LABEL_INDEX = {label: i for i, label in enumerate(CANONICAL_LABELS)}
N_LABELS = len(CANONICAL_LABELS)


def parse_label(name: str) -> EmotionLabel:
    """Parse the lowercase name of a canonical label."""
    try:
        return EmotionLabel(name)
    except ValueError:
        raise ValidationError(f"unknown emotion label {name!r}") from None


class TieBreakPolicy(Enum):
    """How argmax resolves exactly equal maxima."""

    LOWEST_INDEX = "lowest_index"
    HIGHEST_INDEX = "highest_index"


class Modality(Enum):
    AUDIO = "audio"
    VIDEO = "video"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ProbabilityVector:
    """A distribution over the six labels in canonical order.

    Components are non-negative and sum to 1 within SUM_TOLERANCE.
    """

    mass: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.mass) != N_LABELS:
            raise ValidationError(
                f"expected {N_LABELS} components, got {len(self.mass)}"
            )
        if any(m < 0.0 for m in self.mass):
            raise NegativeMass(f"negative component in {self.mass}")
        total = sum(self.mass)
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise ValidationError(
                f"components sum to {total!r}, expected 1 within {SUM_TOLERANCE}"
            )

    def __getitem__(self, key: EmotionLabel | int) -> float:
        if isinstance(key, EmotionLabel):
            return self.mass[key.index]
        return self.mass[key]

    def as_dict(self) -> dict[str, float]:
        """Map each label name to its mass, in canonical order."""
        return {label.value: self.mass[i] for i, label in enumerate(CANONICAL_LABELS)}

    @classmethod
    def from_mapping(cls, probs: Mapping[str, float]) -> "ProbabilityVector":
        """Build from a label-name -> mass mapping; missing labels get 0."""
        return cls(mass_from_mapping(probs))


def mass_from_mapping(probs: Mapping[str, float]) -> tuple[float, ...]:
    """Raw canonical-order masses from a label-name mapping (no sum check)."""
    unknown = set(probs) - {label.value for label in CANONICAL_LABELS}
    if unknown:
        raise ValidationError(f"unknown labels in mapping: {sorted(unknown)}")
    return tuple(float(probs.get(label.value, 0.0)) for label in CANONICAL_LABELS)


def normalize(raw: Sequence[float]) -> ProbabilityVector:
    """Rescale non-negative masses so they sum to 1.

    Raises AllZero when every component is zero and NegativeMass when any
    component is negative.
    """
    if len(raw) != N_LABELS:
        raise ValidationError(f"expected {N_LABELS} components, got {len(raw)}")
    if any(m < 0.0 for m in raw):
        raise NegativeMass(f"negative component in {tuple(raw)}")
    total = sum(raw)
    if total == 0.0:
        raise AllZero("cannot normalize an all-zero mass vector")
    return ProbabilityVector(tuple(m / total for m in raw))


def ingest(raw: Sequence[float], context: str = "") -> ProbabilityVector:
    """Validate an externally supplied vector against the ingestion policy.

    Sums off by more than INGEST_TOLERANCE are rejected; drifts between
    SUM_TOLERANCE and INGEST_TOLERANCE are renormalized with a warning;
    anything tighter is accepted as-is.
    """
    if len(raw) != N_LABELS:
        raise ValidationError(f"{context}expected {N_LABELS} components, got {len(raw)}")
    if any(m < 0.0 for m in raw):
        raise NegativeMass(f"{context}negative component in {tuple(raw)}")
    total = sum(raw)
    deviation = abs(total - 1.0)
    if deviation > INGEST_TOLERANCE:
        raise ValidationError(
            f"{context}components sum to {total!r}; "
            f"deviation exceeds the {INGEST_TOLERANCE} ingestion gate"
        )
    if deviation > SUM_TOLERANCE:
        logger.warning(
            "%srenormalizing vector whose components sum to %r", context, total
        )
        return normalize(raw)
    return ProbabilityVector(tuple(float(m) for m in raw))


def argmax_label(
    probs: ProbabilityVector,
    tie_break: TieBreakPolicy = TieBreakPolicy.LOWEST_INDEX,
) -> tuple[EmotionLabel, float]:
    """Return the label attaining the maximum component and that component.

    Exact ties go to the lowest canonical index under the default policy.
    """
    best = max(probs.mass)
    indices = [i for i, m in enumerate(probs.mass) if m == best]
    winner = indices[0] if tie_break is TieBreakPolicy.LOWEST_INDEX else indices[-1]
    return CANONICAL_LABELS[winner], best


@dataclass(frozen=True)
class ModalityPrediction:
    """One model's output for one clip: distribution, argmax label, confidence."""

    modality: Modality
    probs: ProbabilityVector
    label: EmotionLabel
    confidence: float

    def __post_init__(self) -> None:
        if self.confidence != self.probs[self.label]:
            raise ValidationError(
                f"confidence {self.confidence!r} != probability of {self.label}"
            )
        if any(m > self.confidence for m in self.probs.mass):
            raise ValidationError(f"{self.label} is not an argmax of {self.probs.mass}")

    @classmethod
    def from_probs(
        cls,
        modality: Modality,
        probs: ProbabilityVector,
        tie_break: TieBreakPolicy = TieBreakPolicy.LOWEST_INDEX,
    ) -> "ModalityPrediction":
        label, confidence = argmax_label(probs, tie_break)
        return cls(modality=modality, probs=probs, label=label, confidence=confidence)


def uniform_vector() -> ProbabilityVector:
    """The maximum-entropy distribution (1/6 everywhere)."""
    return ProbabilityVector(tuple(1.0 / N_LABELS for _ in range(N_LABELS)))


def one_hot(label: EmotionLabel) -> ProbabilityVector:
    """All mass on a single label."""
    return ProbabilityVector(
        tuple(1.0 if i == label.index else 0.0 for i in range(N_LABELS))
    )


def permute(probs: ProbabilityVector, mapping: Mapping[EmotionLabel, EmotionLabel]) -> ProbabilityVector:
    """Relabel a vector: mass of label L moves to mapping[L]."""
    mass = [0.0] * N_LABELS
    for label in CANONICAL_LABELS:
        mass[mapping[label].index] = probs[label]
    return ProbabilityVector(tuple(mass))


def labels_from_names(names: Iterable[str]) -> list[EmotionLabel]:
    return [parse_label(name) for name in names]
