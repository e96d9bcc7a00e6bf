"""Filename grammars for CREMA-D and RAVDESS plus the holdout split builder.

Only names and metadata are handled here; no media is decoded.
"""

from __future__ import annotations

import os
import random
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .core import EmotionLabel
from .errors import (
    FieldOutOfRange,
    InsufficientFiles,
    MalformedName,
    NeutralStrongForbidden,
    UnknownEmotionCode,
    UnknownIntensity,
)

# --- CREMA-D ---------------------------------------------------------------

CREMA_EMOTION_CODES: dict[str, EmotionLabel] = {
    "ANG": EmotionLabel.ANGER,
    "DIS": EmotionLabel.DISGUST,
    "FEA": EmotionLabel.FEARFUL,
    "HAP": EmotionLabel.HAPPY,
    "NEU": EmotionLabel.NEUTRAL,
    "SAD": EmotionLabel.SAD,
}

CREMA_INTENSITIES = ("LO", "MD", "HI", "XX")

_ACTOR_RE = re.compile(r"\d{4}")
_SENTENCE_RE = re.compile(r"[A-Z]{3}")


@dataclass(frozen=True)
class CremaMeta:
    """Decoded fields of one CREMA-D clip name, e.g. 1001_IEO_ANG_HI.wav."""

    actor_id: int
    sentence_code: str
    emotion_code: str
    intensity: str

    def filename(self, ext: str = ".wav") -> str:
        return f"{self.actor_id:04d}_{self.sentence_code}_{self.emotion_code}_{self.intensity}{ext}"


def parse_crema_filename(name: str) -> CremaMeta:
    """Decode the four underscore-separated fields of a CREMA-D basename.

    The sentence code is accepted as any three uppercase letters; extensions
    are not validated.
    """
    stem = os.path.splitext(os.path.basename(name))[0]
    parts = stem.split("_")
    if len(parts) != 4:
        raise MalformedName(f"{name!r}: expected 4 underscore-separated fields, got {len(parts)}")
    actor, sentence, emotion, intensity = parts
    if not _ACTOR_RE.fullmatch(actor):
        raise MalformedName(f"{name!r}: actor id {actor!r} is not a 4-digit number")
    if not _SENTENCE_RE.fullmatch(sentence):
        raise MalformedName(f"{name!r}: sentence code {sentence!r} is not 3 uppercase letters")
    if emotion not in CREMA_EMOTION_CODES:
        raise UnknownEmotionCode(f"{name!r}: emotion code {emotion!r}")
    if intensity not in CREMA_INTENSITIES:
        raise UnknownIntensity(f"{name!r}: intensity {intensity!r}")
    return CremaMeta(int(actor), sentence, emotion, intensity)


# --- RAVDESS ---------------------------------------------------------------

class RavdessModality(Enum):
    FULL_AV = 1
    VIDEO_ONLY = 2
    AUDIO_ONLY = 3


class VocalChannel(Enum):
    SPEECH = 1
    SONG = 2


class RavdessIntensity(Enum):
    NORMAL = 1
    STRONG = 2


# Code -> name per the dataset's own vocabulary (calm and surprised are
# parsed here but have no canonical equivalent).
RAVDESS_EMOTION_NAMES = {
    1: "neutral",
    2: "calm",
    3: "happy",
    4: "sad",
    5: "angry",
    6: "fearful",
    7: "disgust",
    8: "surprised",
}

RAVDESS_CANONICAL: dict[int, EmotionLabel] = {
    1: EmotionLabel.NEUTRAL,
    3: EmotionLabel.HAPPY,
    4: EmotionLabel.SAD,
    5: EmotionLabel.ANGER,
    6: EmotionLabel.FEARFUL,
    7: EmotionLabel.DISGUST,
}

_TWO_DIGITS = re.compile(r"\d{2}")


@dataclass(frozen=True)
class RavdessMeta:
    """Decoded fields of one RAVDESS name, e.g. 02-01-06-01-02-01-12.mp4."""

    modality: RavdessModality
    vocal_channel: VocalChannel
    emotion_code: int
    intensity: RavdessIntensity
    statement: int
    repetition: int
    actor: int

    @property
    def sex(self) -> str:
        """Female iff the actor number is even."""
        return "female" if self.actor % 2 == 0 else "male"

    @property
    def emotion_name(self) -> str:
        return RAVDESS_EMOTION_NAMES[self.emotion_code]

    def filename(self, ext: str = ".mp4") -> str:
        fields = (
            self.modality.value,
            self.vocal_channel.value,
            self.emotion_code,
            self.intensity.value,
            self.statement,
            self.repetition,
            self.actor,
        )
        return "-".join(f"{x:02d}" for x in fields) + ext

    def counterpart(self, modality: RavdessModality) -> "RavdessMeta":
        """The same recording under a different modality code."""
        return RavdessMeta(
            modality=modality,
            vocal_channel=self.vocal_channel,
            emotion_code=self.emotion_code,
            intensity=self.intensity,
            statement=self.statement,
            repetition=self.repetition,
            actor=self.actor,
        )


_RAVDESS_RANGES = (
    ("modality", 1, 3),
    ("vocal channel", 1, 2),
    ("emotion", 1, 8),
    ("intensity", 1, 2),
    ("statement", 1, 2),
    ("repetition", 1, 2),
    ("actor", 1, 24),
)


def parse_ravdess_filename(name: str) -> RavdessMeta:
    """Decode the seven dash-separated two-digit fields of a RAVDESS basename."""
    stem = os.path.splitext(os.path.basename(name))[0]
    parts = stem.split("-")
    if len(parts) != 7:
        raise MalformedName(f"{name!r}: expected 7 dash-separated fields, got {len(parts)}")
    if not all(_TWO_DIGITS.fullmatch(p) for p in parts):
        raise MalformedName(f"{name!r}: every field must be exactly two digits")
    values = [int(p) for p in parts]
    for (field, lo, hi), value in zip(_RAVDESS_RANGES, values):
        if not lo <= value <= hi:
            raise FieldOutOfRange(f"{name!r}: {field} {value:02d} outside {lo:02d}-{hi:02d}")
    modality, channel, emotion, intensity, statement, repetition, actor = values
    if emotion == 1 and intensity == 2:
        raise NeutralStrongForbidden(f"{name!r}: neutral emotion has no strong intensity")
    return RavdessMeta(
        modality=RavdessModality(modality),
        vocal_channel=VocalChannel(channel),
        emotion_code=emotion,
        intensity=RavdessIntensity(intensity),
        statement=statement,
        repetition=repetition,
        actor=actor,
    )


def canonical_label(meta: CremaMeta | RavdessMeta) -> EmotionLabel | None:
    """Map dataset metadata onto the canonical label set.

    Returns None (not an error) for the RAVDESS calm and surprised emotions,
    which have no counterpart in the shared six-label vocabulary.
    """
    if isinstance(meta, CremaMeta):
        return CREMA_EMOTION_CODES[meta.emotion_code]
    return RAVDESS_CANONICAL.get(meta.emotion_code)


# --- holdout split ----------------------------------------------------------

@dataclass(frozen=True)
class SplitManifest:
    """A train/holdout partition of RAVDESS file names."""

    train_files: tuple[str, ...]
    holdout_files: tuple[str, ...]
    seed: int
    holdout_size: int

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "holdout_size": self.holdout_size,
            "train_files": list(self.train_files),
            "holdout_files": list(self.holdout_files),
        }


def _twin_key(meta: RavdessMeta) -> tuple:
    """Identity of a recording ignoring the modality field."""
    return (
        meta.vocal_channel,
        meta.emotion_code,
        meta.intensity,
        meta.statement,
        meta.repetition,
        meta.actor,
    )


def build_holdout_split(
    files: Sequence[str] | Iterable[str],
    holdout_size: int,
    seed: int,
    include_song: bool = False,
) -> SplitManifest:
    """Reserve full-AV files for testing and drop their video-only twins.

    Files carrying calm/surprised emotions are filtered out entirely, as are
    song-channel files unless include_song is set. The holdout is a seeded
    uniform sample without replacement over the remaining full-AV files; each
    selected file's video-only counterpart is removed from the training side.
    """
    if holdout_size < 0:
        raise InsufficientFiles(f"holdout_size must be >= 0, got {holdout_size}")
    parsed = [(name, parse_ravdess_filename(name)) for name in files]
    eligible = [
        (name, meta)
        for name, meta in parsed
        if canonical_label(meta) is not None
        and (include_song or meta.vocal_channel is VocalChannel.SPEECH)
    ]
    candidates = sorted(
        name for name, meta in eligible if meta.modality is RavdessModality.FULL_AV
    )
    if len(candidates) < holdout_size:
        raise InsufficientFiles(
            f"need {holdout_size} full-AV files, only {len(candidates)} eligible"
        )
    holdout = set(random.Random(seed).sample(candidates, holdout_size))
    removed_twins = {
        _twin_key(meta)
        for name, meta in eligible
        if name in holdout
    }
    train = [
        name
        for name, meta in eligible
        if name not in holdout
        and not (
            meta.modality is RavdessModality.VIDEO_ONLY
            and _twin_key(meta) in removed_twins
        )
    ]
    return SplitManifest(
        train_files=tuple(sorted(train)),
        holdout_files=tuple(sorted(holdout)),
        seed=seed,
        holdout_size=holdout_size,
    )
