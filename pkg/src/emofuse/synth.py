"""Seeded synthetic probability manifests with controllable per-modality accuracy.

The generator models one thing the real classifiers exhibit and the decision
methods depend on: confidence is informative, i.e. correct predictions tend to
peak higher than wrong ones. The confidence_informativeness knob shifts the
mode-mass range by that fraction of its width (upward for correct modes,
downward for wrong ones); 0.0 makes confidence independent of correctness,
under which blending cannot beat the unimodal baselines. Modality errors are
generated independently; cross-modal error correlation is out of scope.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import (
    CANONICAL_LABELS,
    EmotionLabel,
    Modality,
    ModalityPrediction,
    N_LABELS,
    ProbabilityVector,
)
from .errors import InvalidParams
from .evaluation import Manifest, ClipRecord, EvaluationReport, ModelInfo, evaluate
from .fusion import FusionConfig

# Keeps the intended mode strictly above every residual component.
_RESIDUAL_MARGIN = 1e-6
_MAX_RESAMPLES = 10_000

DEFAULT_INFORMATIVENESS = 0.25


@dataclass(frozen=True)
class SynthParams:
    """Knobs for one synthetic manifest."""

    n_clips: int
    acc_audio: float
    acc_video: float
    seed: int
    peak_low: float = 0.5
    peak_high: float = 0.95
    confidence_informativeness: float = DEFAULT_INFORMATIVENESS

    def __post_init__(self) -> None:
        if self.n_clips <= 0:
            raise InvalidParams(f"n_clips must be > 0, got {self.n_clips}")
        for name, value in (("acc_audio", self.acc_audio), ("acc_video", self.acc_video)):
            if not 0.0 < value < 1.0:
                raise InvalidParams(f"{name} must be in (0, 1), got {value!r}")
        for name, value in (("peak_low", self.peak_low), ("peak_high", self.peak_high)):
            if not 1.0 / N_LABELS < value <= 1.0:
                raise InvalidParams(f"{name} must be in (1/6, 1], got {value!r}")
        if self.peak_low >= self.peak_high:
            raise InvalidParams(
                f"peak_low {self.peak_low!r} must be below peak_high {self.peak_high!r}"
            )
        if not 0.0 <= self.confidence_informativeness < 1.0:
            raise InvalidParams(
                "confidence_informativeness must be in [0, 1), got "
                f"{self.confidence_informativeness!r}"
            )


def _draw_vector(
    rng: random.Random,
    truth: EmotionLabel,
    accuracy: float,
    params: SynthParams,
) -> ProbabilityVector:
    correct = rng.random() < accuracy
    if correct:
        mode = truth.index
    else:
        mode = (truth.index + 1 + rng.randrange(N_LABELS - 1)) % N_LABELS
    width = params.peak_high - params.peak_low
    shift = params.confidence_informativeness * width
    if correct:
        peak = params.peak_low + shift + rng.random() * (width - shift)
    else:
        peak = params.peak_low + rng.random() * (width - shift)
    others = [i for i in range(N_LABELS) if i != mode]
    residual = 1.0 - peak
    for _ in range(_MAX_RESAMPLES):
        draws = [rng.random() for _ in others]
        total = sum(draws)
        shares = [residual * d / total for d in draws]
        if max(shares) < params.peak_low - _RESIDUAL_MARGIN:
            break
    else:
        raise InvalidParams(
            "residual split kept exceeding peak_low; peak_low is too close to 1/6"
        )
    mass = [0.0] * N_LABELS
    mass[mode] = peak
    for i, share in zip(others, shares):
        mass[i] = share
    return ProbabilityVector(tuple(mass))


def generate_manifest(params: SynthParams) -> Manifest:
    """Draw a manifest whose unimodal accuracies match the targets in expectation.

    One sequential RNG stream keyed by the seed makes the output fully
    deterministic: identical params give byte-identical manifests.
    """
    rng = random.Random(params.seed)
    clips = []
    for i in range(params.n_clips):
        truth = CANONICAL_LABELS[rng.randrange(N_LABELS)]
        audio = _draw_vector(rng, truth, params.acc_audio, params)
        video = _draw_vector(rng, truth, params.acc_video, params)
        clips.append(
            ClipRecord(
                clip_id=f"clip-{i:08d}",
                dataset="synthetic",
                ground_truth=truth,
                audio=ModalityPrediction.from_probs(Modality.AUDIO, audio),
                video=ModalityPrediction.from_probs(Modality.VIDEO, video),
            )
        )
    models = {
        "audio": ModelInfo(id="synthetic-audio", holdout_accuracy=params.acc_audio),
        "video": ModelInfo(id="synthetic-video", holdout_accuracy=params.acc_video),
    }
    return Manifest(schema_version="1.0", clips=tuple(clips), models=models)


def run_benchmark(params: SynthParams, config: FusionConfig | None = None) -> EvaluationReport:
    """Generate a manifest and score both unimodal baselines and all five methods."""
    manifest = generate_manifest(params)
    return evaluate(manifest, "all", config)
