"""Run the fine-tuned audio/video classifier checkpoints.

Checkpoints are transformers model directories (a wav2vec2-style audio
classifier and a ViViT-style video classifier fine-tuned to the six
emotions). Output distributions are re-mapped from each checkpoint's own
label order onto the canonical alphabetical order, whatever order the config
declares.
"""

from __future__ import annotations

import os

import numpy as np
import torch

from .errors import CheckpointMissing, InferenceError
from .media import AUDIO_SAMPLE_RATE, FrameSample, fit_duration

CANONICAL_LABELS = ("anger", "disgust", "fearful", "happy", "neutral", "sad")

DEFAULT_AUDIO_WINDOW_SECONDS = 4.0


def _resolve_device(device: str) -> torch.device:
    if device == "cpu":
        return torch.device("cpu")
    if device == "gpu":
        if not torch.cuda.is_available():
            raise InferenceError("gpu requested but CUDA is not available")
        return torch.device("cuda")
    raise InferenceError(f"unknown device {device!r} (expected cpu or gpu)")


def _canonical_permutation(id2label: dict) -> list[int]:
    """Model label index for each canonical position."""
    by_name = {str(name).lower(): int(index) for index, name in id2label.items()}
    missing = [name for name in CANONICAL_LABELS if name not in by_name]
    if missing or len(by_name) != len(CANONICAL_LABELS):
        raise InferenceError(
            f"checkpoint labels {sorted(by_name)} do not match the six canonical emotions"
        )
    return [by_name[name] for name in CANONICAL_LABELS]


def _to_distribution(logits: torch.Tensor, permutation: list[int]) -> dict[str, float]:
    probs = torch.softmax(logits.squeeze(0).float(), dim=-1).tolist()
    ordered = [probs[i] for i in permutation]
    total = sum(ordered)
    if not np.isfinite(total) or total <= 0.0:
        raise InferenceError("model produced a degenerate distribution")
    return {name: value / total for name, value in zip(CANONICAL_LABELS, ordered)}


class AudioClassifier:
    """Six-emotion classifier over 16 kHz mono waveforms."""

    def __init__(
        self,
        checkpoint: str,
        device: str = "cpu",
        window_seconds: float = DEFAULT_AUDIO_WINDOW_SECONDS,
    ):
        from transformers import AutoFeatureExtractor, AutoModelForAudioClassification

        if not os.path.isdir(checkpoint):
            raise CheckpointMissing(f"audio checkpoint {checkpoint!r} not found")
        self.checkpoint_id = os.path.basename(os.path.normpath(checkpoint))
        self.window_seconds = window_seconds
        self.device = _resolve_device(device)
        try:
            self.extractor = AutoFeatureExtractor.from_pretrained(checkpoint)
            self.model = AutoModelForAudioClassification.from_pretrained(checkpoint)
        except Exception as exc:
            raise CheckpointMissing(f"cannot load audio checkpoint: {exc}") from exc
        self.model.to(self.device)
        self.model.eval()
        self.permutation = _canonical_permutation(self.model.config.id2label)

    def infer(self, waveform: np.ndarray) -> dict[str, float]:
        """Distribution over the canonical labels for one waveform."""
        if waveform is None or len(waveform) == 0:
            raise InferenceError("empty waveform")
        windowed = fit_duration(np.asarray(waveform, dtype=np.float32), self.window_seconds)
        inputs = self.extractor(
            windowed, sampling_rate=AUDIO_SAMPLE_RATE, return_tensors="pt"
        ).to(self.device)
        try:
            with torch.no_grad():
                logits = self.model(**inputs).logits
        except Exception as exc:
            raise InferenceError(f"audio inference failed: {exc}") from exc
        return _to_distribution(logits.cpu(), self.permutation)


class VideoClassifier:
    """Six-emotion classifier over fixed-length frame samples."""

    def __init__(self, checkpoint: str, device: str = "cpu"):
        from transformers import AutoImageProcessor, AutoModelForVideoClassification

        if not os.path.isdir(checkpoint):
            raise CheckpointMissing(f"video checkpoint {checkpoint!r} not found")
        self.checkpoint_id = os.path.basename(os.path.normpath(checkpoint))
        self.device = _resolve_device(device)
        try:
            self.processor = AutoImageProcessor.from_pretrained(checkpoint)
            self.model = AutoModelForVideoClassification.from_pretrained(checkpoint)
        except Exception as exc:
            raise CheckpointMissing(f"cannot load video checkpoint: {exc}") from exc
        self.model.to(self.device)
        self.model.eval()
        self.permutation = _canonical_permutation(self.model.config.id2label)
        self.frame_count = int(getattr(self.model.config, "num_frames", 32))

    def infer(self, sample: FrameSample) -> dict[str, float]:
        """Distribution over the canonical labels for one frame sample."""
        if len(sample.frames) != self.frame_count:
            raise InferenceError(
                f"model expects {self.frame_count} frames, got {len(sample.frames)}"
            )
        inputs = self.processor(list(sample.frames), return_tensors="pt").to(self.device)
        try:
            with torch.no_grad():
                logits = self.model(**inputs).logits
        except Exception as exc:
            raise InferenceError(f"video inference failed: {exc}") from exc
        return _to_distribution(logits.cpu(), self.permutation)
