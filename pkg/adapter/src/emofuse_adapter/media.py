"""Demux media files and prepare model inputs.

Video frames come from OpenCV's FFmpeg backend; the audio track is decoded
and resampled to 16 kHz mono by the bundled libav extension.
"""

from __future__ import annotations

from dataclasses import dataclass

import cv2
import numpy as np

from . import _libav
from .errors import DecodeError, EmptyVideo, NoVideoStream

AUDIO_SAMPLE_RATE = 16000
FRAME_SIZE = 224
DEFAULT_FRAME_COUNT = 32


@dataclass
class MediaClip:
    """Decoded media: optional 16 kHz mono waveform plus frames in order."""

    source_path: str
    audio_track: np.ndarray | None
    frames: list[np.ndarray]


@dataclass
class FrameSample:
    """Model-ready frames: fixed count, FRAME_SIZE x FRAME_SIZE, RGB."""

    frames: list[np.ndarray]


def demux(path: str) -> MediaClip:
    """Split a container into a 16 kHz mono waveform and decoded frames.

    Raises DecodeError for unreadable inputs and NoVideoStream when the
    container carries no video track.
    """
    try:
        has_video, has_audio = _libav.probe_streams(str(path))
    except RuntimeError as exc:
        raise DecodeError(str(exc)) from exc
    if not has_video:
        raise NoVideoStream(f"{path}: no video stream")

    audio = None
    if has_audio:
        try:
            raw = _libav.decode_audio(str(path), AUDIO_SAMPLE_RATE)
        except RuntimeError as exc:
            raise DecodeError(f"{path}: audio decode failed: {exc}") from exc
        if raw is not None:
            audio = np.frombuffer(raw, dtype=np.float32)

    capture = cv2.VideoCapture(str(path))
    frames: list[np.ndarray] = []
    try:
        while True:
            ok, frame = capture.read()
            if not ok:
                break
            frames.append(cv2.cvtColor(frame, cv2.COLOR_BGR2RGB))
    finally:
        capture.release()
    if not frames:
        raise DecodeError(f"{path}: video stream present but no frame decoded")
    return MediaClip(source_path=str(path), audio_track=audio, frames=frames)


def sample_frames(clip: MediaClip, count: int = DEFAULT_FRAME_COUNT) -> FrameSample:
    """Pick `count` uniformly spaced frames and resize them for the model.

    Index i maps to floor(i * n / count); clips shorter than `count` frames
    repeat endpoints.
    """
    if count <= 0:
        raise ValueError(f"count must be > 0, got {count}")
    n = len(clip.frames)
    if n == 0:
        raise EmptyVideo(f"{clip.source_path}: clip has no frames")
    sampled = []
    for i in range(count):
        frame = clip.frames[i * n // count]
        sampled.append(cv2.resize(frame, (FRAME_SIZE, FRAME_SIZE), interpolation=cv2.INTER_AREA))
    return FrameSample(frames=sampled)


def fit_duration(waveform: np.ndarray, seconds: float, rate: int = AUDIO_SAMPLE_RATE) -> np.ndarray:
    """Pad or truncate symmetrically to a fixed window.

    Keeps the center of longer clips and zero-pads shorter ones evenly on
    both sides.
    """
    target = int(round(seconds * rate))
    n = len(waveform)
    if n == target:
        return waveform
    if n > target:
        start = (n - target) // 2
        return waveform[start:start + target]
    pad = target - n
    left = pad // 2
    return np.pad(waveform, (left, pad - left))
