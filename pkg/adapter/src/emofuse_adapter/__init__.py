"""Media-to-manifest adapter: demux RAVDESS clips, run the audio/video
emotion checkpoints, and export probability manifests for the fusion engine."""

from .errors import (
    AdapterError,
    CheckpointMissing,
    DecodeError,
    EmptyVideo,
    InferenceError,
    NoVideoStream,
    UnsupportedName,
)
from .export import ExportResult, export_manifest, ground_truth_from_name
from .media import FrameSample, MediaClip, demux, fit_duration, sample_frames
from .models import AudioClassifier, VideoClassifier, CANONICAL_LABELS

__version__ = "0.1.0"

__all__ = [
    "AdapterError",
    "AudioClassifier",
    "CANONICAL_LABELS",
    "CheckpointMissing",
    "DecodeError",
    "EmptyVideo",
    "ExportResult",
    "FrameSample",
    "InferenceError",
    "MediaClip",
    "NoVideoStream",
    "UnsupportedName",
    "VideoClassifier",
    "demux",
    "export_manifest",
    "fit_duration",
    "ground_truth_from_name",
    "sample_frames",
    "__version__",
]
