"""Batch RAVDESS media files into an emofuse probability manifest.

The manifest JSON written here follows the engine's documented schema; the
engine itself is only ever consumed through that file format (plus its
`validate` subcommand in the tests), never imported.
"""

from __future__ import annotations

import json
import logging
import os
import re
from dataclasses import dataclass

from .errors import AdapterError, UnsupportedName
from .media import demux, sample_frames
from .models import AudioClassifier, VideoClassifier

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"

# RAVDESS emotion codes that exist in the canonical six-label vocabulary
# (calm and surprised do not).
RAVDESS_CODE_TO_LABEL = {
    1: "neutral",
    3: "happy",
    4: "sad",
    5: "anger",
    6: "fearful",
    7: "disgust",
}

_RAVDESS_NAME = re.compile(r"(\d{2})-(\d{2})-(\d{2})-(\d{2})-(\d{2})-(\d{2})-(\d{2})")


def ground_truth_from_name(path: str) -> str:
    """Canonical emotion encoded in a RAVDESS basename.

    Raises UnsupportedName for non-RAVDESS names and for the calm/surprised
    emotions that the six-label vocabulary does not cover.
    """
    stem = os.path.splitext(os.path.basename(path))[0]
    match = _RAVDESS_NAME.fullmatch(stem)
    if not match:
        raise UnsupportedName(f"{path!r} is not a RAVDESS filename")
    emotion = int(match.group(3))
    label = RAVDESS_CODE_TO_LABEL.get(emotion)
    if label is None:
        raise UnsupportedName(f"{path!r}: emotion code {emotion:02d} has no canonical label")
    return label


@dataclass
class ExportResult:
    manifest_path: str
    exported: list[str]
    skipped: dict[str, str]


def export_manifest(
    paths: list[str],
    out: str,
    audio: AudioClassifier,
    video: VideoClassifier,
    audio_accuracy: float | None = None,
    video_accuracy: float | None = None,
) -> ExportResult:
    """Run both classifiers over every clip and write the manifest.

    Per-clip failures (unsupported names, undecodable media, inference
    errors) skip that clip with a warning instead of aborting the batch.
    """
    clips = []
    exported: list[str] = []
    skipped: dict[str, str] = {}
    for path in paths:
        clip_id = os.path.splitext(os.path.basename(path))[0]
        try:
            truth = ground_truth_from_name(path)
            media = demux(path)
            entry = {
                "clip_id": clip_id,
                "dataset": "ravdess",
                "ground_truth": truth,
                "video": {"probs": video.infer(sample_frames(media, video.frame_count))},
            }
            if media.audio_track is not None:
                entry["audio"] = {"probs": audio.infer(media.audio_track)}
            clips.append(entry)
            exported.append(clip_id)
        except AdapterError as exc:
            logger.warning("skipping %s: %s", path, exc)
            skipped[clip_id] = str(exc)
    clips.sort(key=lambda c: c["clip_id"])

    def model_entry(classifier, accuracy):
        entry = {"id": classifier.checkpoint_id}
        if accuracy is not None:
            entry["holdout_accuracy"] = accuracy
        return entry

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "models": {
            "audio": model_entry(audio, audio_accuracy),
            "video": model_entry(video, video_accuracy),
        },
        "clips": clips,
    }
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return ExportResult(manifest_path=out, exported=exported, skipped=skipped)
