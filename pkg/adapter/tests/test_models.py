"""Checkpoint loading, canonical label re-mapping, and inference contracts."""

import numpy as np
import pytest

from emofuse_adapter.errors import CheckpointMissing, InferenceError
from emofuse_adapter.media import demux, sample_frames
from emofuse_adapter.models import CANONICAL_LABELS, AudioClassifier, VideoClassifier


def test_canonical_order_and_unit_sum(full_av_path, audio_clf, video_clf):
    clip = demux(full_av_path)
    audio_probs = audio_clf.infer(clip.audio_track)
    video_probs = video_clf.infer(sample_frames(clip, video_clf.frame_count))
    for probs in (audio_probs, video_probs):
        assert tuple(probs) == CANONICAL_LABELS
        assert abs(sum(probs.values()) - 1.0) <= 1e-4
        assert all(v >= 0.0 for v in probs.values())


def test_inference_is_deterministic(full_av_path, audio_clf, video_clf):
    clip = demux(full_av_path)
    first = audio_clf.infer(clip.audio_track)
    second = audio_clf.infer(clip.audio_track)
    assert max(abs(first[k] - second[k]) for k in first) <= 1e-6
    sample = sample_frames(clip, video_clf.frame_count)
    first_v = video_clf.infer(sample)
    second_v = video_clf.infer(sample)
    assert max(abs(first_v[k] - second_v[k]) for k in first_v) <= 1e-6


def test_scrambled_label_order_is_remapped(full_av_path, biased_video_checkpoints):
    """Identical weights, different id2label: the mass follows the names."""
    clip = demux(full_av_path)
    sad_model = VideoClassifier(biased_video_checkpoints["sad"])
    relabeled = VideoClassifier(biased_video_checkpoints["relabeled"])
    sample = sample_frames(clip, sad_model.frame_count)
    sad_probs = sad_model.infer(sample)
    relabeled_probs = relabeled.infer(sample)
    assert max(sad_probs, key=sad_probs.get) == "sad"
    assert sad_probs["sad"] > 0.9
    assert max(relabeled_probs, key=relabeled_probs.get) == "happy"
    assert abs(relabeled_probs["happy"] - sad_probs["sad"]) <= 1e-6


def test_missing_checkpoints(tmp_path):
    with pytest.raises(CheckpointMissing):
        AudioClassifier(str(tmp_path / "nope"))
    with pytest.raises(CheckpointMissing):
        VideoClassifier(str(tmp_path / "nope"))


def test_wrong_label_vocabulary_rejected(tmp_path):
    from conftest import _save_audio_checkpoint

    bad = {0: "happy", 1: "anger", 2: "sad", 3: "neutral", 4: "fearful", 5: "calm"}
    path = tmp_path / "bad-labels"
    _save_audio_checkpoint(path, id2label=bad)
    with pytest.raises(InferenceError):
        AudioClassifier(str(path))


def test_frame_count_mismatch(full_av_path, video_clf):
    clip = demux(full_av_path)
    short = sample_frames(clip, count=8)
    with pytest.raises(InferenceError):
        video_clf.infer(short)


def test_empty_waveform_rejected(audio_clf):
    with pytest.raises(InferenceError):
        audio_clf.infer(np.zeros(0, dtype=np.float32))


def test_gpu_requested_without_cuda(checkpoints):
    import torch

    if torch.cuda.is_available():
        pytest.skip("CUDA present; the failure branch does not apply")
    with pytest.raises(InferenceError):
        AudioClassifier(checkpoints["audio"], device="gpu")
