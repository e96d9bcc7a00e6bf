import json
import os
import shutil

os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")
os.environ.setdefault("HF_HUB_DISABLE_PROGRESS_BARS", "1")

import pytest
import torch
from transformers import (
    VivitConfig,
    VivitForVideoClassification,
    VivitImageProcessor,
    Wav2Vec2Config,
    Wav2Vec2FeatureExtractor,
    Wav2Vec2ForSequenceClassification,
)
from transformers.utils import logging as hf_logging

from emofuse_adapter import _libav
from emofuse_adapter.models import AudioClassifier, VideoClassifier

hf_logging.set_verbosity_error()
hf_logging.disable_progress_bar()

# Deliberately scrambled: the canonical order is alphabetical, the checkpoints
# must be re-mapped from whatever order the config declares.
SCRAMBLED = {0: "happy", 1: "anger", 2: "sad", 3: "neutral", 4: "fearful", 5: "disgust"}


def _save_audio_checkpoint(path, id2label=SCRAMBLED, bias_label=None):
    torch.manual_seed(7)
    config = Wav2Vec2Config(
        hidden_size=32,
        num_hidden_layers=1,
        num_attention_heads=2,
        intermediate_size=64,
        conv_dim=(16, 16, 16),
        conv_stride=(5, 2, 2),
        conv_kernel=(10, 3, 3),
        num_feat_extract_layers=3,
        classifier_proj_size=16,
        num_labels=6,
        id2label=id2label,
        label2id={v: k for k, v in id2label.items()},
    )
    model = Wav2Vec2ForSequenceClassification(config)
    if bias_label is not None:
        index = {v: k for k, v in id2label.items()}[bias_label]
        with torch.no_grad():
            model.classifier.weight.zero_()
            model.classifier.bias.zero_()
            model.classifier.bias[index] = 8.0
    model.save_pretrained(path)
    Wav2Vec2FeatureExtractor(sampling_rate=16000).save_pretrained(path)


def _save_video_checkpoint(path, id2label=SCRAMBLED, bias_label=None):
    torch.manual_seed(13)
    config = VivitConfig(
        image_size=224,
        num_frames=32,
        tubelet_size=[2, 16, 16],
        hidden_size=32,
        num_hidden_layers=1,
        num_attention_heads=2,
        intermediate_size=64,
        num_labels=6,
        id2label=id2label,
        label2id={v: k for k, v in id2label.items()},
    )
    model = VivitForVideoClassification(config)
    if bias_label is not None:
        index = {v: k for k, v in id2label.items()}[bias_label]
        with torch.no_grad():
            model.classifier.weight.zero_()
            model.classifier.bias.zero_()
            model.classifier.bias[index] = 8.0
    model.save_pretrained(path)
    VivitImageProcessor().save_pretrained(path)


@pytest.fixture(scope="session")
def checkpoints(tmp_path_factory):
    root = tmp_path_factory.mktemp("checkpoints")
    audio = root / "tiny-audio"
    video = root / "tiny-video"
    _save_audio_checkpoint(audio)
    _save_video_checkpoint(video)
    return {"audio": str(audio), "video": str(video)}


@pytest.fixture(scope="session")
def audio_clf(checkpoints):
    return AudioClassifier(checkpoints["audio"])


@pytest.fixture(scope="session")
def video_clf(checkpoints):
    return VideoClassifier(checkpoints["video"])


@pytest.fixture(scope="session")
def biased_video_checkpoints(tmp_path_factory):
    """Two checkpoints with identical weights but re-labelled outputs."""
    root = tmp_path_factory.mktemp("biased")
    sad_path = root / "bias-sad"
    _save_video_checkpoint(sad_path, bias_label="sad")
    relabeled = root / "bias-relabeled"
    shutil.copytree(sad_path, relabeled)
    config_path = relabeled / "config.json"
    config = json.loads(config_path.read_text())
    swapped = dict(SCRAMBLED)
    sad_idx = next(k for k, v in SCRAMBLED.items() if v == "sad")
    happy_idx = next(k for k, v in SCRAMBLED.items() if v == "happy")
    swapped[sad_idx], swapped[happy_idx] = "happy", "sad"
    config["id2label"] = {str(k): v for k, v in swapped.items()}
    config["label2id"] = {v: int(k) for k, v in swapped.items()}
    config_path.write_text(json.dumps(config))
    return {"sad": str(sad_path), "relabeled": str(relabeled)}


@pytest.fixture(scope="session")
def media_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("media")


@pytest.fixture(scope="session")
def full_av_path(media_dir):
    path = media_dir / "01-01-03-01-01-01-01.mp4"
    _libav.write_sample_clip(str(path), duration=1.2, fps=30, tone_hz=330.0, with_audio=True)
    return str(path)


@pytest.fixture(scope="session")
def video_only_path(media_dir):
    path = media_dir / "02-01-03-01-01-01-01.mp4"
    _libav.write_sample_clip(str(path), duration=1.2, fps=30, with_audio=False)
    return str(path)
