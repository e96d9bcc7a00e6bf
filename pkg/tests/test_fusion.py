"""Worked examples and invariants for the five decision methods.

The expected numbers below were re-derived by hand as exact fractions before
being frozen (e.g. inverse-confidence weights 1.25/3.25 = 5/13 and 2/3.25 =
8/13, giving fused sad mass 5/13 = 0.384615...).
"""

import random

import pytest

from emofuse.core import (
    CANONICAL_LABELS,
    EmotionLabel,
    Modality,
    ModalityPrediction,
    TieBreakPolicy,
    normalize,
    permute,
)
from emofuse.errors import (
    InvalidParams,
    MissingModality,
    NonPositiveWeight,
    ValidationError,
)
from emofuse.evaluation import ClipRecord
from emofuse.fusion import (
    DynamicMode,
    FusionConfig,
    Provenance,
    fuse,
    fuse_average,
    fuse_confidence_threshold,
    fuse_dynamic_weighting,
    fuse_rule_based,
    fuse_weighted_average,
)

from conftest import make_pred, random_vector, vec

TOL = 1e-9


def test_average_hand_example():
    out = fuse_average(vec({"anger": 0.6, "happy": 0.4}), vec({"anger": 0.2, "happy": 0.8}))
    assert out.label is EmotionLabel.HAPPY
    assert abs(out.confidence - 0.6) < TOL
    assert abs(out.fused_probs[EmotionLabel.ANGER] - 0.4) < TOL
    assert out.provenance is Provenance.BLENDED


def test_average_identical_inputs_is_identity(rng):
    for _ in range(50):
        probs = random_vector(rng)
        out = fuse_average(probs, probs)
        for a, b in zip(out.fused_probs.mass, probs.mass):
            assert abs(a - b) < TOL


def test_average_uniform_against_one_hot():
    uniform = normalize([1.0] * 6)
    out = fuse_average(uniform, vec({"happy": 1.0}))
    # (1/6 + 1)/2 = 7/12 on happy, (1/6)/2 = 1/12 elsewhere
    assert out.label is EmotionLabel.HAPPY
    assert abs(out.fused_probs[EmotionLabel.HAPPY] - 7.0 / 12.0) < TOL
    assert abs(out.fused_probs[EmotionLabel.SAD] - 1.0 / 12.0) < TOL


def test_weighted_average_holdout_accuracy_weights():
    out = fuse_weighted_average(
        vec({"anger": 1.0}), vec({"happy": 1.0}), w_audio=0.59, w_video=0.88
    )
    assert out.label is EmotionLabel.HAPPY
    assert abs(out.fused_probs[EmotionLabel.ANGER] - 0.59 / 1.47) < TOL
    assert abs(out.fused_probs[EmotionLabel.HAPPY] - 0.88 / 1.47) < TOL


def test_weighted_average_equal_weights_matches_average(rng):
    for _ in range(50):
        a, v = random_vector(rng), random_vector(rng)
        weighted = fuse_weighted_average(a, v, 0.7, 0.7)
        plain = fuse_average(a, v)
        for x, y in zip(weighted.fused_probs.mass, plain.fused_probs.mass):
            assert abs(x - y) < TOL


def test_weighted_average_degenerate_audio_weight(rng):
    for _ in range(50):
        video = random_vector(rng)
        if sorted(video.mass)[-1] == sorted(video.mass)[-2]:
            continue
        out = fuse_weighted_average(random_vector(rng), video, 1e-9, 1.0)
        assert out.label is ModalityPrediction.from_probs(Modality.VIDEO, video).label


def test_weighted_average_rejects_non_positive_weights():
    a, v = vec({"anger": 1.0}), vec({"happy": 1.0})
    with pytest.raises(NonPositiveWeight):
        fuse_weighted_average(a, v, 0.0, 1.0)
    with pytest.raises(NonPositiveWeight):
        fuse_weighted_average(a, v, 1.0, -0.5)


def test_confidence_threshold_video_selected():
    audio = make_pred("audio", {"anger": 0.9, "disgust": 0.1})
    video = make_pred("video", {"sad": 0.75, "anger": 0.25})
    out = fuse_confidence_threshold(audio, video, threshold=0.7)
    assert out.label is EmotionLabel.SAD
    assert out.confidence == 0.75
    assert out.provenance is Provenance.VIDEO_SELECTED
    assert out.fused_probs is None


def test_confidence_threshold_boundary_falls_through():
    audio = make_pred("audio", {"anger": 0.9, "disgust": 0.1})
    video = make_pred("video", {"sad": 0.7, "anger": 0.3})
    out = fuse_confidence_threshold(audio, video, threshold=0.7)
    assert out.provenance is Provenance.BLENDED
    assert out.label is EmotionLabel.ANGER  # (0.9+0.3)/2 = 0.6 > 0.35


def test_confidence_threshold_average_fallback():
    audio = make_pred("audio", {"anger": 0.9, "disgust": 0.1})
    video = make_pred("video", {"anger": 0.5, "neutral": 0.5})
    out = fuse_confidence_threshold(audio, video, threshold=0.7)
    assert out.label is EmotionLabel.ANGER
    assert abs(out.fused_probs[EmotionLabel.ANGER] - 0.7) < TOL


def test_dynamic_weighting_inverse_hand_example():
    audio = make_pred("audio", {"anger": 0.8, "sad": 0.2})
    video = make_pred("video", {"happy": 0.5, "sad": 0.5})
    out = fuse_dynamic_weighting(audio, video, DynamicMode.INVERSE_CONFIDENCE)
    # weights 5/13 and 8/13; fused sad = 5/13
    assert out.label is EmotionLabel.SAD
    assert abs(out.confidence - 5.0 / 13.0) < TOL
    assert abs(out.fused_probs[EmotionLabel.ANGER] - 4.0 / 13.0) < TOL
    assert abs(out.fused_probs[EmotionLabel.HAPPY] - 4.0 / 13.0) < TOL


def test_dynamic_weighting_proportional_hand_example():
    audio = make_pred("audio", {"anger": 0.8, "sad": 0.2})
    video = make_pred("video", {"happy": 0.5, "sad": 0.5})
    out = fuse_dynamic_weighting(audio, video, DynamicMode.PROPORTIONAL_CONFIDENCE)
    # weights 8/13 and 5/13; fused anger = 6.4/13 = 0.492308
    assert out.label is EmotionLabel.ANGER
    assert abs(out.fused_probs[EmotionLabel.ANGER] - 6.4 / 13.0) < TOL


def test_dynamic_weighting_equal_confidence_matches_average(rng):
    for mode in DynamicMode:
        audio = make_pred("audio", {"anger": 0.6, "happy": 0.4})
        video = make_pred("video", {"sad": 0.6, "neutral": 0.4})
        out = fuse_dynamic_weighting(audio, video, mode)
        plain = fuse_average(audio.probs, video.probs)
        for x, y in zip(out.fused_probs.mass, plain.fused_probs.mass):
            assert abs(x - y) < TOL


def test_rule_based_agreement():
    audio = make_pred("audio", {"happy": 0.6, "sad": 0.4})
    video = make_pred("video", {"happy": 0.7, "sad": 0.3})
    out = fuse_rule_based(audio, video, agreement_threshold=0.5)
    assert out.label is EmotionLabel.HAPPY
    assert out.provenance is Provenance.AGREED
    assert out.confidence == 0.7  # max of the pair
    assert out.fused_probs is None


def test_rule_based_fallback_picks_higher_confidence():
    audio = make_pred("audio", {"anger": 0.9, "happy": 0.1})
    video = make_pred("video", {"happy": 0.6, "anger": 0.4})
    out = fuse_rule_based(audio, video, agreement_threshold=0.5)
    assert out.label is EmotionLabel.ANGER
    assert out.provenance is Provenance.AUDIO_SELECTED


def test_rule_based_agreement_fails_on_low_confidence():
    audio = make_pred("audio", {"happy": 0.45, "sad": 0.35, "anger": 0.2})
    video = make_pred("video", {"happy": 0.7, "sad": 0.3})
    out = fuse_rule_based(audio, video, agreement_threshold=0.5)
    assert out.label is EmotionLabel.HAPPY
    assert out.provenance is Provenance.VIDEO_SELECTED


def test_rule_based_confidence_tie_goes_to_video():
    audio = make_pred("audio", {"anger": 0.6, "happy": 0.4})
    video = make_pred("video", {"sad": 0.6, "happy": 0.4})
    out = fuse_rule_based(audio, video, agreement_threshold=0.5)
    assert out.label is EmotionLabel.SAD
    assert out.provenance is Provenance.VIDEO_SELECTED


def _clip(audio, video):
    return ClipRecord(
        clip_id="c1",
        dataset="synthetic",
        ground_truth=EmotionLabel.ANGER,
        audio=audio,
        video=video,
    )


def test_dispatch_matches_direct_calls(rng):
    audio = make_pred("audio", {"anger": 0.8, "sad": 0.2})
    video = make_pred("video", {"happy": 0.5, "sad": 0.5})
    clip = _clip(audio, video)
    assert fuse(clip, FusionConfig(method="average")) == fuse_average(audio.probs, video.probs)
    assert fuse(clip, FusionConfig(method="rule_based")) == fuse_rule_based(audio, video, 0.5)
    assert fuse(
        clip, FusionConfig(method="weighted_average", weight_audio=0.59, weight_video=0.88)
    ) == fuse_weighted_average(audio.probs, video.probs, 0.59, 0.88)


def test_dispatch_missing_modality():
    audio = make_pred("audio", {"anger": 1.0})
    with pytest.raises(MissingModality):
        fuse(_clip(audio, None), FusionConfig(method="average"))
    with pytest.raises(MissingModality):
        fuse(_clip(None, make_pred("video", {"sad": 1.0})), FusionConfig())


def test_dispatch_weighted_without_weights_names_them():
    clip = _clip(make_pred("audio", {"anger": 1.0}), make_pred("video", {"sad": 1.0}))
    with pytest.raises(ValidationError, match="weight_audio and weight_video"):
        fuse(clip, FusionConfig(method="weighted_average"))


def test_config_validation():
    with pytest.raises(InvalidParams):
        FusionConfig(method="majority_vote")
    with pytest.raises(InvalidParams):
        FusionConfig(video_conf_threshold=1.5)
    with pytest.raises(NonPositiveWeight):
        FusionConfig(weight_audio=0.0)


# --- invariants over random inputs ---

def _random_pair(rng):
    a = ModalityPrediction.from_probs(Modality.AUDIO, random_vector(rng))
    v = ModalityPrediction.from_probs(Modality.VIDEO, random_vector(rng))
    return a, v


def test_blended_outputs_are_distributions(rng):
    for _ in range(2000):
        a, v = _random_pair(rng)
        for out in (
            fuse_average(a.probs, v.probs),
            fuse_weighted_average(a.probs, v.probs, rng.random() + 0.01, rng.random() + 0.01),
            fuse_dynamic_weighting(a, v, DynamicMode.INVERSE_CONFIDENCE),
            fuse_dynamic_weighting(a, v, DynamicMode.PROPORTIONAL_CONFIDENCE),
        ):
            assert abs(sum(out.fused_probs.mass) - 1.0) < 1e-9
            assert all(m >= 0.0 for m in out.fused_probs.mass)


def test_average_is_symmetric(rng):
    for _ in range(2000):
        a, v = random_vector(rng), random_vector(rng)
        left, right = fuse_average(a, v), fuse_average(v, a)
        for x, y in zip(left.fused_probs.mass, right.fused_probs.mass):
            assert x == y


def test_weighted_average_weight_scale_invariance(rng):
    for _ in range(2000):
        a, v = random_vector(rng), random_vector(rng)
        w_a, w_v = rng.random() + 0.01, rng.random() + 0.01
        scale = rng.random() * 10 + 0.1
        base = fuse_weighted_average(a, v, w_a, w_v)
        scaled = fuse_weighted_average(a, v, scale * w_a, scale * w_v)
        for x, y in zip(base.fused_probs.mass, scaled.fused_probs.mass):
            assert abs(x - y) <= 1e-12


def test_threshold_method_returns_video_argmax_when_confident(rng):
    for _ in range(10000):
        a, v = _random_pair(rng)
        out = fuse_confidence_threshold(a, v, threshold=0.7)
        if v.confidence > 0.7:
            assert out.label is v.label
            assert out.provenance is Provenance.VIDEO_SELECTED


def test_rule_based_agreeing_labels_always_win(rng):
    # The fallback winner carries the shared label too, whatever the branch.
    for _ in range(5000):
        a, _ = _random_pair(rng)
        shared = ModalityPrediction.from_probs(Modality.VIDEO, random_vector(rng))
        if a.label is not shared.label:
            continue
        out = fuse_rule_based(a, shared, agreement_threshold=rng.random())
        assert out.label is a.label


def test_dominance_across_blended_methods(rng):
    for _ in range(2000):
        a, v = _random_pair(rng)
        outputs = (
            fuse_average(a.probs, v.probs).fused_probs,
            fuse_weighted_average(a.probs, v.probs, 0.3, 0.9).fused_probs,
            fuse_dynamic_weighting(a, v, DynamicMode.INVERSE_CONFIDENCE).fused_probs,
            fuse_dynamic_weighting(a, v, DynamicMode.PROPORTIONAL_CONFIDENCE).fused_probs,
        )
        for i in range(6):
            for j in range(6):
                if a.probs[i] >= a.probs[j] and v.probs[i] >= v.probs[j]:
                    for fused in outputs:
                        assert fused[i] >= fused[j] - 1e-15


def _permute_pred(pred, mapping):
    return ModalityPrediction.from_probs(pred.modality, permute(pred.probs, mapping))


def test_permutation_equivariance_all_methods(rng):
    configs = [
        FusionConfig(method="average"),
        FusionConfig(method="weighted_average", weight_audio=0.59, weight_video=0.88),
        FusionConfig(method="confidence_threshold"),
        FusionConfig(method="dynamic_weighting"),
        FusionConfig(method="rule_based"),
    ]
    count = 0
    while count < 500:
        a, v = _random_pair(rng)
        # Unique argmaxes and no threshold equalities, per the stated property.
        if sorted(a.probs.mass)[-1] == sorted(a.probs.mass)[-2]:
            continue
        if sorted(v.probs.mass)[-1] == sorted(v.probs.mass)[-2]:
            continue
        if a.confidence == v.confidence or v.confidence in (0.5, 0.7):
            continue
        count += 1
        shuffled = list(CANONICAL_LABELS)
        rng.shuffle(shuffled)
        mapping = dict(zip(CANONICAL_LABELS, shuffled))
        clip = _clip(a, v)
        permuted_clip = _clip(_permute_pred(a, mapping), _permute_pred(v, mapping))
        for config in configs:
            base = fuse(clip, config)
            permuted = fuse(permuted_clip, config)
            if base.fused_probs is not None and sorted(base.fused_probs.mass)[-1] == sorted(base.fused_probs.mass)[-2]:
                continue  # blended tie: label depends on index order by design
            assert permuted.label is mapping[base.label], config.method
