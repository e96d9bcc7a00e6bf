import random

import pytest

from emofuse.core import (
    CANONICAL_LABELS,
    Modality,
    ModalityPrediction,
    N_LABELS,
    ProbabilityVector,
    normalize,
)


def random_vector(rng: random.Random) -> ProbabilityVector:
    """A random valid distribution (strictly positive draws, normalized)."""
    raw = [rng.random() + 1e-9 for _ in range(N_LABELS)]
    return normalize(raw)


def make_pred(modality: str, probs: dict[str, float]) -> ModalityPrediction:
    """Prediction from a sparse label->mass mapping (missing labels are 0)."""
    vector = ProbabilityVector.from_mapping(probs)
    return ModalityPrediction.from_probs(Modality(modality), vector)


def vec(probs: dict[str, float]) -> ProbabilityVector:
    return ProbabilityVector.from_mapping(probs)


@pytest.fixture
def rng():
    return random.Random(20240901)


@pytest.fixture
def labels():
    return CANONICAL_LABELS
