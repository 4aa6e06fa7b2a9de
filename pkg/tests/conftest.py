"""Shared fixtures: expensive synthetic corpora built once per session."""

import numpy as np
import pytest

from safegate import perception, synth


@pytest.fixture(scope="session")
def face_corpus():
    """(names, enrolled, held_out) for six synthetic identities."""
    return synth.face_set()


@pytest.fixture(scope="session")
def enrolled_model(face_corpus):
    """Model with the first five identities enrolled (sixth held out)."""
    names, enrolled, _held = face_corpus
    model = None
    for name in names[:5]:
        model = perception.enroll(name, enrolled[name], model)
    return model


@pytest.fixture(scope="session")
def change_pairs():
    """The 200-pair labeled change-detection corpus."""
    return synth.change_corpus()


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
