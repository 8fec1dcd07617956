import numpy as np
import pytest

from vidtext.pipeline import train_from_corpus
from vidtext.synth import SynthSpec, generate_alphabet, generate_corpus

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def alphabet():
    return generate_alphabet(10, 0)


@pytest.fixture(scope="session")
def train_lines():
    return [(img, truth) for _, img, truth in generate_corpus(SynthSpec(seed=101), 30)]


@pytest.fixture(scope="session")
def model(train_lines):
    return train_from_corpus(train_lines)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def bitmap(*rows):
    """Boolean image from strings, '#' is foreground."""
    return np.array([[ch == "#" for ch in row] for row in rows], dtype=bool)
