import pytest

from dialogcues.corpus import Speaker, Utterance, tokens_from_string
from dialogcues.lexicon import default_lexicon
from dialogcues.synth import sample_corpus


@pytest.fixture(scope="session")
def lexicon():
    return default_lexicon()


@pytest.fixture(scope="session")
def sample():
    return sample_corpus()


def make_utterance(spec, speaker=Speaker.CLIENT, uid="u1", dialogue="d1", turn=0, position=0):
    """Utterance from compact token notation (see ``tokens_from_string``)."""
    return Utterance(uid, dialogue, turn, position, speaker, tokens_from_string(spec))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
