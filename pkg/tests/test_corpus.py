import io
import json
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dialogcues.corpus import (
    POS, AnnotatedToken, Corpus, CorpusError, Person, PronSubtype, Speaker, Utterance,
    parse_corpus, split_corpus, tokens_from_string, validate_corpus, write_corpus,
)

from conftest import make_utterance


def numbered_corpus(n, dialogue_length=10):
    utts = []
    for i in range(n):
        d, pos = divmod(i, dialogue_length)
        utts.append(Utterance(f"u{i}", f"d{d}", pos, 0, Speaker.CLIENT,
                              (AnnotatedToken("ja", "ja", POS.INTJ),)))
    return Corpus(tuple(utts))


# --- parsing and writing -------------------------------------------------------

def test_round_trip_sample(sample):
    assert parse_corpus(write_corpus(sample)) == sample


def test_parse_accepts_bytes_str_and_files(sample):
    text = write_corpus(sample)
    assert parse_corpus(text.encode()) == parse_corpus(io.StringIO(text)) == sample


def test_blank_and_comment_lines_skipped(sample):
    text = "# header\n\n" + write_corpus(sample)
    assert len(parse_corpus(text)) == len(sample)


def test_optional_fields_omitted_in_output():
    tok = AnnotatedToken("op", "op", POS.PREP)
    assert tok.to_dict() == {"surface": "op", "lemma": "op", "pos": "PREP"}


def _record(**over):
    rec = {"id": "a", "dialogue_id": "d", "turn_index": 0, "position_in_turn": 0,
           "speaker": "CLIENT", "tokens": [{"surface": "ja", "lemma": "ja", "pos": "INTJ"}]}
    rec.update(over)
    return json.dumps(rec)


@pytest.mark.parametrize("line, fragment", [
    ("{not json", "malformed JSON"),
    (_record(speaker="WIZARD"), "speaker"),
    (_record(tokens=[]), "empty token list"),
    (_record(extra=1), "unknown field"),
    (_record(turn_index=-1), "turn_index"),
    (_record(tokens=[{"surface": "x", "lemma": "x", "pos": "VERB"}]), "pos"),
])
def test_parse_errors_carry_line_numbers(line, fragment):
    with pytest.raises(CorpusError) as info:
        parse_corpus(_record(id="ok") + "\n" + line + "\n")
    assert info.value.line == 2
    assert fragment in str(info.value)


def test_duplicate_id_rejected_on_parse():
    with pytest.raises(CorpusError, match="duplicate utterance id"):
        parse_corpus(_record() + "\n" + _record(turn_index=1) + "\n")


def test_invalid_token_features_rejected_on_parse():
    bad = _record(tokens=[{"surface": "ik", "lemma": "ik", "pos": "PRON", "person": "P1"}])
    with pytest.raises(CorpusError, match="pron_subtype"):
        parse_corpus(bad)


# --- validation ---------------------------------------------------------------

def test_valid_corpus_has_empty_report(sample):
    report = validate_corpus(sample)
    assert not report and len(report) == 0
    assert "no violations" in report.to_text()


def test_duplicate_id_names_both():
    u = make_utterance("ja/INTJ", uid="x")
    v = make_utterance("nee/INTJ", uid="x", turn=1)
    report = validate_corpus(Corpus((u, v)))
    assert [x.kind for x in report.violations] == ["duplicate_id"]
    assert "#0" in report.violations[0].detail and "#1" in report.violations[0].detail


def test_partial_chunks_single_violation():
    u = make_utterance("op/PREP@0 18/NUM maart/NOUN@0")
    report = validate_corpus(Corpus((u,)))
    assert [x.kind for x in report.violations] == ["partial_chunks"]


def test_validation_kinds():
    utts = (
        make_utterance("ja/INTJ", uid="a"),
        make_utterance("nee/INTJ", uid="b"),  # same position as a
        make_utterance("op/PREP.P1", uid="c", turn=1),
        make_utterance("op/PREP@1 maart/NOUN@0", uid="e", turn=3),
    )
    kinds = Counter(v.kind for v in validate_corpus(Corpus(utts)).violations)
    assert kinds == {"duplicate_position": 1, "token_features": 1, "chunk_order": 1}


def test_validation_tsv_header():
    report = validate_corpus(Corpus((make_utterance("op/PREP.P1"),)))
    lines = report.to_tsv().splitlines()
    assert lines[0] == "violation_kind\tutterance_id\tdetail"
    assert lines[1].startswith("token_features\tu1\t")


def test_validation_does_not_mutate(sample):
    before = write_corpus(sample)
    validate_corpus(sample)
    assert write_corpus(sample) == before


# --- compact notation --------------------------------------------------------------

def test_tokens_from_string():
    ik, wil = tokens_from_string("ik/PRON.P1.SG.PERSONAL@0 wil/willen/FIN_V.P1.SG@1")
    assert ik.lemma == "ik" and ik.person is Person.P1 and ik.pron_subtype is PronSubtype.PERSONAL
    assert wil.lemma == "willen" and wil.pos is POS.FIN_V and wil.chunk_index == 1


@pytest.mark.parametrize("spec", ["nopos", "x/NOUN.FOO", "x/VERB"])
def test_tokens_from_string_errors(spec):
    with pytest.raises(ValueError):
        tokens_from_string(spec)


# --- splitting ------------------------------------------------------------------

@pytest.mark.parametrize("n, ratio, sizes", [
    (2351, Fraction(3, 4), (1763, 588)),
    (10, "3/4", (7, 3)),
    (10, 1, (10, 0)),
    (3, 0.5, (1, 2)),
])
def test_split_sizes(n, ratio, sizes):
    result = split_corpus(numbered_corpus(n), ratio, seed=1)
    assert (len(result.train), len(result.test)) == sizes


def test_split_ratio_one_keeps_corpus():
    c = numbered_corpus(12)
    assert split_corpus(c, 1, 5).train == c


@pytest.mark.parametrize("ratio", [0, -1, Fraction(5, 4)])
def test_split_ratio_out_of_range(ratio):
    with pytest.raises(ValueError):
        split_corpus(numbered_corpus(4), ratio, 0)


def test_split_empty_corpus():
    with pytest.raises(ValueError):
        split_corpus(Corpus(()), Fraction(3, 4), 0)


def test_split_keeps_document_order():
    c = numbered_corpus(50)
    order = {uid: i for i, uid in enumerate(c.ids)}
    r = split_corpus(c, Fraction(3, 4), 9)
    for half in (r.train, r.test):
        positions = [order[i] for i in half.ids]
        assert positions == sorted(positions)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 120), num=st.integers(1, 20), den=st.integers(1, 20), seed=st.integers(0, 2**32))
def test_split_partition_and_determinism(n, num, den, seed):
    if num > den:
        num, den = den, num
    c = numbered_corpus(n)
    a = split_corpus(c, Fraction(num, den), seed)
    b = split_corpus(c, Fraction(num, den), seed)
    assert a.train.ids == b.train.ids and a.test.ids == b.test.ids
    assert not set(a.train.ids) & set(a.test.ids)
    assert Counter(a.train.ids + a.test.ids) == Counter(c.ids)
    assert len(a.train) == n * num // den


# --- round-trip property -----------------------------------------------------------

_words = st.text(alphabet="abcdefghijklmnopqrstuvwxyzëé'?", min_size=1, max_size=6)


@st.composite
def tokens(draw):
    pos = draw(st.sampled_from(list(POS)))
    person = number = subtype = None
    if pos in (POS.FIN_V, POS.PRON):
        person = draw(st.none() | st.sampled_from(list(Person)))
    if pos is POS.PRON:
        subtype = draw(st.sampled_from(list(PronSubtype)))
    surface = draw(_words)
    return AnnotatedToken(surface, draw(st.just(surface.lower()) | _words), pos, person, None, subtype)


@st.composite
def corpora(draw):
    n = draw(st.integers(0, 6))
    utts = []
    for i in range(n):
        toks = draw(st.lists(tokens(), min_size=1, max_size=5))
        if draw(st.booleans()):
            toks = [AnnotatedToken(t.surface, t.lemma, t.pos, t.person, t.number, t.pron_subtype, j)
                    for j, t in enumerate(toks)]
        utts.append(Utterance(f"u{i}", f"d{i % 2}", i, 0, draw(st.sampled_from(list(Speaker))), tuple(toks)))
    return Corpus(tuple(utts))


@settings(max_examples=80, deadline=None)
@given(corpora())
def test_round_trip_property(c):
    assert not validate_corpus(c)
    assert parse_corpus(write_corpus(c)) == c
