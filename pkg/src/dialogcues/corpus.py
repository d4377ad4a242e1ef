"""Annotated dialogue corpora: reading, writing, validation and splitting.

A corpus file is UTF-8 JSON lines, one utterance per line::

    {"id": "d01-003", "dialogue_id": "d01", "turn_index": 2,
     "position_in_turn": 0, "speaker": "CLIENT",
     "tokens": [{"surface": "ik", "lemma": "ik", "pos": "PRON",
                 "person": "P1", "number": "SG",
                 "pron_subtype": "PERSONAL", "chunk_index": 0}, ...]}

Optional token fields (``person``, ``number``, ``pron_subtype``,
``chunk_index``) may be omitted or null.  Blank lines and lines starting
with ``#`` are skipped.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import IO, Iterable, Union

import numpy as np

__all__ = [
    "POS", "Person", "Number", "PronSubtype", "Speaker",
    "AnnotatedToken", "Utterance", "Corpus", "SplitResult",
    "Violation", "ValidationReport", "CorpusError",
    "parse_corpus", "read_corpus", "write_corpus", "validate_corpus",
    "split_corpus", "tokens_from_string",
]


class POS(str, Enum):
    FIN_V = "FIN_V"
    INF_V = "INF_V"  # any non-finite verb form, participles included
    NOUN = "NOUN"
    PROPER = "PROPER"
    PRON = "PRON"
    PREP = "PREP"
    DET = "DET"
    ADJ = "ADJ"
    ADV = "ADV"
    NUM = "NUM"
    CONJ = "CONJ"
    INTJ = "INTJ"
    PUNCT = "PUNCT"
    OTHER = "OTHER"


class Person(str, Enum):
    P1 = "P1"
    P2 = "P2"
    P3 = "P3"


class Number(str, Enum):
    SG = "SG"
    PL = "PL"


class PronSubtype(str, Enum):
    PERSONAL = "PERSONAL"
    DEMONSTRATIVE = "DEMONSTRATIVE"
    INTERROGATIVE = "INTERROGATIVE"
    OTHER = "OTHER"


class Speaker(str, Enum):
    CLIENT = "CLIENT"
    SYSTEM = "SYSTEM"


VERBS = frozenset({POS.FIN_V, POS.INF_V})


class CorpusError(ValueError):
    """Raised for unreadable or structurally invalid corpus input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class AnnotatedToken:
    surface: str
    lemma: str
    pos: POS
    person: Person | None = None
    number: Number | None = None
    pron_subtype: PronSubtype | None = None
    chunk_index: int | None = None

    @property
    def norm(self) -> str:
        """Lower-cased lemma, the form all lexicon lookups use."""
        return self.lemma.lower()

    def to_dict(self) -> dict:
        d = {"surface": self.surface, "lemma": self.lemma, "pos": self.pos.value}
        for name in ("person", "number", "pron_subtype"):
            value = getattr(self, name)
            if value is not None:
                d[name] = value.value
        if self.chunk_index is not None:
            d["chunk_index"] = self.chunk_index
        return d


@dataclass(frozen=True)
class Utterance:
    id: str
    dialogue_id: str
    turn_index: int
    position_in_turn: int
    speaker: Speaker
    tokens: tuple[AnnotatedToken, ...]

    @property
    def text(self) -> str:
        return " ".join(t.surface for t in self.tokens)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "dialogue_id": self.dialogue_id,
            "turn_index": self.turn_index,
            "position_in_turn": self.position_in_turn,
            "speaker": self.speaker.value,
            "tokens": [t.to_dict() for t in self.tokens],
        }


@dataclass(frozen=True)
class Corpus:
    utterances: tuple[Utterance, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "utterances", tuple(self.utterances))

    def __len__(self) -> int:
        return len(self.utterances)

    def __iter__(self):
        return iter(self.utterances)

    @cached_property
    def dialogues(self) -> dict[str, tuple[str, ...]]:
        """dialogue_id -> utterance ids, in document order."""
        index: dict[str, list[str]] = {}
        for u in self.utterances:
            index.setdefault(u.dialogue_id, []).append(u.id)
        return {k: tuple(v) for k, v in index.items()}

    @cached_property
    def by_id(self) -> dict[str, Utterance]:
        return {u.id: u for u in self.utterances}

    @property
    def ids(self) -> list[str]:
        return [u.id for u in self.utterances]

    def subset(self, ids: Iterable[str]) -> "Corpus":
        """Sub-corpus of the given ids, kept in this corpus' document order."""
        keep = set(ids)
        return Corpus(tuple(u for u in self.utterances if u.id in keep))


@dataclass(frozen=True)
class SplitResult:
    train: Corpus
    test: Corpus
    seed: int
    ratio: Fraction


@dataclass(frozen=True)
class Violation:
    kind: str
    utterance_id: str
    detail: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    def __bool__(self) -> bool:
        return bool(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    def to_text(self) -> str:
        if not self.violations:
            return "corpus valid: no violations\n"
        lines = [f"{len(self.violations)} violation(s):"]
        lines += [f"  [{v.kind}] {v.utterance_id}: {v.detail}" for v in self.violations]
        return "\n".join(lines) + "\n"

    def to_tsv(self) -> str:
        rows = ["violation_kind\tutterance_id\tdetail"]
        rows += [f"{v.kind}\t{v.utterance_id}\t{v.detail}" for v in self.violations]
        return "\n".join(rows) + "\n"


# --- reading / writing -----------------------------------------------------

_TOKEN_FIELDS = {"surface", "lemma", "pos", "person", "number", "pron_subtype", "chunk_index"}
_UTTERANCE_FIELDS = {"id", "dialogue_id", "turn_index", "position_in_turn", "speaker", "tokens"}


def _enum(cls, value, fieldname: str, line: int, optional: bool = False):
    if value is None and optional:
        return None
    try:
        return cls(value)
    except ValueError:
        raise CorpusError(f"field {fieldname!r}: unknown value {value!r}", line) from None


def _nonneg_int(value, fieldname: str, line: int, optional: bool = False):
    if value is None and optional:
        return None
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise CorpusError(f"field {fieldname!r}: expected non-negative integer, got {value!r}", line)
    return value


def _text(value, fieldname: str, line: int) -> str:
    if not isinstance(value, str):
        raise CorpusError(f"field {fieldname!r}: expected string, got {value!r}", line)
    return value


def _token_from_dict(d, line: int) -> AnnotatedToken:
    if not isinstance(d, dict):
        raise CorpusError("token is not an object", line)
    unknown = set(d) - _TOKEN_FIELDS
    if unknown:
        raise CorpusError(f"unknown token field(s) {sorted(unknown)}", line)
    for name in ("surface", "lemma", "pos"):
        if name not in d:
            raise CorpusError(f"token missing field {name!r}", line)
    return AnnotatedToken(
        surface=_text(d["surface"], "surface", line),
        lemma=_text(d["lemma"], "lemma", line),
        pos=_enum(POS, d["pos"], "pos", line),
        person=_enum(Person, d.get("person"), "person", line, optional=True),
        number=_enum(Number, d.get("number"), "number", line, optional=True),
        pron_subtype=_enum(PronSubtype, d.get("pron_subtype"), "pron_subtype", line, optional=True),
        chunk_index=_nonneg_int(d.get("chunk_index"), "chunk_index", line, optional=True),
    )


def _utterance_from_dict(d, line: int) -> Utterance:
    if not isinstance(d, dict):
        raise CorpusError("record is not an object", line)
    missing = _UTTERANCE_FIELDS - set(d)
    if missing:
        raise CorpusError(f"missing field(s) {sorted(missing)}", line)
    unknown = set(d) - _UTTERANCE_FIELDS
    if unknown:
        raise CorpusError(f"unknown field(s) {sorted(unknown)}", line)
    if not isinstance(d["tokens"], list):
        raise CorpusError("field 'tokens': expected a list", line)
    if not d["tokens"]:
        raise CorpusError(f"utterance {d['id']!r} has an empty token list", line)
    return Utterance(
        id=_text(d["id"], "id", line),
        dialogue_id=_text(d["dialogue_id"], "dialogue_id", line),
        turn_index=_nonneg_int(d["turn_index"], "turn_index", line),
        position_in_turn=_nonneg_int(d["position_in_turn"], "position_in_turn", line),
        speaker=_enum(Speaker, d["speaker"], "speaker", line),
        tokens=tuple(_token_from_dict(t, line) for t in d["tokens"]),
    )


def parse_corpus(source: Union[bytes, str, IO]) -> Corpus:
    """Parse a JSON-lines corpus from bytes, text or a file object.

    Raises
    ------
    CorpusError
        On malformed records, unknown enum values, duplicate ids, empty
        token lists or any other violated corpus invariant.  The message
        carries the 1-based line number where one applies.
    """
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        source = io.StringIO(source)

    utterances = []
    lines_of: dict[str, int] = {}
    for lineno, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        raw = raw.strip()
        if not raw or raw.startswith("#"):
            continue
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"malformed JSON ({exc.msg})", lineno) from None
        u = _utterance_from_dict(record, lineno)
        if u.id in lines_of:
            raise CorpusError(f"duplicate utterance id {u.id!r} (first seen on line {lines_of[u.id]})",
                              lineno)
        lines_of[u.id] = lineno
        utterances.append(u)

    corpus = Corpus(tuple(utterances))
    report = validate_corpus(corpus)
    if report:
        v = report.violations[0]
        raise CorpusError(f"{v.kind}: {v.detail}", lines_of.get(v.utterance_id))
    return corpus


def read_corpus(path) -> Corpus:
    with open(path, "rb") as fh:
        return parse_corpus(fh.read())


def write_corpus(corpus: Corpus) -> str:
    """Serialize to the JSON-lines corpus format (inverse of parse_corpus)."""
    return "".join(json.dumps(u.to_dict(), ensure_ascii=False) + "\n" for u in corpus.utterances)


# --- validation --------------------------------------------------------------

def validate_corpus(corpus: Corpus) -> ValidationReport:
    """List every invariant violation; an empty report means the corpus is valid."""
    report = ValidationReport()
    add = report.violations.append

    first_of: dict[str, int] = {}
    positions: dict[tuple, str] = {}
    for i, u in enumerate(corpus.utterances):
        if u.id in first_of:
            add(Violation("duplicate_id", u.id,
                          f"id {u.id!r} used by utterances #{first_of[u.id]} and #{i}"))
        else:
            first_of[u.id] = i
        key = (u.dialogue_id, u.turn_index, u.position_in_turn)
        if key in positions:
            add(Violation("duplicate_position", u.id,
                          f"position {key} already taken by {positions[key]!r}"))
        else:
            positions[key] = u.id
        if not u.tokens:
            add(Violation("empty_tokens", u.id, "utterance has no tokens"))
            continue

        for j, t in enumerate(u.tokens):
            if (t.person is not None or t.number is not None) and t.pos not in (POS.FIN_V, POS.PRON):
                add(Violation("token_features", u.id,
                              f"token {j} ({t.surface!r}, {t.pos.value}) carries person/number"))
            if (t.pron_subtype is not None) != (t.pos == POS.PRON):
                add(Violation("token_features", u.id,
                              f"token {j} ({t.surface!r}): pron_subtype must be present iff pos is PRON"))

        chunks = [t.chunk_index for t in u.tokens]
        present = [c is not None for c in chunks]
        if any(present) and not all(present):
            add(Violation("partial_chunks", u.id,
                          f"chunk_index on {sum(present)} of {len(chunks)} tokens"))
        elif all(present) and any(b < a for a, b in zip(chunks, chunks[1:])):
            add(Violation("chunk_order", u.id, f"chunk indices decrease: {chunks}"))
    return report


# --- splitting ---------------------------------------------------------------

def _as_fraction(ratio) -> Fraction:
    if isinstance(ratio, float):
        return Fraction(ratio).limit_denominator(10**9)
    return Fraction(ratio)


def split_corpus(corpus: Corpus, ratio, seed: int) -> SplitResult:
    """Random utterance-level train/test split.

    The shuffle is a permutation drawn from numpy's PCG64 generator
    seeded with ``seed``; the first ``floor(ratio * N)`` shuffled
    utterances form the training set.  Both halves keep document order.
    """
    r = _as_fraction(ratio)
    if not 0 < r <= 1:
        raise ValueError(f"ratio must be in (0, 1], got {ratio}")
    n = len(corpus)
    if n == 0:
        raise ValueError("cannot split an empty corpus")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    n_train = math.floor(r * n)
    order = np.random.Generator(np.random.PCG64(seed)).permutation(n)
    in_train = np.zeros(n, dtype=bool)
    in_train[order[:n_train]] = True
    train = tuple(u for u, keep in zip(corpus.utterances, in_train) if keep)
    test = tuple(u for u, keep in zip(corpus.utterances, in_train) if not keep)
    return SplitResult(Corpus(train), Corpus(test), seed, r)


# --- compact notation ----------------------------------------------------------

def tokens_from_string(spec: str) -> tuple[AnnotatedToken, ...]:
    """Build tokens from a compact whitespace-separated notation.

    Each token is ``surface/lemma/TAG[.FEAT...][@chunk]`` or, when the
    lemma is the lower-cased surface, ``surface/TAG[...]``.  Features are
    person (P1-P3), number (SG/PL) or pronoun subtype names, e.g.
    ``ik/PRON.P1.SG.PERSONAL@0 wil/willen/FIN_V.P1.SG@1``.
    """
    tokens = []
    for item in spec.split():
        chunk = None
        if "@" in item:
            item, _, c = item.rpartition("@")
            chunk = int(c)
        parts = item.rsplit("/", 2)
        if len(parts) == 2:
            surface, tag = parts
            lemma = surface.lower()
        elif len(parts) == 3:
            surface, lemma, tag = parts
        else:
            raise ValueError(f"bad token spec {item!r}")
        pos, *feats = tag.split(".")
        kwargs = {}
        for f in feats:
            if f in Person.__members__:
                kwargs["person"] = Person(f)
            elif f in Number.__members__:
                kwargs["number"] = Number(f)
            elif f in PronSubtype.__members__:
                kwargs["pron_subtype"] = PronSubtype(f)
            else:
                raise ValueError(f"unknown feature {f!r} in {item!r}")
        tokens.append(AnnotatedToken(surface, lemma, POS(pos), chunk_index=chunk, **kwargs))
    return tuple(tokens)
