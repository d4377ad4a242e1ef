"""Surface cue extraction: from an annotated utterance to its cue pattern.

Cue values are short lowercase codes so that pattern tables stay
readable.  Utterance types use the first letter of their label (``d``
for DEC, ``w`` for WHQ, ...); subject and verb types use the codes on
:class:`~dialogcues.lexicon.SubjectType` and
:class:`~dialogcues.lexicon.VerbType`; binary cues use ``y`` / ``n``.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .corpus import POS, VERBS, Corpus, Person, PronSubtype, Speaker, Utterance, Number
from .lexicon import CueLexicon, SubjectType, VerbType

__all__ = [
    "CueId", "UtteranceType", "CueSchema", "CuePattern", "PatternRow", "PatternTable",
    "SchemaError", "build_schema", "strip_leading_conjunction", "utterance_type",
    "subject_type", "verb_types", "lexical_cues", "cue_values", "extract_pattern",
    "extract_table", "tabulate", "add_context_cue", "read_table",
    "FULL_CUES", "FIRST_EXPERIMENT_CUES",
]


class CueId(str, Enum):
    SPEAKER = "SPEAKER"
    UT = "UT"
    WH = "WH"
    ST = "ST"
    CW = "CW"
    FVT = "FVT"
    SVT = "SVT"
    QM = "QM"
    PREV_CLASS = "PREV_CLASS"


class UtteranceType(str, Enum):
    DEC = "d"
    WHQ = "w"
    YNQ = "y"
    IMP = "i"
    PRE = "p"
    NOM = "n"
    ADJ = "a"
    THA = "t"
    GRE = "g"
    CON = "c"
    EXC = "e"
    MIS = "m"


YES, NO = "y", "n"
NO_CUE_WORD = "none"
START = "start"
SPEAKER_CODES = {Speaker.CLIENT: "c", Speaker.SYSTEM: "s"}

FULL_CUES = (CueId.UT, CueId.WH, CueId.ST, CueId.CW, CueId.FVT, CueId.SVT, CueId.QM)
FIRST_EXPERIMENT_CUES = (CueId.SPEAKER, CueId.UT, CueId.ST, CueId.FVT, CueId.QM)

_NOMINAL = frozenset({POS.DET, POS.ADJ, POS.NUM, POS.NOUN, POS.PROPER})
_HEADS = frozenset({POS.NOUN, POS.PROPER})
_NOM_ONLY = frozenset({POS.NOUN, POS.PROPER, POS.DET, POS.ADJ, POS.NUM, POS.CONJ})
_ADJ_ONLY = frozenset({POS.ADJ, POS.ADV, POS.NUM, POS.CONJ})


class SchemaError(ValueError):
    pass


# --- schema, pattern, table -------------------------------------------------

@dataclass(frozen=True)
class CueSchema:
    cues: tuple  # ((CueId, (code, ...)), ...)

    def __post_init__(self):
        cues = tuple((CueId(c), tuple(a)) for c, a in self.cues)
        object.__setattr__(self, "cues", cues)
        ids = [c for c, _ in cues]
        if len(set(ids)) != len(ids):
            raise SchemaError(f"duplicate cue ids in schema: {[c.value for c in ids]}")
        for c, a in cues:
            if not a:
                raise SchemaError(f"cue {c.value} has an empty alphabet")
            if len(set(a)) != len(a):
                raise SchemaError(f"cue {c.value} has repeated values")

    @property
    def ids(self) -> tuple:
        return tuple(c for c, _ in self.cues)

    @property
    def alphabets(self) -> tuple:
        return tuple(a for _, a in self.cues)

    @property
    def sizes(self) -> tuple:
        return tuple(len(a) for _, a in self.cues)

    def __len__(self) -> int:
        return len(self.cues)

    def index(self, cue) -> int:
        return self.ids.index(CueId(cue))

    def alphabet(self, cue) -> tuple:
        return self.cues[self.index(cue)][1]

    @cached_property
    def schema_id(self) -> str:
        digest = hashlib.sha1(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()[:10]
        return "+".join(c.value for c in self.ids) + "#" + digest

    def to_dict(self) -> dict:
        return {"cues": [[c.value, list(a)] for c, a in self.cues]}

    @classmethod
    def from_dict(cls, d: dict) -> "CueSchema":
        return cls(tuple((c, tuple(a)) for c, a in d["cues"]))

    def extended(self, cue, alphabet) -> "CueSchema":
        return CueSchema(self.cues + ((CueId(cue), tuple(alphabet)),))


def default_alphabet(cue: CueId, lexicon: CueLexicon, n_classes: int | None = None) -> tuple:
    cue = CueId(cue)
    if cue is CueId.SPEAKER:
        return tuple(SPEAKER_CODES.values())
    if cue is CueId.UT:
        return tuple(t.value for t in UtteranceType)
    if cue in (CueId.WH, CueId.QM):
        return (NO, YES)
    if cue is CueId.ST:
        return tuple(t.value for t in SubjectType)
    if cue is CueId.CW:
        return (NO_CUE_WORD,) + tuple(sorted(lexicon.cue_words))
    if cue in (CueId.FVT, CueId.SVT):
        return tuple(t.value for t in VerbType)
    if n_classes is None:
        raise SchemaError("PREV_CLASS needs the number of classes")
    return (START,) + tuple(str(k) for k in range(n_classes))


def build_schema(cue_ids: Iterable = FULL_CUES, lexicon: CueLexicon | None = None,
                 n_classes: int | None = None) -> CueSchema:
    """Schema over ``cue_ids`` with the standard alphabets for ``lexicon``."""
    if lexicon is None:
        from .lexicon import default_lexicon
        lexicon = default_lexicon()
    return CueSchema(tuple((CueId(c), default_alphabet(c, lexicon, n_classes)) for c in cue_ids))


@dataclass(frozen=True)
class CuePattern:
    values: tuple
    schema: CueSchema

    def __post_init__(self):
        values = tuple(self.values)
        object.__setattr__(self, "values", values)
        if len(values) != len(self.schema):
            raise SchemaError(f"pattern arity {len(values)} != schema arity {len(self.schema)}")
        for (cue, alphabet), v in zip(self.schema.cues, values):
            if v not in alphabet:
                raise SchemaError(f"value {v!r} not in alphabet of cue {cue.value}")

    @property
    def schema_id(self) -> str:
        return self.schema.schema_id

    def __getitem__(self, cue) -> str:
        return self.values[self.schema.index(cue)]

    def as_dict(self) -> dict:
        return {c.value: v for c, v in zip(self.schema.ids, self.values)}

    def codes(self) -> np.ndarray:
        return np.array([a.index(v) for a, v in zip(self.schema.alphabets, self.values)])


@dataclass(frozen=True)
class PatternRow:
    utterance_id: str
    pattern: CuePattern
    label: int | None = None


@dataclass(frozen=True)
class PatternTable:
    rows: tuple
    schema: CueSchema | None = None

    def __post_init__(self):
        rows = tuple(self.rows)
        object.__setattr__(self, "rows", rows)
        if rows and self.schema is None:
            object.__setattr__(self, "schema", rows[0].pattern.schema)
        for r in rows:
            if r.pattern.schema != self.schema:
                raise SchemaError(f"row {r.utterance_id!r} uses schema {r.pattern.schema_id}, "
                                  f"table uses {self.schema.schema_id}")

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def ids(self) -> list:
        return [r.utterance_id for r in self.rows]

    @property
    def labeled(self) -> bool:
        return bool(self.rows) and all(r.label is not None for r in self.rows)

    @property
    def distinct(self) -> list:
        """Distinct cue pattern types with counts, lexicographically ordered."""
        counts = Counter(r.pattern.values for r in self.rows)
        return sorted(counts.items())

    @property
    def n_cpts(self) -> int:
        return len({r.pattern.values for r in self.rows})

    def codes(self) -> np.ndarray:
        """(n_rows, n_cues) integer matrix of alphabet indices."""
        if not self.rows:
            return np.zeros((0, len(self.schema) if self.schema else 0), dtype=np.int64)
        lookup = [{v: i for i, v in enumerate(a)} for a in self.schema.alphabets]
        return np.array([[lookup[c][v] for c, v in enumerate(r.pattern.values)] for r in self.rows],
                        dtype=np.int64)

    def labels(self) -> np.ndarray:
        if not self.labeled:
            raise ValueError("table has unlabeled rows")
        return np.array([r.label for r in self.rows], dtype=np.int64)

    def with_labels(self, labels: Sequence[int]) -> "PatternTable":
        if len(labels) != len(self.rows):
            raise ValueError("label count does not match row count")
        return PatternTable(tuple(PatternRow(r.utterance_id, r.pattern, int(k))
                                  for r, k in zip(self.rows, labels)), self.schema)

    def select(self, ids: Iterable[str]) -> "PatternTable":
        keep = set(ids)
        return PatternTable(tuple(r for r in self.rows if r.utterance_id in keep), self.schema)

    def to_tsv(self) -> str:
        with_class = self.labeled
        header = ["utterance_id"] + [c.value for c in self.schema.ids] + (["class"] if with_class else [])
        lines = ["\t".join(header)]
        for r in self.rows:
            cells = [r.utterance_id, *r.pattern.values] + ([str(r.label)] if with_class else [])
            lines.append("\t".join(cells))
        return "\n".join(lines) + "\n"


def read_table(text: str, schema: CueSchema) -> PatternTable:
    """Parse a pattern-table TSV written by :meth:`PatternTable.to_tsv`."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SchemaError("empty pattern table file")
    header = lines[0].split("\t")
    expected = ["utterance_id"] + [c.value for c in schema.ids]
    if header[:len(expected)] != expected or header[len(expected):] not in ([], ["class"]):
        raise SchemaError(f"table header {header} does not match schema {schema.schema_id}")
    with_class = header[-1] == "class"
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split("\t")
        if len(cells) != len(header):
            raise SchemaError(f"line {lineno}: expected {len(header)} columns, got {len(cells)}")
        values = cells[1:len(expected)]
        label = int(cells[-1]) if with_class else None
        rows.append(PatternRow(cells[0], CuePattern(tuple(values), schema), label))
    return PatternTable(tuple(rows), schema)


# --- individual cues -----------------------------------------------------------

def strip_leading_conjunction(utterance: Utterance, lexicon: CueLexicon) -> tuple:
    """Tokens of ``utterance`` minus any leading conjunctions."""
    tokens = utterance.tokens
    i = 0
    while i < len(tokens) and tokens[i].norm in lexicon.conjunctions:
        i += 1
    return tokens[i:]


def _content(utterance: Utterance, lexicon: CueLexicon) -> list:
    return [t for t in strip_leading_conjunction(utterance, lexicon) if t.pos is not POS.PUNCT]


def _first_finite(content) -> int | None:
    return next((i for i, t in enumerate(content) if t.pos is POS.FIN_V), None)


def _is_subject_pronoun(tok, verb, lexicon: CueLexicon) -> bool:
    if tok.pos is not POS.PRON or tok.norm in lexicon.object_pronouns:
        return False
    if verb is None or verb.person is None:
        return True
    person = tok.person or Person.P3
    # polite "u" also takes third-person verb forms: "heeft u"
    agrees = person is verb.person or (person is Person.P2 and verb.person is Person.P3)
    if tok.pron_subtype is PronSubtype.PERSONAL and not agrees:
        return False
    if tok.pron_subtype is not PronSubtype.PERSONAL and verb.person is not Person.P3:
        return False
    return True


def _subject_at(content, i: int, verb, lexicon: CueLexicon) -> bool:
    """Whether a subject expression starts at content position ``i``."""
    if i >= len(content):
        return False
    tok = content[i]
    if tok.pos is POS.PRON:
        return _is_subject_pronoun(tok, verb, lexicon)
    if tok.pos in _NOMINAL and _nominal_head(content, i) is not None:
        return verb is None or verb.person in (None, Person.P3)
    return False


def _nominal_run(content, i: int) -> list:
    run = []
    chunk = content[i].chunk_index
    for j in range(i, len(content)):
        t = content[j]
        if t.chunk_index != chunk:
            break
        # coordinated names stay one run: "Mini en Maxi"
        coordinated = (t.pos is POS.CONJ and run and j + 1 < len(content)
                       and content[j + 1].pos in _NOMINAL and content[j + 1].chunk_index == chunk)
        if t.pos not in _NOMINAL and not coordinated:
            break
        run.append(t)
    return run


def _nominal_head(content, i: int):
    run = _nominal_run(content, i)
    return run if any(t.pos in _HEADS for t in run) else None


def _second_position(content, fin: int) -> bool:
    if all(t.chunk_index is not None for t in content):
        ranks = list(dict.fromkeys(t.chunk_index for t in content))
        return ranks.index(content[fin].chunk_index) == 1
    return fin == 1


def _chunks(content) -> list:
    if not all(t.chunk_index is not None for t in content):
        return [content]
    groups: dict[int, list] = {}
    for t in content:
        groups.setdefault(t.chunk_index, []).append(t)
    return list(groups.values())


def utterance_type(utterance: Utterance, lexicon: CueLexicon) -> UtteranceType:
    """Mood or phrase category of an utterance, by a fixed decision list.

    Order: CON, THA, GRE, EXC (whole-content lexicon matches), WHQ, YNQ,
    IMP, DEC, PRE, NOM, ADJ, with MIS as the fallback.
    """
    content = _content(utterance, lexicon)
    if not content:
        return UtteranceType.MIS

    forms = {" ".join(t.norm for t in content), " ".join(t.surface.lower() for t in content)}
    if forms & (lexicon.confirm_words | lexicon.negate_words):
        return UtteranceType.CON
    if forms & lexicon.thanking_words:
        return UtteranceType.THA
    if forms & lexicon.greeting_words:
        return UtteranceType.GRE
    if forms & lexicon.interjections or all(t.pos is POS.INTJ for t in content):
        return UtteranceType.EXC

    fin = _first_finite(content)
    before = content[:fin] if fin is not None else content[:1]
    wh_before = any(t.norm in lexicon.wh_words for t in before)
    if wh_before:
        return UtteranceType.WHQ

    first = content[0]
    if fin == 0 and _subject_at(content, 1, first, lexicon):
        return UtteranceType.YNQ
    if (first.pos is POS.FIN_V and first.person in (Person.P1, Person.P3)
            and first.number is not Number.PL
            and not any(_is_subject_pronoun(t, first, lexicon) for t in content[1:])):
        return UtteranceType.IMP
    if first.pos is POS.INF_V and not any(_is_subject_pronoun(t, None, lexicon)
                                           and t.pron_subtype is PronSubtype.PERSONAL
                                           for t in content[1:]):
        return UtteranceType.IMP
    if fin is not None and _second_position(content, fin):
        return UtteranceType.DEC

    if not any(t.pos in VERBS for t in content):
        if all(chunk[0].pos is POS.PREP for chunk in _chunks(content)):
            return UtteranceType.PRE
        if all(t.pos in _NOM_ONLY for t in content) and any(t.pos in _HEADS for t in content):
            return UtteranceType.NOM
        if all(t.pos in _ADJ_ONLY for t in content):
            return UtteranceType.ADJ
    return UtteranceType.MIS


def _pronoun_type(tok) -> SubjectType:
    sub = tok.pron_subtype
    if sub is PronSubtype.DEMONSTRATIVE:
        return SubjectType.DEM
    if sub is PronSubtype.INTERROGATIVE:
        return SubjectType.INT
    if sub is PronSubtype.OTHER:
        return SubjectType.OTHER
    return {Person.P1: SubjectType.P1, Person.P2: SubjectType.P2}.get(tok.person, SubjectType.P3)


def _nominal_type(run, lexicon: CueLexicon) -> SubjectType:
    names = [j for j, t in enumerate(run) if t.pos is POS.PROPER]
    if names:
        name = " ".join(t.norm for t in run[names[0]:names[-1] + 1])
        if name in lexicon.domain_nouns:
            return lexicon.domain_nouns[name]
    for t in run:
        if t.norm in lexicon.domain_nouns:
            return lexicon.domain_nouns[t.norm]
    return SubjectType.OTHER


def _expression_type(content, i: int, verb, lexicon: CueLexicon) -> SubjectType | None:
    if i is None or i >= len(content) or not _subject_at(content, i, verb, lexicon):
        return None
    tok = content[i]
    if tok.pos is POS.PRON:
        return _pronoun_type(tok)
    return _nominal_type(_nominal_run(content, i), lexicon)


def _after(content, fin: int) -> int:
    """Content position of the constituent following the finite verb."""
    verb_chunk = content[fin].chunk_index
    i = fin + 1
    if verb_chunk is not None:
        while i < len(content) and content[i].chunk_index == verb_chunk:
            i += 1
    return i


def subject_type(utterance: Utterance, ut: UtteranceType, lexicon: CueLexicon) -> SubjectType:
    """Superficial type of the grammatical subject (WHQ, YNQ and DEC only)."""
    ut = UtteranceType(ut)
    if ut not in (UtteranceType.WHQ, UtteranceType.YNQ, UtteranceType.DEC):
        return SubjectType.NONE
    content = _content(utterance, lexicon)
    fin = _first_finite(content)
    verb = content[fin] if fin is not None else None
    found = None

    if ut is UtteranceType.WHQ:
        wh = next(i for i, t in enumerate(content) if t.norm in lexicon.wh_words)
        if content[wh].pos is POS.PRON:
            found = _pronoun_type(content[wh])
        else:
            start = _after(content, fin) if fin is not None else wh + 1
            for i in range(start, len(content)):
                found = _expression_type(content, i, verb, lexicon)
                if found is not None:
                    break
    elif ut is UtteranceType.YNQ:
        found = _expression_type(content, _after(content, fin), verb, lexicon)
    else:
        found = _expression_type(content, 0, verb, lexicon)
        if found is None:
            # inverted declarative: "2 zei ik toch?"
            found = _expression_type(content, _after(content, fin), verb, lexicon)
    return found if found is not None else SubjectType.NONE


def _verb_class(tok, later, lexicon: CueLexicon) -> VerbType:
    known = lexicon.verb_classes.get(tok.norm)
    if known is not None:
        return known
    if tok.pos is POS.FIN_V and any(t.pos is POS.INF_V for t in later):
        return VerbType.AUX
    return VerbType.DOMAIN


def verb_types(utterance: Utterance, lexicon: CueLexicon) -> tuple:
    """Types of the first and second verb in surface order (NONE if absent)."""
    tokens = utterance.tokens
    idx = [i for i, t in enumerate(tokens) if t.pos in VERBS][:2]
    types = [_verb_class(tokens[i], tokens[i + 1:], lexicon) for i in idx]
    types += [VerbType.NONE] * (2 - len(types))
    return types[0], types[1]


def lexical_cues(utterance: Utterance, lexicon: CueLexicon) -> tuple:
    """(wh-word present, ends in question mark, first cue word or NO_CUE_WORD)."""
    tokens = utterance.tokens
    wh = any(t.norm in lexicon.wh_words for t in tokens)
    punct = [t for t in tokens if t.pos is POS.PUNCT and t.surface.strip("'\"`") != ""]
    qm = bool(punct) and "?" in punct[-1].surface
    cw = next((t.norm for t in tokens if t.norm in lexicon.cue_words), NO_CUE_WORD)
    return wh, qm, cw


# --- patterns ---------------------------------------------------------------------

def cue_values(utterance: Utterance, lexicon: CueLexicon) -> dict:
    """Code for every base cue (all cues except PREV_CLASS)."""
    ut = utterance_type(utterance, lexicon)
    st = subject_type(utterance, ut, lexicon)
    fvt, svt = verb_types(utterance, lexicon)
    wh, qm, cw = lexical_cues(utterance, lexicon)
    return {
        CueId.SPEAKER: SPEAKER_CODES[utterance.speaker],
        CueId.UT: ut.value,
        CueId.WH: YES if wh else NO,
        CueId.ST: st.value,
        CueId.CW: cw,
        CueId.FVT: fvt.value,
        CueId.SVT: svt.value,
        CueId.QM: YES if qm else NO,
    }


def extract_pattern(utterance: Utterance, schema: CueSchema, lexicon: CueLexicon) -> CuePattern:
    if CueId.PREV_CLASS in schema.ids:
        raise SchemaError("PREV_CLASS is added by add_context_cue, not extracted")
    values = cue_values(utterance, lexicon)
    return CuePattern(tuple(values[c] for c in schema.ids), schema)


def extract_table(corpus: Corpus, schema: CueSchema, lexicon: CueLexicon) -> "PatternTable":
    rows = tuple(PatternRow(u.id, extract_pattern(u, schema, lexicon)) for u in corpus.utterances)
    return PatternTable(rows, schema)


def tabulate(patterns: Iterable) -> PatternTable:
    """Pattern table from ``(utterance_id, pattern[, label])`` tuples."""
    rows = []
    for item in patterns:
        if isinstance(item, PatternRow):
            rows.append(item)
        else:
            rows.append(PatternRow(*item))
    schemas = {r.pattern.schema for r in rows}
    if len(schemas) > 1:
        raise SchemaError(f"patterns use {len(schemas)} different schemas")
    return PatternTable(tuple(rows), rows[0].pattern.schema if rows else None)


def add_context_cue(table: PatternTable, corpus: Corpus, n_classes: int | None = None) -> PatternTable:
    """Append the class of the preceding utterance as a PREV_CLASS cue.

    The preceding utterance is the nearest earlier utterance of the same
    dialogue that has a row in ``table``; dialogue-initial rows get START.
    """
    if not table.labeled:
        raise ValueError("add_context_cue needs a class label on every row")
    if CueId.PREV_CLASS in table.schema.ids:
        raise SchemaError("table already has a PREV_CLASS cue")
    by_id = {r.utterance_id: r for r in table.rows}
    missing = [i for i in by_id if i not in corpus.by_id]
    if missing:
        raise KeyError(f"utterance id {missing[0]!r} not in corpus")
    if n_classes is None:
        n_classes = max(r.label for r in table.rows) + 1
    schema = table.schema.extended(CueId.PREV_CLASS, default_alphabet(CueId.PREV_CLASS, None, n_classes))

    previous: dict[str, str] = {}
    for ids in corpus.dialogues.values():
        prev = START
        for uid in ids:
            row = by_id.get(uid)
            if row is None:
                continue
            previous[uid] = prev
            prev = str(row.label)
    rows = tuple(PatternRow(r.utterance_id, CuePattern(r.pattern.values + (previous[r.utterance_id],), schema),
                            r.label) for r in table.rows)
    return PatternTable(rows, schema)
