"""Cue lexicon: the closed word lists cue extraction consults.

File layout: ``[section]`` headers followed by one lemma per line.  The
``verb_classes`` and ``domain_nouns`` sections hold ``lemma<TAB>TYPE``
pairs, where TYPE is a VerbType / SubjectType name or its short code.
Multi-word entries (``tot ziens``) are matched against the whole,
space-joined utterance content.  ``#`` starts a comment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from importlib import resources


class VerbType(str, Enum):
    NONE = "n"
    BE = "z"
    HAVE = "h"
    KNOW_COGNITIVE = "e"
    WANT = "w"
    RESERVE = "r"
    DOMAIN = "d"
    TASK = "t"
    AUX = "x"


class SubjectType(str, Enum):
    NONE = "n"
    P1 = "i"
    P2 = "e"
    P3 = "h"
    INT = "w"
    DEM = "t"
    ARTIST = "a"
    PERFORMANCE = "p"
    DOMAIN_OTHER = "d"
    OTHER = "o"


DOMAIN_SUBJECTS = (SubjectType.ARTIST, SubjectType.PERFORMANCE, SubjectType.DOMAIN_OTHER)

SET_SECTIONS = (
    "wh_words", "cue_words", "greeting_words", "thanking_words",
    "confirm_words", "negate_words", "interjections", "conjunctions",
    "object_pronouns",
)
MAP_SECTIONS = ("verb_classes", "domain_nouns")


class LexiconError(ValueError):
    pass


@dataclass(frozen=True)
class CueLexicon:
    wh_words: frozenset = frozenset()
    cue_words: frozenset = frozenset()
    greeting_words: frozenset = frozenset()
    thanking_words: frozenset = frozenset()
    confirm_words: frozenset = frozenset()
    negate_words: frozenset = frozenset()
    interjections: frozenset = frozenset()
    conjunctions: frozenset = frozenset()
    # non-nominative pronoun lemmas, never counted as subjects
    object_pronouns: frozenset = frozenset()
    verb_classes: dict = field(default_factory=dict)
    domain_nouns: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in SET_SECTIONS:
            object.__setattr__(self, name, frozenset(w.lower() for w in getattr(self, name)))
        object.__setattr__(self, "verb_classes",
                           {k.lower(): VerbType(v) for k, v in self.verb_classes.items()})
        object.__setattr__(self, "domain_nouns",
                           {k.lower(): SubjectType(v) for k, v in self.domain_nouns.items()})
        bad = [v for v in self.domain_nouns.values() if v not in DOMAIN_SUBJECTS]
        if bad:
            raise LexiconError(f"domain_nouns may only map to ARTIST/PERFORMANCE/DOMAIN_OTHER, got {bad[0].name}")
        # the lexical word classes must not overlap
        seen: dict[str, str] = {}
        for name in SET_SECTIONS:
            if name == "object_pronouns":
                continue
            for w in getattr(self, name):
                if w in seen:
                    raise LexiconError(f"{w!r} listed in both {seen[w]} and {name}")
                seen[w] = name

    def __hash__(self):
        return hash(self.fingerprint())

    def fingerprint(self) -> tuple:
        return tuple(tuple(sorted(getattr(self, n))) for n in SET_SECTIONS) + tuple(
            tuple(sorted((k, v.value) for k, v in getattr(self, n).items())) for n in MAP_SECTIONS)

    def to_text(self) -> str:
        out = []
        for name in SET_SECTIONS:
            out.append(f"[{name}]")
            out += sorted(getattr(self, name))
            out.append("")
        for name in MAP_SECTIONS:
            out.append(f"[{name}]")
            out += [f"{k}\t{v.name}" for k, v in sorted(getattr(self, name).items())]
            out.append("")
        return "\n".join(out)


def _parse_type(enum_cls, token: str, lineno: int):
    if token in enum_cls.__members__:
        return enum_cls[token]
    try:
        return enum_cls(token)
    except ValueError:
        raise LexiconError(f"line {lineno}: unknown {enum_cls.__name__} {token!r}") from None


def parse_lexicon(text: str) -> CueLexicon:
    sets: dict[str, set] = {n: set() for n in SET_SECTIONS}
    maps: dict[str, dict] = {n: {} for n in MAP_SECTIONS}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in sets and section not in maps:
                raise LexiconError(f"line {lineno}: unknown section [{section}]")
            continue
        if section is None:
            raise LexiconError(f"line {lineno}: entry outside any section")
        if section in sets:
            sets[section].add(" ".join(line.split()).lower())
            continue
        parts = raw.split("#", 1)[0].strip().split("\t")
        if len(parts) != 2:
            raise LexiconError(f"line {lineno}: expected lemma<TAB>type in [{section}]")
        lemma, code = parts[0].strip().lower(), parts[1].strip()
        enum_cls = VerbType if section == "verb_classes" else SubjectType
        maps[section][lemma] = _parse_type(enum_cls, code, lineno)
    return CueLexicon(**{k: frozenset(v) for k, v in sets.items()}, **maps)


def read_lexicon(path) -> CueLexicon:
    with open(path, encoding="utf-8") as fh:
        return parse_lexicon(fh.read())


def default_lexicon() -> CueLexicon:
    """The bundled Dutch theatre-domain lexicon."""
    text = resources.files("dialogcues.data").joinpath("dutch.lex").read_text(encoding="utf-8")
    return parse_lexicon(text)
