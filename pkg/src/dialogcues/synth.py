"""Synthetic annotated corpora with planted utterance classes.

Real annotated utterances serve as templates.  The templates are split
at random into ``k`` planted classes; each class draws its templates
with Dirichlet-distributed preferences.  Generated utterances are
grouped into dialogues of fixed length.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from importlib import resources

import numpy as np

from .corpus import Corpus, Utterance, parse_corpus

__all__ = ["PlantedCorpus", "sample_corpus", "generate_corpus"]


def sample_corpus() -> Corpus:
    """The bundled hand-annotated sample corpus."""
    text = resources.files("dialogcues.data").joinpath("sample_corpus.jsonl").read_bytes()
    return parse_corpus(text)


@dataclass(frozen=True)
class PlantedCorpus:
    corpus: Corpus
    labels: dict  # utterance id -> planted class
    templates: dict  # utterance id -> template utterance id

    def labels_tsv(self) -> str:
        lines = ["utterance_id\tclass\ttemplate"]
        lines += [f"{u.id}\t{self.labels[u.id]}\t{self.templates[u.id]}" for u in self.corpus]
        return "\n".join(lines) + "\n"


def generate_corpus(n: int, k: int = 7, seed: int = 0, bank: Corpus | None = None,
                    dialogue_length: int = 20, concentration: float = 2.0) -> PlantedCorpus:
    if n < 1:
        raise ValueError("n must be >= 1")
    bank = bank if bank is not None else sample_corpus()
    templates = list(bank.utterances)
    if not 1 <= k <= len(templates):
        raise ValueError(f"k must lie in [1, {len(templates)}] for a bank of {len(templates)} templates")
    rng = np.random.default_rng(seed)
    owner = np.empty(len(templates), dtype=np.int64)
    order = rng.permutation(len(templates))
    owner[order] = np.arange(len(templates)) % k  # every class owns at least one template
    members = [np.flatnonzero(owner == c) for c in range(k)]
    prefs = [rng.dirichlet(np.full(len(m), concentration)) for m in members]

    classes = rng.integers(0, k, size=n)
    utterances, labels, source = [], {}, {}
    width = len(str((n - 1) // dialogue_length))
    for i, c in enumerate(classes.tolist()):
        t = templates[members[c][rng.choice(len(members[c]), p=prefs[c])]]
        d, pos = divmod(i, dialogue_length)
        uid = f"g{d:0{width}d}-{pos:02d}"
        utterances.append(replace(t, id=uid, dialogue_id=f"g{d:0{width}d}", turn_index=pos,
                                  position_in_turn=0))
        labels[uid] = c
        source[uid] = t.id
    return PlantedCorpus(Corpus(tuple(utterances)), labels, source)
