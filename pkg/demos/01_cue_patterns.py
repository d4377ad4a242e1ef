"""
Cue patterns from annotated utterances
======================================

Each utterance of the bundled sample corpus is reduced to a short tuple
of surface cues: utterance type, subject type, verb types and a few
lexical flags.
"""

from dialogcues.cues import FULL_CUES, build_schema, extract_pattern, extract_table
from dialogcues.lexicon import default_lexicon
from dialogcues.synth import sample_corpus

corpus = sample_corpus()
lexicon = default_lexicon()
schema = build_schema(FULL_CUES, lexicon)

# one utterance, cue by cue
u = corpus.by_id["d01-03"]
print(" ".join(t.surface for t in u.tokens))
pattern = extract_pattern(u, schema, lexicon)
for cue, value in zip(schema.ids, pattern.values):
    print(f"  {cue.value:>4} = {value}")

# the whole corpus as a pattern table
table = extract_table(corpus, schema, lexicon)
print(f"\n{len(table)} utterances, {table.n_cpts} distinct cue patterns")
print(table.to_tsv().splitlines()[0])
for line in table.to_tsv().splitlines()[1:6]:
    print(line)
