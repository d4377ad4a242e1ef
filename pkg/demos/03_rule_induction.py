"""
Readable rules for the discovered classes
=========================================

Unordered CN2 turns class-labeled cue patterns into IF-THEN rules.
Rules that fire together pool their class counts.
"""

from dialogcues.cluster import fit_mixture, generate_synthetic, hard_assign, planted_model
from dialogcues.cues import CueId, CuePattern, build_schema
from dialogcues.metrics import specificity_index
from dialogcues.rules import induce_rules, predict

schema = build_schema([CueId.UT, CueId.ST, CueId.QM])
table, _ = generate_synthetic(planted_model(schema, 3, seed=2), 500, seed=2)
model = fit_mixture(table, 3, seed=0, restarts=10)
labeled = table.with_labels(hard_assign(model, table))

rules = induce_rules(labeled)
print(rules.to_text())

si = specificity_index(len(rules), rules.class_count, labeled.n_cpts)
print(f"{len(rules)} rules for {labeled.n_cpts} pattern types: SI = {si:.2f}")

# a prediction shows which rules fired and the pooled distribution
p = predict(rules, CuePattern(("y", "p", "y"), schema))
print("\nmatched rules:", p.matched, " class:", p.label)
print("probabilities:", [round(float(x), 3) for x in p.probabilities])
