"""Unordered CN2 rule induction over cue patterns.

For each class in turn, a beam search looks for the conjunction of
``cue = value`` tests with the best Laplace accuracy for that class;
accepted rules remove only the covered examples of their own class, and
search stops once no acceptable conjunction is left.  A pattern is
classified by summing the class distributions of every rule it matches.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .cues import CueId, CuePattern, CueSchema, PatternTable, SchemaError

__all__ = [
    "Test", "Complex", "Rule", "RuleSet", "Prediction", "RuleStats",
    "laplace_accuracy", "likelihood_ratio", "induce_rules", "matches",
    "predict", "predict_table", "rule_stats",
]


@dataclass(frozen=True, order=True)
class Test:
    cue: CueId
    value: str

    def __str__(self):
        return f"{self.cue.value} = {self.value}"


class Complex(frozenset):
    """A conjunction of tests, at most one per cue; empty matches everything."""

    def __new__(cls, tests=()):
        tests = [t if isinstance(t, Test) else Test(CueId(t[0]), t[1]) for t in tests]
        cues = [t.cue for t in tests]
        if len(set(cues)) != len(cues):
            raise ValueError(f"complex tests the same cue twice: {sorted(c.value for c in cues)}")
        return super().__new__(cls, tests)

    def sorted_tests(self) -> tuple:
        return tuple(sorted(self))

    def __repr__(self):
        return "Complex(" + " AND ".join(map(str, self.sorted_tests())) + ")"


@dataclass(frozen=True)
class Rule:
    complex: Complex
    distribution: tuple
    target_class: int

    def __post_init__(self):
        object.__setattr__(self, "distribution", tuple(int(x) for x in self.distribution))
        if any(x < 0 for x in self.distribution):
            raise ValueError("negative class count in rule distribution")
        if sum(self.distribution) < 1:
            raise ValueError("rule distribution must cover at least one example")

    def to_text(self, schema: CueSchema | None = None) -> str:
        tests = self.complex.sorted_tests()
        if schema is not None:
            tests = tuple(sorted(tests, key=lambda t: schema.index(t.cue)))
        if tests:
            lines = [f"IF    {tests[0]}"] + [f"  AND {t}" for t in tests[1:]]
        else:
            lines = ["IF    TRUE"]
        dist = " ".join(str(x) for x in self.distribution)
        lines.append(f"THEN  CLASS = {self.target_class}  [{dist}]")
        return "\n".join(lines)


@dataclass(frozen=True)
class RuleSet:
    rules: tuple
    class_count: int
    default_class: int
    schema: CueSchema

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        if not 0 <= self.default_class < self.class_count:
            raise ValueError("default_class out of range")
        for r in self.rules:
            if len(r.distribution) != self.class_count:
                raise ValueError("rule distribution length differs from class_count")

    def __len__(self):
        return len(self.rules)

    @property
    def schema_id(self) -> str:
        return self.schema.schema_id

    def to_text(self) -> str:
        head = (f"# {len(self.rules)} rules, {self.class_count} classes, default class "
                f"{self.default_class}, schema {self.schema_id}\n\n")
        return head + "\n\n".join(r.to_text(self.schema) for r in self.rules) + "\n"

    def to_json(self) -> str:
        doc = {
            "schema_id": self.schema_id,
            "schema": self.schema.to_dict(),
            "class_count": self.class_count,
            "default_class": self.default_class,
            "rules": [{"tests": [[t.cue.value, t.value] for t in r.complex.sorted_tests()],
                       "target_class": r.target_class,
                       "distribution": list(r.distribution)} for r in self.rules],
        }
        return json.dumps(doc, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RuleSet":
        doc = json.loads(text)
        schema = CueSchema.from_dict(doc["schema"])
        if schema.schema_id != doc["schema_id"]:
            raise SchemaError("rule file schema_id does not match its schema")
        rules = tuple(Rule(Complex((c, v) for c, v in r["tests"]), tuple(r["distribution"]),
                           r["target_class"]) for r in doc["rules"])
        return cls(rules, doc["class_count"], doc["default_class"], schema)


class Prediction(NamedTuple):
    label: int
    probabilities: np.ndarray
    matched: tuple
    unmatched: bool


@dataclass(frozen=True)
class RuleStats:
    rule_index: int
    coverage: int
    class_counts: tuple
    laplace: float


# --- quality measures ------------------------------------------------------------

def laplace_accuracy(covered, target: int, class_count: int) -> float:
    """(n_target + 1) / (n_covered + K)."""
    covered = np.asarray(covered)
    if class_count < 2:
        raise ValueError("class_count must be >= 2")
    if not 0 <= target < len(covered) or target >= class_count:
        raise IndexError(f"target class {target} out of range")
    if np.any(covered < 0):
        raise ValueError("negative counts")
    return (float(covered[target]) + 1.0) / (float(covered.sum()) + class_count)


def likelihood_ratio(covered, prior) -> float:
    """2 sum f_i ln(f_i / e_i), e = coverage-scaled class prior."""
    f = np.asarray(covered, dtype=float)
    p = np.asarray(prior, dtype=float)
    total = f.sum()
    if total <= 0 or p.sum() <= 0:
        return 0.0
    e = total * p / p.sum()
    mask = f > 0
    return float(2.0 * np.sum(f[mask] * np.log(f[mask] / e[mask])))


# --- matching ---------------------------------------------------------------

def _schema_check(schema: CueSchema, other: CueSchema):
    if schema != other:
        raise SchemaError(f"schema {other.schema_id} does not match rule schema {schema.schema_id}")


def matches(complex: Complex, pattern: CuePattern) -> bool:
    schema = pattern.schema
    for t in complex:
        if t.cue not in schema.ids:
            raise SchemaError(f"cue {t.cue.value} not in pattern schema")
        if pattern[t.cue] != t.value:
            return False
    return True


def _mask(complex: Complex, codes: np.ndarray, schema: CueSchema) -> np.ndarray:
    m = np.ones(len(codes), dtype=bool)
    for t in complex:
        c = schema.index(t.cue)
        m &= codes[:, c] == schema.alphabets[c].index(t.value)
    return m


# --- induction --------------------------------------------------------------------

def _order_key(quality: float, coverage: float, cx: Complex):
    return (-quality, -coverage, len(cx), cx.sorted_tests())


def _find_best(cpt_codes, counts, target, schema, beam_width, sig_threshold, min_coverage, K):
    """Beam search for the best complex for ``target`` on the working counts."""
    prior = counts.sum(axis=0)
    candidates = [(ci, vi) for ci, size in enumerate(schema.sizes) for vi in range(size)]
    best = None
    star = [Complex()]
    star_masks = {Complex(): np.ones(len(cpt_codes), dtype=bool)}
    seen = {Complex()}
    while star:
        scored = []
        for cx in star:
            used = {schema.index(t.cue) for t in cx}
            base = star_masks[cx]
            for ci, vi in candidates:
                if ci in used:
                    continue
                new = Complex(cx | {Test(schema.ids[ci], schema.alphabets[ci][vi])})
                if new in seen:
                    continue
                seen.add(new)
                mask = base & (cpt_codes[:, ci] == vi)
                covered = counts[mask].sum(axis=0)
                coverage = covered.sum()
                if covered[target] <= 0 or coverage < min_coverage:
                    continue
                q = laplace_accuracy(covered, target, K)
                key = _order_key(q, coverage, new)
                scored.append((key, new, mask))
                if likelihood_ratio(covered, prior) >= sig_threshold and (best is None or key < best[0]):
                    best = (key, new)
        scored.sort(key=lambda item: item[0])
        star = [cx for _, cx, _ in scored[:beam_width]]
        star_masks = {cx: mask for _, cx, mask in scored[:beam_width]}
    return None if best is None else best[1]


def _repair(rules, cpt_codes, full, schema, sig_threshold, min_coverage, default_class):
    """Specialize impure rules until every label-consistent training CPT is
    predicted correctly.

    Summing unordered rules lets a broad impure rule outvote the pure
    rules of a small pattern type.  While such a CPT exists, every impure
    rule covering it is split on its first untested cue (schema order);
    children that cover none of the rule's target examples or fail the
    acceptance tests are dropped.  Splitting stops at full specificity,
    where a rule on a consistent CPT is pure, so the loop terminates.
    """
    prior = full.sum(axis=0)
    labels = np.argmax(full, axis=1)
    consistent = (full > 0).sum(axis=1) == 1
    while True:
        masks = np.array([_mask(r.complex, cpt_codes, schema) for r in rules], dtype=bool).reshape(
            len(rules), len(cpt_codes))
        dists = np.array([r.distribution for r in rules], dtype=np.int64).reshape(len(rules), full.shape[1])
        total = masks.T.astype(np.int64) @ dists
        matched = masks.any(axis=0)
        pred = np.where(matched, np.argmax(total, axis=1), default_class)
        bad = np.flatnonzero(consistent & matched & (pred != labels))
        if not len(bad):
            return rules
        x = bad[0]
        out, seen = [], set()
        for i, r in enumerate(rules):
            impure = dists[i].sum() > dists[i][labels[x]]
            if not (masks[i, x] and impure):
                children = [r]
            else:
                used = {t.cue for t in r.complex}
                ci = next(c for c, cue in enumerate(schema.ids) if cue not in used)
                children = []
                for vi, value in enumerate(schema.alphabets[ci]):
                    cx = Complex(r.complex | {Test(schema.ids[ci], value)})
                    dist = full[_mask(cx, cpt_codes, schema)].sum(axis=0)
                    if (dist[r.target_class] >= 1 and dist.sum() >= min_coverage
                            and likelihood_ratio(dist, prior) >= sig_threshold):
                        children.append(Rule(cx, tuple(dist), r.target_class))
            for child in children:
                key = (child.complex, child.target_class)
                if key not in seen:
                    seen.add(key)
                    out.append(child)
        rules = out


def induce_rules(table: PatternTable, schema: CueSchema | None = None, beam_width: int = 5,
                 sig_threshold: float = 0.0, min_coverage: int = 1,
                 class_count: int | None = None, repair: bool = True) -> RuleSet:
    """Learn an unordered CN2 rule set from a labeled pattern table.

    Candidate complexes are ranked by Laplace accuracy, then coverage,
    then fewer tests, then the sorted tests themselves.  A complex is
    accepted when its likelihood-ratio statistic against the working-set
    class prior reaches ``sig_threshold`` and it covers at least
    ``min_coverage`` working examples.  Stored rule distributions count
    the full training table.

    With ``repair`` (the default) impure rules that make a label-consistent
    training pattern type come out wrong are specialized afterwards, so
    noise-free training data is always reproduced.
    """
    if len(table) == 0:
        raise ValueError("cannot induce rules from an empty table")
    if not table.labeled:
        raise ValueError("induce_rules needs a class label on every row")
    if beam_width < 1:
        raise ValueError("beam_width must be >= 1")
    schema = schema or table.schema
    _schema_check(schema, table.schema)
    labels = table.labels()
    K = int(class_count if class_count is not None else labels.max() + 1)
    if labels.min() < 0 or labels.max() >= K:
        raise ValueError("labels outside [0, class_count)")

    codes = table.codes()
    cpt_codes, inverse = np.unique(codes, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    full = np.zeros((len(cpt_codes), K), dtype=np.int64)
    np.add.at(full, (inverse, labels), 1)
    totals = full.sum(axis=0)
    default_class = int(np.argmax(totals))

    present = np.flatnonzero(totals)
    if len(present) == 1:
        rule = Rule(Complex(), tuple(totals), int(present[0]))
        return RuleSet((rule,), K, default_class, schema)
    K_eff = max(K, 2)

    rules = []
    for target in range(K):
        work = full.copy()
        while work[:, target].sum() > 0:
            cx = _find_best(cpt_codes, work, target, schema, beam_width, sig_threshold, min_coverage, K_eff)
            if cx is None:
                break
            mask = _mask(cx, cpt_codes, schema)
            rules.append(Rule(cx, tuple(full[mask].sum(axis=0)), target))
            work[mask, target] = 0
    if repair and rules:
        rules = _repair(rules, cpt_codes, full, schema, sig_threshold, min_coverage, default_class)
    return RuleSet(tuple(rules), K, default_class, schema)


# --- prediction ---------------------------------------------------------------

def predict(ruleset: RuleSet, pattern: CuePattern) -> Prediction:
    """Sum the distributions of all matching rules; argmax, ties to lowest index.

    With no matching rule the default class is returned with a uniform
    probability vector and ``unmatched`` set.
    """
    _schema_check(ruleset.schema, pattern.schema)
    total = np.zeros(ruleset.class_count, dtype=np.int64)
    matched = []
    for i, r in enumerate(ruleset.rules):
        if matches(r.complex, pattern):
            total += np.asarray(r.distribution)
            matched.append(i)
    if not matched:
        return Prediction(ruleset.default_class,
                          np.full(ruleset.class_count, 1.0 / ruleset.class_count), (), True)
    probs = total / total.sum()
    return Prediction(int(np.argmax(total)), probs, tuple(matched), False)


def predict_table(ruleset: RuleSet, table: PatternTable) -> list:
    return [predict(ruleset, r.pattern) for r in table.rows]


def rule_stats(ruleset: RuleSet, table: PatternTable) -> list:
    """Coverage, per-class counts and Laplace accuracy of each rule on ``table``."""
    _schema_check(ruleset.schema, table.schema)
    codes = table.codes()
    labels = table.labels() if table.labeled else None
    K = ruleset.class_count
    out = []
    for i, r in enumerate(ruleset.rules):
        mask = _mask(r.complex, codes, table.schema)
        if labels is not None:
            counts = np.bincount(labels[mask], minlength=K)
        else:
            counts = np.zeros(K, dtype=np.int64)
        lap = laplace_accuracy(counts, r.target_class, K) if K >= 2 else math.nan
        out.append(RuleStats(i, int(mask.sum()), tuple(int(x) for x in counts), lap))
    return out
