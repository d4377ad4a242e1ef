"""Rule-set generality and classification quality."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = [
    "specificity_index", "ConfusionMatrix", "EvalReport", "confusion_matrix",
    "per_class_accuracy", "round_half_up", "evaluate",
]


def specificity_index(n_rules: int, n_classes: int, n_cpts: int) -> float:
    """(rules - (classes - 1)) / (cue pattern types - (classes - 1)).

    Near 0: a few rules describe many pattern types; 1: one rule per type.
    """
    if n_rules < 0:
        raise ValueError("n_rules must be non-negative")
    denominator = n_cpts - (n_classes - 1)
    if denominator <= 0:
        raise ValueError(f"need more pattern types than classes - 1 (got {n_cpts} and {n_classes})")
    return (n_rules - (n_classes - 1)) / denominator


def round_half_up(x, digits: int = 1) -> Fraction:
    """Round an exact value half-up to ``digits`` decimals."""
    q = Fraction(10) ** digits
    return Fraction(math.floor(Fraction(x) * q + Fraction(1, 2))) / q


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray  # rows actual, columns predicted

    @property
    def class_count(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other):
        return isinstance(other, ConfusionMatrix) and np.array_equal(self.counts, other.counts)


def confusion_matrix(actual: Sequence[int], predicted: Sequence[int], k: int) -> ConfusionMatrix:
    actual = np.asarray(actual, dtype=np.int64).reshape(-1)
    predicted = np.asarray(predicted, dtype=np.int64).reshape(-1)
    if len(actual) != len(predicted):
        raise ValueError(f"length mismatch: {len(actual)} actual vs {len(predicted)} predicted")
    for name, labels in (("actual", actual), ("predicted", predicted)):
        if len(labels) and (labels.min() < 0 or labels.max() >= k):
            raise ValueError(f"{name} label outside [0, {k})")
    counts = np.zeros((k, k), dtype=np.int64)
    np.add.at(counts, (actual, predicted), 1)
    return ConfusionMatrix(counts)


def per_class_accuracy(matrix: ConfusionMatrix) -> np.ndarray:
    """100 * diagonal / row sum per actual class; NaN for empty rows.

    Row-wise, so per actual class: the share of a class' items that the
    rules recover (recall in today's terms).
    """
    rows = matrix.counts.sum(axis=1).astype(float)
    diag = np.diag(matrix.counts).astype(float)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(rows > 0, 100.0 * diag / rows, np.nan)


def _percent_display(matrix: ConfusionMatrix) -> list:
    out = []
    for i in range(matrix.class_count):
        row = int(matrix.counts[i].sum())
        if row == 0:
            out.append("n/a")
        else:
            out.append(f"{float(round_half_up(Fraction(100 * int(matrix.counts[i, i]), row))):.1f} %")
    return out


@dataclass
class EvalReport:
    matrix: ConfusionMatrix
    rule_count: int
    cpt_count: int
    class_count: int

    @property
    def per_class_accuracy(self) -> np.ndarray:
        return per_class_accuracy(self.matrix)

    @property
    def overall_accuracy(self) -> float:
        total = self.matrix.total
        return 100.0 * int(np.trace(self.matrix.counts)) / total if total else math.nan

    @property
    def specificity_index(self) -> float:
        try:
            return specificity_index(self.rule_count, self.class_count, self.cpt_count)
        except ValueError:
            return math.nan

    def to_text(self, si_digits: int = 2) -> str:
        k = self.class_count
        counts = self.matrix.counts
        width = max(5, len(str(counts.max() if counts.size else 0)) + 2)
        head = "Actual\\Predicted" + "".join(f"{j:>{width}}" for j in range(k)) + "   Accuracy"
        lines = [head, "-" * len(head)]
        for i, acc in enumerate(_percent_display(self.matrix)):
            cells = "".join(f"{int(x):>{width}}" for x in counts[i])
            lines.append(f"{i:>16}{cells}   {acc:>8}")
        lines.append("")
        overall = self.overall_accuracy
        lines.append(f"overall accuracy: {overall:.1f} %" if not math.isnan(overall) else "overall accuracy: n/a")
        si = self.specificity_index
        si_text = f"{si:.{si_digits}f}" if not math.isnan(si) else "n/a"
        lines.append(f"{self.rule_count} rules for {self.cpt_count} cue pattern types, "
                     f"{k} classes: SI = {si_text}")
        return "\n".join(lines) + "\n"

    def to_tsv(self) -> str:
        k = self.class_count
        lines = ["actual\t" + "\t".join(f"pred_{j}" for j in range(k)) + "\taccuracy"]
        for i, acc in enumerate(self.per_class_accuracy.tolist()):
            cells = "\t".join(str(int(x)) for x in self.matrix.counts[i])
            lines.append(f"{i}\t{cells}\t{'nan' if math.isnan(acc) else repr(acc)}")
        lines.append("")
        lines.append("metric\tvalue")
        lines.append(f"overall_accuracy\t{self.overall_accuracy!r}")
        lines.append(f"specificity_index\t{self.specificity_index!r}")
        lines.append(f"rule_count\t{self.rule_count}")
        lines.append(f"cpt_count\t{self.cpt_count}")
        lines.append(f"class_count\t{self.class_count}")
        return "\n".join(lines) + "\n"


def evaluate(actual, predicted, k: int, rule_count: int, cpt_count: int) -> EvalReport:
    return EvalReport(confusion_matrix(actual, predicted, k), rule_count, cpt_count, k)
