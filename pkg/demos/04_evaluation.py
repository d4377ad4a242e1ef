"""
Confusion matrices and per-class accuracy
=========================================

Per-class accuracy is the diagonal over the row total, shown to one
decimal with half-up rounding.
"""

import numpy as np

from dialogcues.metrics import ConfusionMatrix, EvalReport, evaluate

counts = np.array([
    [146, 0, 0, 1, 0, 0, 0],
    [3, 131, 0, 0, 0, 0, 0],
    [0, 0, 75, 0, 0, 0, 0],
    [2, 0, 0, 66, 0, 0, 1],
    [6, 0, 0, 0, 78, 2, 0],
    [1, 0, 0, 0, 0, 43, 0],
    [0, 0, 0, 0, 0, 0, 33],
])
print(EvalReport(ConfusionMatrix(counts), rule_count=44, cpt_count=206, class_count=7).to_text())

# from label lists
actual = [0, 0, 1, 1, 2, 2, 2]
predicted = [0, 1, 1, 1, 2, 2, 0]
print(evaluate(actual, predicted, 3, rule_count=4, cpt_count=9).to_tsv())
