"""Evaluation surface: accuracy, F1, confusion matrix, ROC curve, AUC.

Positive class is label 1 (true news). The confusion matrix is
[[TN, FP], [FN, TP]]. AUC is accumulated as an exact integer numerator over
the tie-grouped threshold sweep, so it equals the pairwise ranking statistic
P(score+ > score-) + 0.5 P(tie) down to the last bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class EvalReport:
    accuracy: float
    f1: float
    confusion: list  # [[TN, FP], [FN, TP]]
    roc: list = field(default_factory=list)  # [(fpr, tpr), ...]
    auc: float = 0.0

    def to_text(self) -> str:
        (tn, fp), (fn, tp) = self.confusion
        lines = [
            f"accuracy={self.accuracy!r}",
            f"f1={self.f1!r}",
            f"auc={self.auc!r}",
            f"tn={tn}",
            f"fp={fp}",
            f"fn={fn}",
            f"tp={tp}",
        ]
        return "\n".join(lines) + "\n"

    def roc_csv(self) -> str:
        rows = ["fpr,tpr"]
        rows += [f"{fpr!r},{tpr!r}" for fpr, tpr in self.roc]
        return "\n".join(rows) + "\n"


def _check_pair(pred, truth):
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError(
            f"length mismatch: {pred.shape} predictions vs {truth.shape} truths")
    if pred.size == 0:
        raise ValueError("empty inputs")
    return pred, truth


def confusion_and_accuracy(pred, truth):
    """Counts [[TN, FP], [FN, TP]] and accuracy = (TP+TN)/N."""
    pred, truth = _check_pair(pred, truth)
    tp = int(((pred == 1) & (truth == 1)).sum())
    tn = int(((pred == 0) & (truth == 0)).sum())
    fp = int(((pred == 1) & (truth == 0)).sum())
    fn = int(((pred == 0) & (truth == 1)).sum())
    matrix = [[tn, fp], [fn, tp]]
    return matrix, (tp + tn) / pred.size


def f1_score(pred, truth) -> float:
    """F1 for positive class 1; 0 by convention when undefined."""
    pred, truth = _check_pair(pred, truth)
    tp = int(((pred == 1) & (truth == 1)).sum())
    fp = int(((pred == 1) & (truth == 0)).sum())
    fn = int(((pred == 0) & (truth == 1)).sum())
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2 * precision * recall / (precision + recall)


def roc_auc(scores, truth):
    """Threshold sweep over distinct scores, descending; ties grouped.

    Returns (points, auc) where points run from (0, 0) to (1, 1) with one
    point per distinct score, and auc is the trapezoidal area.
    """
    scores, truth = _check_pair(scores, truth)
    pos_total = int((truth == 1).sum())
    neg_total = int((truth == 0).sum())
    if pos_total == 0 or neg_total == 0:
        raise ValueError("roc_auc needs both classes present in truth")

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_truth = truth[order]

    points = [(0.0, 0.0)]
    tp = fp = 0
    numerator = 0  # exact: 2 * trapezoid area * P * N
    i = 0
    n = scores.size
    while i < n:
        j = i
        while j < n and sorted_scores[j] == sorted_scores[i]:
            j += 1
        group_pos = int((sorted_truth[i:j] == 1).sum())
        group_neg = (j - i) - group_pos
        numerator += group_neg * (2 * tp + group_pos)
        tp += group_pos
        fp += group_neg
        points.append((fp / neg_total, tp / pos_total))
        i = j
    auc = numerator / (2 * pos_total * neg_total)
    return points, auc


def evaluate_scores(scores, truth) -> EvalReport:
    """Full report from class-1 probabilities and binary truth."""
    scores, truth = _check_pair(scores, truth)
    pred = (scores >= 0.5).astype(int)
    matrix, acc = confusion_and_accuracy(pred, truth)
    roc, auc = roc_auc(scores, truth)
    return EvalReport(accuracy=acc, f1=f1_score(pred, truth),
                      confusion=matrix, roc=roc, auc=auc)
