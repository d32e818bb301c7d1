"""Confusion matrix and classification scores."""

import os
import sys

import numpy as np

current_dir = os.path.dirname(os.path.abspath(__file__))
src_dir = os.path.dirname(current_dir)
if src_dir not in sys.path:
    sys.path.insert(0, src_dir)

from models import ConfusionMatrix  # noqa: E402


def confusion(true_labels, predicted_labels, n_classes: int) -> ConfusionMatrix:
    """counts[predicted, true] tallies.

    Raises:
        ValueError: length mismatch or a label outside [0, n_classes).
    """
    true_labels = np.asarray(true_labels, dtype=int)
    predicted_labels = np.asarray(predicted_labels, dtype=int)
    if true_labels.shape != predicted_labels.shape:
        raise ValueError(
            f"Label length mismatch: {true_labels.size} true vs {predicted_labels.size} predicted"
        )
    for name, labels in (("true", true_labels), ("predicted", predicted_labels)):
        if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
            raise ValueError(f"{name} label out of range for {n_classes} classes")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (predicted_labels, true_labels), 1)
    return ConfusionMatrix(counts)


def _safe_ratio(numerator: np.ndarray, denominator: np.ndarray) -> np.ndarray:
    # 0/0 -> 0
    out = np.zeros_like(numerator, dtype=float)
    np.divide(numerator, denominator, out=out, where=denominator > 0)
    return out


def per_class_f1(matrix: ConfusionMatrix) -> np.ndarray:
    counts = matrix.counts.astype(float)
    true_positive = np.diag(counts)
    precision = _safe_ratio(true_positive, counts.sum(axis=1))
    recall = _safe_ratio(true_positive, counts.sum(axis=0))
    return _safe_ratio(2.0 * precision * recall, precision + recall)


def macro_f1(matrix: ConfusionMatrix) -> float:
    """Unweighted mean of per-class F1 over all n classes."""
    if matrix.n_classes == 0:
        return 0.0
    return float(per_class_f1(matrix).mean())


def accuracy(matrix: ConfusionMatrix) -> float:
    total = matrix.total
    return float(np.trace(matrix.counts)) / total if total else 0.0
