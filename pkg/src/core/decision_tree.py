"""CART decision tree with Gini-impurity splits.

The tree is stored as flat arrays (feature, threshold, left, right, label);
a node with feature == -1 is a leaf. Growth is deterministic for a fixed row
order: impurity ties go to the lower feature index, then the lower threshold,
and leaf ties go to the lower class id.
"""

from typing import List, Optional, Tuple

import numpy as np

LEAF = -1
# Impurities closer than this count as a tie.
IMPURITY_TIE_TOLERANCE = 1e-12


def _best_split(X: np.ndarray, y: np.ndarray, n_classes: int) -> Optional[Tuple[int, float, float]]:
    """(feature, threshold, weighted impurity) of the best split, or None when
    every feature is constant on these rows."""
    n = y.size
    one_hot = np.eye(n_classes, dtype=float)[y]
    totals = one_hot.sum(axis=0)
    left_sizes = np.arange(1, n, dtype=float)
    right_sizes = n - left_sizes

    best: Optional[Tuple[int, float, float]] = None
    for feature in range(X.shape[1]):
        order = np.argsort(X[:, feature], kind="stable")
        values = X[order, feature]
        distinct = values[:-1] < values[1:]
        if not distinct.any():
            continue
        left_counts = np.cumsum(one_hot[order], axis=0)[:-1]
        right_counts = totals - left_counts
        gini_left = 1.0 - np.sum(left_counts ** 2, axis=1) / left_sizes ** 2
        gini_right = 1.0 - np.sum(right_counts ** 2, axis=1) / right_sizes ** 2
        impurity = (left_sizes * gini_left + right_sizes * gini_right) / n
        impurity[~distinct] = np.inf
        position = int(np.argmin(impurity))
        if best is None or impurity[position] < best[2] - IMPURITY_TIE_TOLERANCE:
            low, high = values[position], values[position + 1]
            threshold = (low + high) / 2.0
            if not low <= threshold < high:
                threshold = low
            best = (feature, float(threshold), float(impurity[position]))
    return best


def fit_tree_arrays(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    max_depth: Optional[int],
    min_split: int,
) -> dict:
    """Grows the tree and returns its flat-array parameters."""
    feature: List[int] = []
    threshold: List[float] = []
    left: List[int] = []
    right: List[int] = []
    label: List[int] = []

    def new_node() -> int:
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        label.append(0)
        return len(feature) - 1

    root = new_node()
    stack = [(root, np.arange(y.size), 0)]
    while stack:
        node, rows, depth = stack.pop()
        counts = np.bincount(y[rows], minlength=n_classes)
        label[node] = int(np.argmax(counts))
        if (
            np.count_nonzero(counts) <= 1
            or (max_depth is not None and depth >= max_depth)
            or rows.size < min_split
            or X.shape[1] == 0
        ):
            continue
        split = _best_split(X[rows], y[rows], n_classes)
        if split is None:
            continue
        feature[node], threshold[node] = split[0], split[1]
        goes_left = X[rows, split[0]] <= split[1]
        left[node], right[node] = new_node(), new_node()
        stack.append((right[node], rows[~goes_left], depth + 1))
        stack.append((left[node], rows[goes_left], depth + 1))

    return {
        "feature": np.array(feature, dtype=int),
        "threshold": np.array(threshold, dtype=float),
        "left": np.array(left, dtype=int),
        "right": np.array(right, dtype=int),
        "label": np.array(label, dtype=int),
    }


def predict_tree_arrays(parameters: dict, X: np.ndarray) -> np.ndarray:
    feature = parameters["feature"]
    threshold = parameters["threshold"]
    node = np.zeros(X.shape[0], dtype=int)
    active = feature[node] != LEAF
    while active.any():
        rows = np.flatnonzero(active)
        current = node[rows]
        go_left = X[rows, feature[current]] <= threshold[current]
        node[rows] = np.where(go_left, parameters["left"][current], parameters["right"][current])
        active = feature[node] != LEAF
    return parameters["label"][node]
