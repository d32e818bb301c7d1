"""Fit/predict entry points for the two supported classifiers.

Everything downstream (risk engine, selectors) goes through `fit` and
`predict`, so adding a classifier means adding a `fit_*` function and a
branch in `predict`.
"""

import os
import sys
from typing import Optional

import numpy as np

current_dir = os.path.dirname(os.path.abspath(__file__))
src_dir = os.path.dirname(current_dir)
if src_dir not in sys.path:
    sys.path.insert(0, src_dir)

from models import CLASSIFIER_KINDS, ClassifierConfig, TrainedModel  # noqa: E402
from core.decision_tree import fit_tree_arrays, predict_tree_arrays  # noqa: E402
from core.naive_bayes import fit_gnb_arrays, predict_gnb_arrays  # noqa: E402


def _check_training_data(X: np.ndarray, y: np.ndarray, n_classes: Optional[int]) -> tuple:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if X.ndim != 2:
        raise ValueError(f"Training matrix must be 2-D, got shape {X.shape}")
    if y.shape != (X.shape[0],):
        raise ValueError(f"Expected {X.shape[0]} training labels, got {y.size}")
    if X.shape[0] == 0:
        raise ValueError("Cannot fit a classifier on an empty training set")
    if y.min() < 0:
        raise ValueError(f"Class labels must be non-negative, got {y.min()}")
    if n_classes is None:
        n_classes = int(y.max()) + 1
    elif y.max() >= n_classes:
        raise ValueError(f"Label {y.max()} out of range for {n_classes} classes")
    return X, y, n_classes


def _freeze(parameters: dict) -> dict:
    for array in parameters.values():
        array.setflags(write=False)
    return parameters


def fit_decision_tree(
    X: np.ndarray,
    y: np.ndarray,
    config: Optional[ClassifierConfig] = None,
    n_classes: Optional[int] = None,
) -> TrainedModel:
    """Grows a CART tree.

    With zero feature columns the tree is a single leaf predicting the
    training majority class (lowest id on ties).

    Raises:
        ValueError: empty training set or label/row count mismatch.
    """
    config = config or ClassifierConfig(kind="tree")
    X, y, n_classes = _check_training_data(X, y, n_classes)
    parameters = fit_tree_arrays(X, y, n_classes, config.max_depth, config.min_split)
    return TrainedModel(
        kind=CLASSIFIER_KINDS["tree"],
        parameters=_freeze(parameters),
        n_classes=n_classes,
        n_features=X.shape[1],
    )


def fit_gaussian_nb(
    X: np.ndarray,
    y: np.ndarray,
    config: Optional[ClassifierConfig] = None,
    n_classes: Optional[int] = None,
) -> TrainedModel:
    """Fits class priors, means and floored variances.

    Classes with no training rows get a log prior of -inf and are never
    predicted.
    """
    config = config or ClassifierConfig(kind="gnb")
    X, y, n_classes = _check_training_data(X, y, n_classes)
    parameters = fit_gnb_arrays(X, y, n_classes, config.var_smoothing)
    return TrainedModel(
        kind=CLASSIFIER_KINDS["gnb"],
        parameters=_freeze(parameters),
        n_classes=n_classes,
        n_features=X.shape[1],
    )


def fit(config: ClassifierConfig, X: np.ndarray, y: np.ndarray, n_classes: Optional[int] = None) -> TrainedModel:
    if config.kind == "tree":
        return fit_decision_tree(X, y, config, n_classes)
    if config.kind == "gnb":
        return fit_gaussian_nb(X, y, config, n_classes)
    raise ValueError(f"Unknown classifier '{config.kind}'")


def predict(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    """One class id per row of X.

    Raises:
        ValueError: X does not have model.n_features columns.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1 and X.size == 0:
        X = X.reshape(0, model.n_features)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ValueError(f"dimension mismatch: model expects {model.n_features} features, got shape {X.shape}")
    if X.shape[0] == 0:
        return np.empty(0, dtype=int)
    if model.kind == CLASSIFIER_KINDS["tree"]:
        return predict_tree_arrays(model.parameters, X)
    if model.kind == CLASSIFIER_KINDS["gnb"]:
        return predict_gnb_arrays(model.parameters, X)
    raise ValueError(f"Unknown model kind '{model.kind}'")
