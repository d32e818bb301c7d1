"""Risk engine: misclassification probabilities, the risk score R(v) and the
utility U(v) = 1/R(v) for one feature selection.
"""

import sys
import os
import time

import numpy as np

# Ensure src directory is in path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import config
from core.classifier_interface import fit, predict
from core.metrics import confusion, macro_f1
from cost_model import selection_cost
from ingest import project
from models import (
    ClassifierConfig,
    ConfusionMatrix,
    CostVector,
    Dataset,
    LossMatrix,
    MisclassMatrix,
    RiskReport,
    SelectionVector,
    Split,
)


def misclass_probs(matrix: ConfusionMatrix) -> MisclassMatrix:
    """Column-normalizes the confusion counts.

    A class with no test rows gets the identity column e_j.
    """
    counts = matrix.counts.astype(float)
    column_sums = counts.sum(axis=0)
    probs = np.eye(matrix.n_classes)
    present = column_sums > 0
    probs[:, present] = counts[:, present] / column_sums[present]
    return MisclassMatrix(probs)


def risk_score(probs: MisclassMatrix, loss: LossMatrix) -> float:
    """R = sum_ij P[i, j] * L[i, j]."""
    if probs.probs.shape != loss.values.shape:
        raise ValueError(
            f"dimension mismatch: probabilities are {probs.probs.shape}, loss is {loss.values.shape}"
        )
    return float(np.sum(probs.probs * loss.values))


def naive_risk_score(probs: MisclassMatrix, loss: LossMatrix) -> float:
    """Double-loop reference for risk_score."""
    if probs.probs.shape != loss.values.shape:
        raise ValueError(
            f"dimension mismatch: probabilities are {probs.probs.shape}, loss is {loss.values.shape}"
        )
    total = 0.0
    n = loss.n
    for i in range(n):
        for j in range(n):
            total += float(probs.probs[i, j]) * float(loss.values[i, j])
    return total


def utility_of(risk: float) -> float:
    """1/R, with a large finite sentinel when R is zero."""
    return 1.0 / risk if risk > 0 else 1.0 / config.ZERO_RISK_EPSILON


def evaluate_selection(
    dataset: Dataset,
    split: Split,
    selection: SelectionVector,
    costs: CostVector,
    loss: LossMatrix,
    classifier_config: ClassifierConfig,
) -> RiskReport:
    """Trains the configured classifier on the selected train columns and
    scores it on the test rows.

    Args:
        dataset: Full dataset.
        split: Train/test row indices.
        selection: Mask over the dataset's m features (may be empty).
        costs: Per-feature costs, for total_cost.
        loss: n x n loss matrix aligned with dataset.devices.
        classifier_config: Classifier kind and hyperparameters.

    Returns:
        RiskReport with risk, utility, cost, confusion, macro F1 and timing.
    """
    started = time.perf_counter()
    if loss.n != dataset.n_classes:
        raise ValueError(f"dimension mismatch: loss is {loss.n}x{loss.n} but there are {dataset.n_classes} devices")
    X_train, y_train = project(dataset, split.train_rows, selection)
    X_test, y_test = project(dataset, split.test_rows, selection)

    model = fit(classifier_config, X_train, y_train, n_classes=dataset.n_classes)
    predicted = predict(model, X_test)
    matrix = confusion(y_test, predicted, dataset.n_classes)
    risk = risk_score(misclass_probs(matrix), loss)

    return RiskReport(
        selection=selection,
        risk=risk,
        utility=utility_of(risk),
        total_cost=selection_cost(costs, selection),
        confusion=matrix,
        macro_f1=macro_f1(matrix),
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
    )
