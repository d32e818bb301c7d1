"""Greedy budgeted selection (CGA, RGA, VGA).

All three share one scan: sort the features by a key, then walk the order
once, keeping each feature whose addition stays within budget and skipping
(not stopping at) the ones that do not.
"""

import sys
import os
import time
from typing import Dict, List, Optional

import numpy as np

# Ensure src directory is in path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from cost_model import within_budget
from evaluator import SelectionEvaluator
from models import ClassifierConfig, CostVector, Dataset, LossMatrix, SelectionResult, SelectionVector, Split

GREEDY_KEYS: Dict[str, str] = {"cost": "cga", "risk": "rga", "value": "vga"}


def feature_keys(evaluator: SelectionEvaluator, key: str) -> np.ndarray:
    """Per-feature sort key.

    cost:  the feature cost
    risk:  risk of a classifier trained on feature k alone
    value: macro F1 of that single-feature classifier divided by its cost
    """
    costs = evaluator.costs.costs
    if key == "cost":
        return np.array(costs, dtype=float)
    reports = evaluator.single_feature_reports()
    if key == "risk":
        return np.array([reports[k].risk for k in range(evaluator.m)], dtype=float)
    if key == "value":
        return np.array([reports[k].macro_f1 / costs[k] for k in range(evaluator.m)], dtype=float)
    raise ValueError(f"Unknown greedy key '{key}'; expected one of {sorted(GREEDY_KEYS)}")


def greedy_order(keys: np.ndarray, descending: bool = False) -> List[int]:
    """Feature indices sorted by key; equal keys keep index order."""
    ordering = -keys if descending else keys
    return [int(k) for k in np.argsort(ordering, kind="stable")]


def budgeted_scan(order: List[int], costs: CostVector, budget: float) -> SelectionVector:
    selection = SelectionVector.empty(len(costs))
    spent = 0.0
    for k in order:
        if within_budget(spent + costs.costs[k], budget):
            selection = selection.with_feature(k)
            spent += float(costs.costs[k])
    return selection


def select_greedy(
    dataset: Dataset,
    split: Split,
    costs: CostVector,
    loss: LossMatrix,
    budget: float,
    classifier_config: ClassifierConfig,
    key: str,
    evaluator: Optional[SelectionEvaluator] = None,
) -> SelectionResult:
    """Runs CGA (key="cost"), RGA (key="risk") or VGA (key="value")."""
    if key not in GREEDY_KEYS:
        raise ValueError(f"Unknown greedy key '{key}'; expected one of {sorted(GREEDY_KEYS)}")
    within_budget(0.0, budget)  # validates the budget
    started = time.perf_counter()
    evaluator = evaluator or SelectionEvaluator(dataset, split, costs, loss, classifier_config)

    order = greedy_order(feature_keys(evaluator, key), descending=(key == "value"))
    selection = budgeted_scan(order, costs, budget)
    report = evaluator.evaluate(selection)
    return SelectionResult(
        selection=selection,
        report=report,
        selector_name=GREEDY_KEYS[key],
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
    )
