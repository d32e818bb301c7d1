"""Exhaustive search over all 2^m feature masks (the exact oracle)."""

import sys
import os
import time
from typing import Iterator, Optional

import numpy as np

# Ensure src directory is in path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import config
from cost_model import within_budget
from evaluator import SelectionEvaluator
from models import (
    ClassifierConfig,
    CostVector,
    Dataset,
    LossMatrix,
    RiskReport,
    SelectionResult,
    SelectionVector,
    Split,
)

SELECTOR_NAME = "brute"
# Masks decoded per feasibility batch.
ENUMERATION_BLOCK = 1 << 14


def enumerate_masks(m: int) -> Iterator[np.ndarray]:
    """Yields boolean blocks of masks in lexicographic bitstring order
    (feature 0 is the most significant bit), starting at all-zeros."""
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)
    total = 1 << m
    for start in range(0, total, ENUMERATION_BLOCK):
        codes = np.arange(start, min(start + ENUMERATION_BLOCK, total), dtype=np.int64)
        yield ((codes[:, None] >> shifts[None, :]) & 1).astype(bool)


def _better(candidate: RiskReport, best: Optional[RiskReport]) -> bool:
    # Enumeration is lexicographic, so keeping the first of equal
    # (risk, cost) pairs also keeps the lexicographically smallest mask.
    if best is None:
        return True
    return (candidate.risk, candidate.total_cost) < (best.risk, best.total_cost)


def select_brute_force(
    dataset: Dataset,
    split: Split,
    costs: CostVector,
    loss: LossMatrix,
    budget: float,
    classifier_config: ClassifierConfig,
    m_limit: int = config.BRUTE_FORCE_M_LIMIT,
    evaluator: Optional[SelectionEvaluator] = None,
) -> SelectionResult:
    """Minimal-risk feasible mask over all 2^m masks.

    Ties are broken by lower total cost, then by the lexicographically
    smaller mask. The empty mask is always feasible, so a budget below every
    single feature cost returns the empty selection with its majority-model
    risk.

    Raises:
        ValueError: m exceeds m_limit.
    """
    if dataset.m > m_limit:
        raise ValueError(f"Brute force is limited to {m_limit} features, dataset has {dataset.m}")
    started = time.perf_counter()
    evaluator = evaluator or SelectionEvaluator(dataset, split, costs, loss, classifier_config)

    best: Optional[RiskReport] = None
    n_evaluated = 0
    for block in enumerate_masks(dataset.m):
        feasible = within_budget(block.astype(float) @ costs.costs, budget)
        for mask in block[feasible]:
            report = evaluator.evaluate(SelectionVector(mask), store=False)
            n_evaluated += 1
            if _better(report, best):
                best = report

    if config.VERBOSE:
        print(f"brute: {n_evaluated} feasible masks evaluated, best risk {best.risk:.6f}", file=sys.stderr)
    return SelectionResult(
        selection=best.selection,
        report=best,
        selector_name=SELECTOR_NAME,
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
    )
