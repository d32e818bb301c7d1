"""Cross-Entropy feature selection.

Each iteration draws eta Bernoulli(p) masks, drops the ones over budget,
scores the rest by utility U = 1/R, and moves p toward the bit frequencies of
the elite (top 1 - rho) samples:

    p <- alpha * elite_frequency + (1 - alpha) * p

The run ends after t_max iterations or once every p_k is within
epsilon_converge of 0 or 1. The answer is p thresholded at beta, unless that
mask is over budget or riskier than the best feasible sample seen, in which
case the best sample (the incumbent) is returned.
"""

import sys
import os
import math
import time
from typing import List, Optional

import numpy as np

# Ensure src directory is in path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import config
from cost_model import selection_cost, within_budget
from evaluator import SelectionEvaluator
from models import (
    CEConfig,
    CEIterationRecord,
    CETrace,
    ClassifierConfig,
    CostVector,
    Dataset,
    LossMatrix,
    RiskReport,
    SelectionResult,
    SelectionVector,
    Split,
)

SELECTOR_NAME = "ce"


def elite_threshold(utilities: np.ndarray, rho: float) -> float:
    """gamma: the ceil((1 - rho) * n)-th largest utility, rank clamped to [1, n]."""
    n = utilities.size
    rank = min(max(math.ceil((1.0 - rho) * n), 1), n)
    return float(np.sort(utilities)[::-1][rank - 1])


def has_converged(probabilities: np.ndarray, epsilon: float) -> bool:
    return bool(np.max(np.abs(probabilities - np.round(probabilities))) < epsilon)


def _record(
    iteration: int,
    probabilities: np.ndarray,
    incumbent: Optional[RiskReport],
    gamma: Optional[float] = None,
    mean_utility: Optional[float] = None,
    n_feasible: int = 0,
    n_elite: int = 0,
) -> CEIterationRecord:
    return CEIterationRecord(
        iteration=iteration,
        gamma=gamma,
        mean_utility=mean_utility,
        n_feasible=n_feasible,
        n_elite=n_elite,
        probabilities=[float(p) for p in probabilities],
        incumbent_mask=incumbent.selection.to_bits() if incumbent else None,
        incumbent_risk=incumbent.risk if incumbent else None,
    )


def select_cross_entropy(
    dataset: Dataset,
    split: Split,
    costs: CostVector,
    loss: LossMatrix,
    budget: float,
    classifier_config: ClassifierConfig,
    ce_config: Optional[CEConfig] = None,
    evaluator: Optional[SelectionEvaluator] = None,
) -> SelectionResult:
    """Runs the Cross-Entropy search and returns a budget-feasible selection.

    Args:
        dataset, split, costs, loss, classifier_config: The problem instance.
        budget: Inclusive upper bound on the selection's total cost.
        ce_config: Sampling parameters; the seed fixes the whole run.
        evaluator: Optional shared memoizing evaluator for this problem.

    Returns:
        SelectionResult whose trace holds one record per iteration.
    """
    ce_config = ce_config or CEConfig()
    within_budget(0.0, budget)  # validates the budget
    started = time.perf_counter()
    evaluator = evaluator or SelectionEvaluator(dataset, split, costs, loss, classifier_config)
    rng = np.random.default_rng(ce_config.seed)

    m = dataset.m
    probabilities = np.full(m, 0.5)
    incumbent: Optional[RiskReport] = None
    trace = CETrace(rho=ce_config.rho)
    infeasible_streak = 0

    def finish(report: RiskReport, outcome: str) -> SelectionResult:
        trace.outcome = outcome
        return SelectionResult(
            selection=report.selection,
            report=report,
            selector_name=SELECTOR_NAME,
            wall_time_ms=(time.perf_counter() - started) * 1000.0,
            trace=trace,
        )

    for iteration in range(1, ce_config.t_max + 1):
        samples = rng.random((ce_config.eta, m)) < probabilities
        feasible = np.flatnonzero(within_budget(samples.astype(float) @ costs.costs, budget))

        if feasible.size == 0:
            probabilities = probabilities / 2.0
            infeasible_streak += 1
            trace.records.append(_record(iteration, probabilities, incumbent))
            if config.VERBOSE:
                print(f"ce: iteration {iteration}: no feasible sample (streak {infeasible_streak})", file=sys.stderr)
            if infeasible_streak >= ce_config.max_infeasible_streak:
                return finish(evaluator.evaluate(SelectionVector.empty(m)), "empty")
            continue
        infeasible_streak = 0

        # Evaluated in sample-index order.
        reports: List[RiskReport] = [evaluator.evaluate(SelectionVector(samples[i])) for i in feasible]
        utilities = np.array([report.utility for report in reports])
        gamma = elite_threshold(utilities, ce_config.rho)
        elite = utilities >= gamma
        elite_frequency = samples[feasible][elite].mean(axis=0)
        probabilities = ce_config.alpha * elite_frequency + (1.0 - ce_config.alpha) * probabilities

        best = min(reports, key=lambda report: report.risk)
        if incumbent is None or best.risk < incumbent.risk:
            incumbent = best

        trace.records.append(_record(
            iteration,
            probabilities,
            incumbent,
            gamma=gamma,
            mean_utility=float(utilities.mean()),
            n_feasible=int(feasible.size),
            n_elite=int(elite.sum()),
        ))
        if config.VERBOSE:
            print(
                f"ce: iteration {iteration}: feasible={feasible.size} elite={int(elite.sum())} "
                f"gamma={gamma:.6g} incumbent_risk={incumbent.risk:.6f}",
                file=sys.stderr,
            )
        if has_converged(probabilities, ce_config.epsilon_converge):
            break

    thresholded = SelectionVector(probabilities >= ce_config.beta)
    trace.thresholded_mask = thresholded.to_bits()
    if within_budget(selection_cost(costs, thresholded), budget):
        report = evaluator.evaluate(thresholded)
        if incumbent is None or report.risk <= incumbent.risk:
            return finish(report, "threshold")
    if incumbent is not None:
        return finish(incumbent, "incumbent")
    return finish(evaluator.evaluate(SelectionVector.empty(m)), "empty")
