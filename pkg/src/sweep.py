"""Experiment orchestration: single runs, (prefix length x budget x selector x
seed) sweeps, the CE minus VGA difference surface, per-budget summaries and
the classifier comparison.
"""

import sys
import os
import dataclasses
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

# Ensure src directory is in path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import config
from brute_force import select_brute_force
from core.metrics import accuracy
from cost_model import load_costs
from cross_entropy import select_cross_entropy
from evaluator import SelectionEvaluator
from greedy import select_greedy
from ingest import Source, load_dataset, stratified_split
from loss_model import build_default_loss, load_loss
from models import (
    ClassifierConfig,
    CostVector,
    Dataset,
    ExperimentPlan,
    LossMatrix,
    SelectionResult,
    SelectionVector,
    Split,
)
from ranking import rank_features, read_ranking
from risk import evaluate_selection
from synthgen import generate

RESULT_COLUMNS = [
    "run_id", "selector", "classifier", "m", "lambda", "seed", "risk", "utility",
    "total_cost", "macro_f1", "n_selected", "wall_time_ms", "selected_mask", "status",
]
SORT_COLUMNS = ["m", "lambda", "selector", "seed"]
GREEDY_SELECTORS = {"cga": "cost", "rga": "risk", "vga": "value"}


class Problem(NamedTuple):
    dataset: Dataset
    costs: CostVector
    loss: LossMatrix


def open_source(path: Union[str, Path], what: str) -> Source:
    """'-' reads stdin; anything else must be an existing file."""
    if str(path) == "-":
        return sys.stdin
    if not Path(path).is_file():
        raise FileNotFoundError(f"{what} file not found: {path}")
    return str(path)


def load_problem(plan: ExperimentPlan) -> Problem:
    """Loads the plan's CSV inputs, or generates its synthetic instance."""
    if plan.synth_spec is not None:
        dataset, costs = generate(plan.synth_spec)
    else:
        dataset = load_dataset(
            open_source(plan.features_path, "Features"),
            open_source(plan.devices_path, "Devices"),
        )
        costs = load_costs(open_source(plan.costs_path, "Costs"), dataset.feature_names)
    if plan.loss_path:
        loss = load_loss(open_source(plan.loss_path, "Loss"), dataset.devices)
    else:
        loss = build_default_loss(dataset.devices)
    return Problem(dataset, costs, loss)


def run_selector(
    selector: str,
    problem: Problem,
    split: Split,
    budget: float,
    plan: ExperimentPlan,
    seed: int,
    evaluator: Optional[SelectionEvaluator] = None,
) -> SelectionResult:
    """Dispatches one selector by its CLI name."""
    dataset, costs, loss = problem
    classifier_config = plan.classifier_config
    if selector == "ce":
        ce_config = dataclasses.replace(plan.ce_config, seed=seed)
        return select_cross_entropy(dataset, split, costs, loss, budget, classifier_config, ce_config, evaluator)
    if selector == "brute":
        return select_brute_force(dataset, split, costs, loss, budget, classifier_config, plan.brute_m_limit, evaluator)
    if selector in GREEDY_SELECTORS:
        return select_greedy(
            dataset, split, costs, loss, budget, classifier_config, GREEDY_SELECTORS[selector], evaluator
        )
    raise ValueError(f"Unknown selector '{selector}'")


def run_id(m: int, budget: float, selector: str, seed: int) -> str:
    return f"m{m}-l{budget:g}-{selector}-s{seed}"


def result_row(result: SelectionResult, classifier: str, m: int, budget: float, seed: int) -> Dict[str, Any]:
    row = result.report.to_row()
    row.update(
        run_id=run_id(m, budget, result.selector_name, seed),
        selector=result.selector_name,
        classifier=classifier,
        m=m,
        seed=seed,
        status="ok",
        wall_time_ms=result.wall_time_ms,
    )
    row["lambda"] = budget
    return row


def skipped_row(selector: str, classifier: str, m: int, budget: float, seed: int) -> Dict[str, Any]:
    row: Dict[str, Any] = {column: np.nan for column in RESULT_COLUMNS}
    row.update(
        run_id=run_id(m, budget, selector, seed),
        selector=selector,
        classifier=classifier,
        m=m,
        seed=seed,
        n_selected=0,
        selected_mask="",
        status="skipped",
    )
    row["lambda"] = budget
    return row


def results_frame(rows: Sequence[Dict[str, Any]]) -> pd.DataFrame:
    frame = pd.DataFrame(list(rows), columns=RESULT_COLUMNS)
    if frame.empty:
        return frame
    return frame.sort_values(SORT_COLUMNS, kind="stable").reset_index(drop=True)


def run_single(plan: ExperimentPlan) -> SelectionResult:
    """First selector, budget and seed of the plan on all features."""
    problem = load_problem(plan)
    seed = plan.seeds[0]
    split = stratified_split(problem.dataset, plan.train_fraction, seed)
    return run_selector(plan.selectors[0], problem, split, plan.budgets[0], plan, seed)


def _prefix_lengths(plan: ExperimentPlan, m: int) -> List[int]:
    lengths = list(plan.prefix_lengths) or [m]
    too_long = [length for length in lengths if length > m]
    if too_long:
        raise ValueError(f"Prefix lengths {too_long} exceed the {m} available features")
    return lengths


def _run_seed(
    plan: ExperimentPlan, problem: Problem, seed: int, file_order: Optional[List[int]] = None
) -> List[Dict[str, Any]]:
    """All (prefix length, budget, selector) cells for one seed. `file_order`
    is the ordering already read for rank scheme "file"."""
    dataset, costs, loss = problem
    classifier = plan.classifier_config.kind
    split = stratified_split(dataset, plan.train_fraction, seed)
    if file_order is not None:
        order = list(file_order)
    else:
        order = rank_features(
            dataset, split, costs, loss, plan.classifier_config, scheme=plan.rank_scheme, seed=seed,
        )

    rows: List[Dict[str, Any]] = []
    for m in _prefix_lengths(plan, dataset.m):
        prefix = order[:m]
        sub_problem = Problem(dataset.restrict_features(prefix), costs.restrict(prefix), loss)
        for budget in plan.budgets:
            for selector in plan.selectors:
                if selector == "brute" and m > plan.brute_m_limit:
                    rows.append(skipped_row(selector, classifier, m, budget, seed))
                    continue
                # fresh evaluator per cell: wall_time_ms covers every fit the selector makes
                result = run_selector(selector, sub_problem, split, budget, plan, seed)
                rows.append(result_row(result, classifier, m, budget, seed))
                if config.VERBOSE:
                    print(f"  {rows[-1]['run_id']}: risk={result.report.risk:.6f}", file=sys.stderr)
    return rows


def _run_seed_worker(args: Tuple[ExperimentPlan, Problem, int, Optional[List[int]]]) -> List[Dict[str, Any]]:
    return _run_seed(*args)


def run_sweep(plan: ExperimentPlan, problem: Optional[Problem] = None) -> pd.DataFrame:
    """Runs the plan's full grid and returns one long-format row per cell,
    sorted by (m, lambda, selector, seed).

    Brute force cells with m above plan.brute_m_limit appear with status
    "skipped". Seeds run in parallel when plan.workers > 1.
    """
    problem = problem or load_problem(plan)
    file_order = None
    if plan.rank_scheme == "file":
        # read once; a stdin ranking cannot be replayed per seed
        file_order = read_ranking(open_source(plan.ranking_path, "Ranking"), problem.dataset.feature_names)
    tasks = [(plan, problem, seed, file_order) for seed in plan.seeds]
    rows: List[Dict[str, Any]] = []
    if plan.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(plan.workers, len(tasks))) as executor:
            for seed_rows in executor.map(_run_seed_worker, tasks):
                rows.extend(seed_rows)
    else:
        for task in tasks:
            rows.extend(_run_seed_worker(task))
    return results_frame(rows)


def difference_surface(results: pd.DataFrame, first: str = "ce", second: str = "vga") -> pd.DataFrame:
    """Mean risk of `first` minus mean risk of `second` per (m, lambda) cell,
    averaged over seeds."""
    ok = results[results["status"] == "ok"]
    for selector in (first, second):
        if selector not in set(ok["selector"]):
            raise ValueError(f"Results contain no '{selector}' rows")
    means = ok.pivot_table(index=["m", "lambda"], columns="selector", values="risk", aggfunc="mean")
    surface = pd.DataFrame({
        f"risk_{first}": means[first],
        f"risk_{second}": means[second],
    }).dropna()
    surface["difference"] = surface[f"risk_{first}"] - surface[f"risk_{second}"]
    return surface.reset_index()


def summarize(results: pd.DataFrame) -> pd.DataFrame:
    """Mean and population standard deviation of risk per (selector, lambda)."""
    ok = results[results["status"] == "ok"]
    if ok.empty:
        raise ValueError("Results contain no completed runs")
    grouped = ok.groupby(["selector", "lambda"], sort=True)["risk"]
    summary = pd.DataFrame({
        "runs": grouped.count(),
        "risk_mean": grouped.mean(),
        "risk_std": grouped.std(ddof=0),
    })
    return summary.reset_index()


def compare_classifiers(
    problem: Problem,
    split: Split,
    order: Sequence[int],
    prefix_lengths: Sequence[int],
    classifier_configs: Sequence[ClassifierConfig],
) -> pd.DataFrame:
    """Macro F1, accuracy, risk and fit+predict time of each classifier on the
    first m ranked features, for each m."""
    dataset, costs, loss = problem
    rows: List[Dict[str, Any]] = []
    for m in prefix_lengths:
        if not 1 <= m <= dataset.m:
            raise ValueError(f"Prefix length {m} is outside 1..{dataset.m}")
        selection = SelectionVector.from_indices(dataset.m, order[:m])
        for classifier_config in classifier_configs:
            started = time.perf_counter()
            report = evaluate_selection(dataset, split, selection, costs, loss, classifier_config)
            rows.append({
                "classifier": classifier_config.kind,
                "m": m,
                "macro_f1": report.macro_f1,
                "accuracy": accuracy(report.confusion),
                "risk": report.risk,
                "wall_time_ms": (time.perf_counter() - started) * 1000.0,
            })
    return pd.DataFrame(rows, columns=["classifier", "m", "macro_f1", "accuracy", "risk", "wall_time_ms"])


def write_frame(frame: pd.DataFrame, path: Optional[Union[str, Path]]) -> None:
    """Writes CSV to `path`, or to stdout when path is None or '-'."""
    if path is None or str(path) == "-":
        frame.to_csv(sys.stdout, index=False)
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
