import pytest
from pathlib import Path
import sys
import os

import numpy as np

# Add src directory to path
src_path = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'src'))
sys.path.insert(0, src_path)

from brute_force import select_brute_force
from cost_model import load_costs, within_budget
from cross_entropy import elite_threshold, has_converged, select_cross_entropy
from ingest import load_dataset, stratified_split
from loss_model import build_default_loss
from models import CEConfig, ClassifierConfig, CostVector

FIXTURES_DIR = Path(__file__).parent / 'fixtures'

SMALL_CE = CEConfig(eta=60, t_max=40, seed=11)


@pytest.fixture
def problem():
    dataset = load_dataset(FIXTURES_DIR / 'features_small.csv', FIXTURES_DIR / 'devices_small.csv')
    costs = load_costs(FIXTURES_DIR / 'costs_small.csv', dataset.feature_names)
    loss = build_default_loss(dataset.devices)
    split = stratified_split(dataset, 0.5, seed=0)
    return dataset, split, costs, loss


# --- helpers ---

def test_elite_threshold_ranks():
    utilities = np.arange(1.0, 11.0)
    assert elite_threshold(utilities, 0.9) == 10.0
    assert elite_threshold(utilities, 0.5) == 6.0


def test_elite_threshold_keeps_at_least_one_sample():
    assert elite_threshold(np.array([3.0, 1.0, 2.0]), 0.99) == 3.0


def test_has_converged():
    assert has_converged(np.array([0.0, 0.9995, 1.0]), 1e-3)
    assert not has_converged(np.array([0.0, 0.5]), 1e-3)


# --- select_cross_entropy ---

def test_single_feature_converges_to_selecting_it(problem):
    dataset, split, costs, loss = problem
    dataset, costs = dataset.restrict_features([0]), costs.restrict([0])
    result = select_cross_entropy(dataset, split, costs, loss, float("inf"), ClassifierConfig(), SMALL_CE)
    assert result.selection.to_bits() == "1"
    assert result.report.risk == 0.0
    assert result.trace.outcome == "threshold"
    assert result.trace.records[-1]["probabilities"][0] > 1 - 1e-3


def test_same_seed_same_run(problem):
    first = select_cross_entropy(*problem, 3.0, ClassifierConfig(), SMALL_CE)
    second = select_cross_entropy(*problem, 3.0, ClassifierConfig(), SMALL_CE)
    assert first.selection == second.selection
    assert [r["probabilities"] for r in first.trace.records] == [r["probabilities"] for r in second.trace.records]


def test_incumbent_risk_never_increases(problem):
    result = select_cross_entropy(*problem, 4.0, ClassifierConfig(), SMALL_CE)
    risks = [r["incumbent_risk"] for r in result.trace.records if r["incumbent_risk"] is not None]
    assert risks == sorted(risks, reverse=True)


def test_records_follow_the_iterations(problem):
    result = select_cross_entropy(*problem, 4.0, ClassifierConfig(), SMALL_CE)
    records = result.trace.records
    assert [r["iteration"] for r in records] == list(range(1, len(records) + 1))
    assert len(records) <= SMALL_CE.t_max
    for record in records:
        if record["n_feasible"]:
            assert record["n_elite"] >= 1
        assert record["n_elite"] <= record["n_feasible"] <= SMALL_CE.eta
        assert all(0.0 <= p <= 1.0 for p in record["probabilities"])


@pytest.mark.parametrize("budget", [0.0, 0.5])
def test_budget_below_every_cost_gives_the_empty_selection(problem, budget):
    result = select_cross_entropy(*problem, budget, ClassifierConfig(), SMALL_CE)
    assert result.selection.n_selected == 0
    assert result.report.total_cost == 0.0


@pytest.mark.parametrize("budget", [1.0, 2.0, 3.0, 5.0, float("inf")])
def test_result_is_feasible(problem, budget):
    result = select_cross_entropy(*problem, budget, ClassifierConfig(), SMALL_CE)
    assert within_budget(result.report.total_cost, budget)
    assert result.selector_name == "ce"


@pytest.mark.parametrize("budget", [2.0, float("inf")])
def test_matches_brute_force_on_the_small_instance(problem, budget):
    exact = select_brute_force(*problem, budget, ClassifierConfig())
    result = select_cross_entropy(*problem, budget, ClassifierConfig(), SMALL_CE)
    assert result.report.risk == exact.report.risk


def test_scaling_costs_and_budget_changes_nothing(problem):
    dataset, split, costs, loss = problem
    scaled = CostVector(costs=costs.costs * 10.0, feature_names=costs.feature_names)
    plain = select_cross_entropy(dataset, split, costs, loss, 3.0, ClassifierConfig(), SMALL_CE)
    tenfold = select_cross_entropy(dataset, split, scaled, loss, 30.0, ClassifierConfig(), SMALL_CE)
    assert plain.selection == tenfold.selection


def test_infeasible_streak_returns_the_empty_selection(problem, mocker):
    def nothing_fits(total_cost, budget):
        return np.zeros_like(total_cost, dtype=bool) if isinstance(total_cost, np.ndarray) else False

    mocker.patch("cross_entropy.within_budget", side_effect=nothing_fits)
    config = CEConfig(eta=20, t_max=50, seed=0, max_infeasible_streak=4)
    result = select_cross_entropy(*problem, 1.0, ClassifierConfig(), config)
    assert result.trace.outcome == "empty"
    assert result.selection.n_selected == 0
    assert len(result.trace.records) == 4
    assert result.trace.records[-1]["probabilities"] == [0.5 / 16] * 3
    assert result.trace.records[-1]["incumbent_mask"] is None


def test_trace_writes_jsonl(problem, tmp_path):
    result = select_cross_entropy(*problem, 3.0, ClassifierConfig(), SMALL_CE)
    path = tmp_path / "trace" / "ce.jsonl"
    result.trace.write_jsonl(path)
    assert len(path.read_text().splitlines()) == len(result.trace.records)


def test_negative_budget_is_rejected(problem):
    with pytest.raises(ValueError):
        select_cross_entropy(*problem, -1.0, ClassifierConfig(), SMALL_CE)
