import pytest
from pathlib import Path
import sys
import os

import numpy as np

# Add src directory to path
src_path = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'src'))
sys.path.insert(0, src_path)

from core.classifier_interface import fit, fit_decision_tree, fit_gaussian_nb, predict
from core.decision_tree import LEAF
from core.metrics import accuracy, confusion, macro_f1, per_class_f1
from ingest import load_dataset
from models import ClassifierConfig

FIXTURES_DIR = Path(__file__).parent / 'fixtures'


# --- decision tree ---

def test_stump_splits_at_the_midpoint():
    model = fit_decision_tree(np.array([[0.0], [1.0]]), np.array([0, 1]))
    assert model.parameters["feature"][0] == 0
    assert model.parameters["threshold"][0] == pytest.approx(0.5)
    assert predict(model, np.array([[0.2], [0.8]])).tolist() == [0, 1]


def test_pure_node_is_a_single_leaf():
    model = fit_decision_tree(np.array([[1.0], [2.0], [3.0]]), np.array([1, 1, 1]), n_classes=2)
    assert model.parameters["feature"].tolist() == [LEAF]
    assert predict(model, np.array([[100.0]])).tolist() == [1]


def test_zero_features_predicts_the_majority():
    X = np.empty((5, 0))
    model = fit_decision_tree(X, np.array([0, 1, 1, 0, 1]))
    assert predict(model, np.empty((3, 0))).tolist() == [1, 1, 1]


def test_majority_tie_goes_to_lowest_class():
    model = fit_decision_tree(np.empty((2, 0)), np.array([1, 0]))
    assert predict(model, np.empty((1, 0))).tolist() == [0]


def test_equal_impurity_prefers_the_lower_feature():
    model = fit_decision_tree(np.array([[0.0, 0.0], [1.0, 1.0]]), np.array([0, 1]))
    assert model.parameters["feature"][0] == 0


def test_max_depth_zero_is_a_leaf():
    config = ClassifierConfig(kind="tree", max_depth=0)
    model = fit_decision_tree(np.array([[0.0], [1.0], [2.0]]), np.array([0, 1, 1]), config)
    assert model.parameters["feature"].tolist() == [LEAF]
    assert predict(model, np.array([[0.0]])).tolist() == [1]


def test_tree_separates_fixture_classes():
    dataset = load_dataset(FIXTURES_DIR / 'features_small.csv', FIXTURES_DIR / 'devices_small.csv')
    model = fit_decision_tree(dataset.features, dataset.labels)
    assert predict(model, dataset.features).tolist() == dataset.labels.tolist()


def test_tree_is_deterministic():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(40, 3))
    y = rng.integers(0, 3, size=40)
    first = fit_decision_tree(X, y)
    second = fit_decision_tree(X, y)
    for key in first.parameters:
        assert np.array_equal(first.parameters[key], second.parameters[key])


# --- gaussian naive bayes ---

def test_gnb_boundary_is_the_midpoint():
    X = np.array([[-1.0], [1.0], [9.0], [11.0]])
    model = fit_gaussian_nb(X, np.array([0, 0, 1, 1]))
    assert predict(model, np.array([[4.9], [5.1]])).tolist() == [0, 1]


def test_gnb_constant_feature_stays_finite():
    X = np.array([[3.0], [3.0], [3.0]])
    model = fit_gaussian_nb(X, np.array([0, 1, 1]))
    assert np.all(model.parameters["variances"] > 0)
    # equal likelihoods, so the larger prior wins
    assert predict(model, np.array([[3.0]])).tolist() == [1]


def test_gnb_never_predicts_an_absent_class():
    X = np.array([[0.0], [0.1], [5.0], [5.1]])
    model = fit_gaussian_nb(X, np.array([0, 0, 1, 1]), n_classes=3)
    assert model.parameters["log_priors"][2] == -np.inf
    assert 2 not in predict(model, np.linspace(-10, 10, 21).reshape(-1, 1)).tolist()


def test_gnb_exact_tie_goes_to_lowest_class():
    X = np.array([[-1.0], [1.0], [-1.0], [1.0]])
    model = fit_gaussian_nb(X, np.array([0, 0, 1, 1]))
    assert predict(model, np.array([[0.0]])).tolist() == [0]


# --- interface ---

def test_fit_dispatches_on_kind():
    X, y = np.array([[0.0], [1.0]]), np.array([0, 1])
    assert fit(ClassifierConfig(kind="tree"), X, y).kind == "decision_tree"
    assert fit(ClassifierConfig(kind="gnb"), X, y).kind == "gaussian_nb"


def test_predict_rejects_wrong_width():
    model = fit_decision_tree(np.array([[0.0, 1.0], [1.0, 0.0]]), np.array([0, 1]))
    with pytest.raises(ValueError, match="dimension mismatch"):
        predict(model, np.zeros((2, 3)))


def test_predict_on_no_rows():
    model = fit_gaussian_nb(np.array([[0.0, 1.0], [1.0, 0.0]]), np.array([0, 1]))
    assert predict(model, np.empty((0, 2))).size == 0


def test_empty_training_set_is_rejected():
    with pytest.raises(ValueError, match="empty training set"):
        fit_decision_tree(np.empty((0, 2)), np.empty(0, dtype=int))


def test_fitted_parameters_are_read_only():
    model = fit_decision_tree(np.array([[0.0], [1.0]]), np.array([0, 1]))
    with pytest.raises(ValueError):
        model.parameters["threshold"][0] = 9.0


# --- metrics ---

def test_confusion_is_indexed_predicted_then_true():
    matrix = confusion([0, 0], [1, 1], 2)
    assert matrix.counts.tolist() == [[0, 0], [2, 0]]


def test_confusion_half_right():
    matrix = confusion([0, 1, 0, 1], [0, 1, 1, 0], 2)
    assert matrix.counts.tolist() == [[1, 1], [1, 1]]
    assert macro_f1(matrix) == pytest.approx(0.5)
    assert accuracy(matrix) == pytest.approx(0.5)


def test_macro_f1_extremes():
    assert macro_f1(confusion([0, 1, 2], [0, 1, 2], 3)) == pytest.approx(1.0)
    assert macro_f1(confusion([0, 1], [1, 0], 2)) == 0.0


def test_macro_f1_counts_absent_classes_as_zero():
    matrix = confusion([0, 1], [0, 1], 3)
    assert per_class_f1(matrix).tolist() == [1.0, 1.0, 0.0]
    assert macro_f1(matrix) == pytest.approx(2 / 3)


@pytest.mark.parametrize("true, predicted, message", [
    ([0, 1], [0], "Label length mismatch"),
    ([0, 3], [0, 1], "true label out of range"),
    ([0, 1], [-1, 1], "predicted label out of range"),
])
def test_confusion_errors(true, predicted, message):
    with pytest.raises(ValueError, match=message):
        confusion(true, predicted, 2)
