"""Memoized risk evaluation shared by the selectors."""

import sys
import os
from typing import Dict

# Ensure src directory is in path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from models import ClassifierConfig, CostVector, Dataset, LossMatrix, RiskReport, SelectionVector, Split
from risk import evaluate_selection


class SelectionEvaluator:
    """Binds one (dataset, split, costs, loss, classifier) problem and caches
    a RiskReport per distinct mask.

    Reports are deterministic for a fixed problem, so a cache hit returns
    exactly what a fresh evaluation would (apart from wall time).
    """

    def __init__(
        self,
        dataset: Dataset,
        split: Split,
        costs: CostVector,
        loss: LossMatrix,
        classifier_config: ClassifierConfig,
    ):
        if len(costs) != dataset.m:
            raise ValueError(f"Cost vector has {len(costs)} entries but the dataset has {dataset.m} features")
        if loss.n != dataset.n_classes:
            raise ValueError(f"Loss matrix is {loss.n}x{loss.n} but the dataset has {dataset.n_classes} devices")
        self.dataset = dataset
        self.split = split
        self.costs = costs
        self.loss = loss
        self.classifier_config = classifier_config
        self._cache: Dict[bytes, RiskReport] = {}
        self.n_fits = 0

    @property
    def m(self) -> int:
        return self.dataset.m

    def evaluate(self, selection: SelectionVector, store: bool = True) -> RiskReport:
        """Cached report for `selection`, fitting on a miss.

        With store=False a miss is fitted but not kept; exhaustive scans
        visit each mask once and would otherwise hold all 2^m reports.
        """
        report = self._cache.get(selection.key)
        if report is None:
            report = evaluate_selection(
                self.dataset, self.split, selection, self.costs, self.loss, self.classifier_config
            )
            self.n_fits += 1
            if store:
                self._cache[selection.key] = report
        return report

    def single_feature_reports(self) -> Dict[int, RiskReport]:
        """Report for each one-feature selection, keyed by feature index."""
        return {k: self.evaluate(SelectionVector.from_indices(self.m, [k])) for k in range(self.m)}

    def cache_size(self) -> int:
        return len(self._cache)
