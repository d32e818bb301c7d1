"""Feature orderings used by the prefix-length sweeps."""

import sys
import os
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

# Ensure src directory is in path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import config
from evaluator import SelectionEvaluator
from greedy import feature_keys, greedy_order
from ingest import Source, read_table
from models import RANK_SCHEMES, ClassifierConfig, CostVector, Dataset, LossMatrix, Split


def read_ranking(ranking_source: Source, feature_names: Sequence[str]) -> List[int]:
    """Reads an ordering file (one feature name per line, optional 'feature'
    header) and returns it as feature indices.

    Raises:
        ValueError: the listed names are not a permutation of feature_names.
    """
    table = read_table(ranking_source, "ranking")
    names = [str(cell).strip() for cell in table.iloc[:, 0]]
    if names and names[0].lower() == "feature" and "feature" not in feature_names:
        names = names[1:]
    positions = {name: k for k, name in enumerate(feature_names)}
    unknown = [name for name in names if name not in positions]
    if unknown:
        raise ValueError(f"Ranking lists unknown feature(s): {unknown}")
    if len(set(names)) != len(names):
        raise ValueError("Ranking lists a feature more than once")
    missing = [name for name in feature_names if name not in set(names)]
    if missing:
        raise ValueError(f"Ranking is not a permutation of the features; missing {missing}")
    return [positions[name] for name in names]


def write_ranking(order: Sequence[int], feature_names: Sequence[str], path: Union[str, Path]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame({"feature": [feature_names[k] for k in order]}).to_csv(path, index=False)


def rank_features(
    dataset: Dataset,
    split: Split,
    costs: CostVector,
    loss: LossMatrix,
    classifier_config: ClassifierConfig,
    scheme: str = "single_risk",
    ranking_source: Optional[Source] = None,
    seed: int = config.DEFAULT_SEED,
    evaluator: Optional[SelectionEvaluator] = None,
) -> List[int]:
    """Permutation of feature indices, best first.

    single_risk: ascending risk of a classifier trained on each feature alone,
        ties by index.
    file: the order read from ranking_source.
    random: a permutation drawn from default_rng(seed).
    """
    if scheme not in RANK_SCHEMES:
        raise ValueError(f"Unknown rank scheme '{scheme}'; expected one of {RANK_SCHEMES}")
    if scheme == "file":
        if ranking_source is None:
            raise ValueError("rank scheme 'file' needs a ranking file")
        return read_ranking(ranking_source, dataset.feature_names)
    if scheme == "random":
        return [int(k) for k in np.random.default_rng(seed).permutation(dataset.m)]
    evaluator = evaluator or SelectionEvaluator(dataset, split, costs, loss, classifier_config)
    return greedy_order(feature_keys(evaluator, "risk"))
