"""Builds the per-feature cost vector c from memory/compute/privacy component
levels (median aggregation) and checks selections against a budget.
"""

import math
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

import numpy as np
import pandas as pd

import config
from ingest import Source, read_table
from models import COST_LEVEL_NAMES, CostLevel, CostVector, FeatureCost, SelectionVector

COMPONENTS = ("memory", "compute", "privacy")

# Extraction-mechanism descriptors accepted in place of level words.
COMPONENT_DESCRIPTORS: Dict[str, Dict[str, str]] = {
    "memory": {
        "register": "low", "single_register": "low", "constant": "low",
        "buffer": "medium", "small_buffer": "medium", "queue": "medium",
        "hash_table": "high", "multiple_registers": "high",
    },
    "compute": {
        "counter": "low", "counters": "low",
        "hash_table": "medium", "hashing": "medium",
        "pattern_matching": "high", "sorting": "high",
    },
    "privacy": {
        "header": "low", "packet_header": "low",
        "application_data": "medium", "url": "medium",
        "payload": "high", "packet_payload": "high",
    },
}

# Relative slack on budget comparisons, so scaling costs and budget by the
# same factor cannot flip feasibility through rounding.
BUDGET_TOLERANCE = 1e-9


def level_mapping(values: Optional[Sequence[float]] = None) -> Dict[str, float]:
    """low/medium/high -> numeric cost. Values must be strictly increasing."""
    values = tuple(config.COST_LEVEL_VALUES if values is None else values)
    if len(values) != 3 or not (0 < values[0] < values[1] < values[2]):
        raise ValueError(f"Cost level values must be three positive, strictly increasing numbers, got {values}")
    return dict(zip(COST_LEVEL_NAMES, values))


def parse_level(word: str, component: str, mapping: Dict[str, float]) -> CostLevel:
    """Level word (case-insensitive) or component descriptor -> CostLevel."""
    key = "_".join(word.strip().lower().replace("-", " ").split())
    level = key if key in mapping else COMPONENT_DESCRIPTORS[component].get(key)
    if level is None:
        raise ValueError(f"unrecognized {component} cost level '{word}'")
    return CostLevel(level=level, numeric_value=mapping[level])


def load_costs(
    costs_source: Source,
    feature_names: Sequence[str],
    level_values: Optional[Sequence[float]] = None,
) -> CostVector:
    """Reads costs.csv and aligns it to the dataset's feature order.

    Two layouts are accepted:
        feature,memory,compute,privacy   level words or descriptors, median-aggregated
        feature,cost                     positive numbers, taken verbatim

    Raises:
        ValueError: unknown feature, missing or duplicated feature,
            unrecognized level word, or non-positive numeric cost.
    """
    table = read_table(costs_source, "costs")
    header = [str(cell).strip().lower() for cell in table.iloc[0]]
    if header[:1] != ["feature"]:
        raise ValueError(f"Costs header must start with 'feature', got {header}")
    component_layout = sorted(header[1:]) == sorted(COMPONENTS)
    numeric_layout = header[1:] == ["cost"]
    if not (component_layout or numeric_layout):
        raise ValueError(
            f"Costs header must be 'feature,memory,compute,privacy' or 'feature,cost', got {','.join(header)}"
        )

    mapping = level_mapping(level_values)
    wanted = {name: k for k, name in enumerate(feature_names)}
    costs: Dict[str, float] = {}
    breakdown: Dict[str, FeatureCost] = {}

    for row_number, row in enumerate(table.iloc[1:].itertuples(index=False), start=1):
        cells = list(row)
        if any(not isinstance(cell, str) for cell in cells):
            raise ValueError(f"Costs row {row_number}: expected {len(header)} columns")
        name = cells[0].strip()
        if name not in wanted:
            raise ValueError(f"Costs row {row_number}: unknown feature '{name}'")
        if name in costs:
            raise ValueError(f"Costs row {row_number}: feature '{name}' listed twice")

        if numeric_layout:
            try:
                value = float(cells[1])
            except ValueError:
                raise ValueError(f"Costs row {row_number}: cost '{cells[1]}' for '{name}' is not a number")
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"Costs row {row_number}: non-positive cost {cells[1]} for '{name}'")
            costs[name] = value
        else:
            try:
                levels = {
                    component: parse_level(cells[header.index(component)], component, mapping)
                    for component in COMPONENTS
                }
            except ValueError as e:
                raise ValueError(f"Costs row {row_number} ('{name}'): {e}")
            feature_cost = FeatureCost(feature_name=name, **levels)
            breakdown[name] = feature_cost
            costs[name] = feature_cost.total

    missing = [name for name in feature_names if name not in costs]
    if missing:
        raise ValueError(f"Costs source is missing feature(s): {missing}")

    return CostVector(
        costs=np.array([costs[name] for name in feature_names], dtype=float),
        feature_names=tuple(feature_names),
        breakdown=tuple(breakdown[name] for name in feature_names) if component_layout else None,
    )


def write_costs(costs: CostVector, path: Union[str, Path]) -> None:
    """Writes the numeric 'feature,cost' layout."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame({"feature": list(costs.feature_names), "cost": costs.costs}).to_csv(path, index=False)


def selection_cost(costs: CostVector, selection: SelectionVector) -> float:
    """Summed cost of the selected features."""
    if len(selection) != len(costs):
        raise ValueError(f"Selection has length {len(selection)} but there are {len(costs)} costs")
    return float(np.dot(costs.costs, selection.mask))


def within_budget(total_cost: Union[float, np.ndarray], budget: float) -> Union[bool, np.ndarray]:
    """Inclusive budget test (total <= budget), scalar or vectorized."""
    if budget < 0 or math.isnan(budget):
        raise ValueError(f"Budget must be >= 0, got {budget}")
    if math.isinf(budget):
        return np.ones_like(total_cost, dtype=bool) if isinstance(total_cost, np.ndarray) else True
    limit = budget + BUDGET_TOLERANCE * max(1.0, abs(budget))
    return total_cost <= limit


def is_feasible(costs: CostVector, selection: SelectionVector, budget: float) -> bool:
    return bool(within_budget(selection_cost(costs, selection), budget))

