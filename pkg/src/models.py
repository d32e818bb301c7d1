"""Shared domain types: devices, datasets, splits, selections, costs, losses,
classifier state and selector results.

Numeric containers are frozen dataclasses holding read-only numpy arrays, so a
Dataset, Split or CostVector can be handed to several selectors (or worker
processes) without copying.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, TypedDict, Union

import numpy as np

import config


def _frozen_array(values: Any, dtype: Any) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


def normalize_identity(text: str) -> str:
    """Canonical form used when comparing device types and brands."""
    return " ".join(text.split()).casefold()


# --- data_model ---

@dataclass(frozen=True)
class DeviceLabel:
    """One device class with its type and brand. Two classes may share both.

    `label` is the string key used in the data files; `id` is the dense
    0-based class index assigned in devices-file order.
    """
    id: int
    label: str
    type_name: str
    brand: str
    display_name: str = ""

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"Device id must be non-negative, got {self.id}")
        if not self.label.strip():
            raise ValueError(f"Device {self.id}: label must be non-empty")
        if not self.type_name.strip():
            raise ValueError(f"Device '{self.label}': type must be non-empty")
        if not self.brand.strip():
            raise ValueError(f"Device '{self.label}': brand must be non-empty")
        if not self.display_name:
            object.__setattr__(self, "display_name", f"{self.brand.strip()} {self.type_name.strip()}")

    @property
    def type_key(self) -> str:
        return normalize_identity(self.type_name)

    @property
    def brand_key(self) -> str:
        return normalize_identity(self.brand)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Labeled feature matrix plus device metadata."""
    features: np.ndarray
    labels: np.ndarray
    feature_names: Tuple[str, ...]
    devices: Tuple[DeviceLabel, ...]

    def __post_init__(self):
        features = _frozen_array(self.features, float)
        labels = _frozen_array(self.labels, int)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "devices", tuple(self.devices))

        if features.ndim != 2:
            raise ValueError(f"Feature matrix must be 2-D, got shape {features.shape}")
        if features.shape[1] != len(self.feature_names):
            raise ValueError(
                f"Feature matrix has {features.shape[1]} columns but {len(self.feature_names)} feature names"
            )
        if labels.shape != (features.shape[0],):
            raise ValueError(f"Expected {features.shape[0]} labels, got {labels.shape[0]}")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise ValueError("Feature names must be unique")
        if not np.all(np.isfinite(features)):
            row, col = np.argwhere(~np.isfinite(features))[0]
            raise ValueError(f"Non-finite value at row {row + 1}, column {col + 1}")

        ids = [device.id for device in self.devices]
        if ids != list(range(len(ids))):
            raise ValueError(f"Device ids must be 0..n-1 in order, got {ids}")
        if len({device.label for device in self.devices}) != len(self.devices):
            raise ValueError("Device labels must be unique")
        if labels.size and (labels.min() < 0 or labels.max() >= len(self.devices)):
            bad = int(np.flatnonzero((labels < 0) | (labels >= len(self.devices)))[0])
            raise ValueError(f"Row {bad + 1}: label {labels[bad]} has no device metadata")
        counts = self.class_counts
        for device in self.devices:
            if counts[device.id] < 2:
                raise ValueError(
                    f"Device '{device.label}' has {counts[device.id]} rows; every class needs at least 2"
                )

    @property
    def m(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.devices)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=len(self.devices))

    def restrict_features(self, indices: Sequence[int]) -> "Dataset":
        """Dataset over the given columns, in the given order."""
        indices = list(indices)
        return Dataset(
            features=self.features[:, indices],
            labels=self.labels,
            feature_names=tuple(self.feature_names[k] for k in indices),
            devices=self.devices,
        )


@dataclass(frozen=True, eq=False)
class Split:
    """Disjoint train and test row indices."""
    train_rows: np.ndarray
    test_rows: np.ndarray
    seed: int
    train_fraction: float

    def __post_init__(self):
        object.__setattr__(self, "train_rows", _frozen_array(self.train_rows, int))
        object.__setattr__(self, "test_rows", _frozen_array(self.test_rows, int))
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must be in (0, 1), got {self.train_fraction}")
        if np.intersect1d(self.train_rows, self.test_rows).size:
            raise ValueError("Train and test rows overlap")


@dataclass(frozen=True, eq=False)
class SelectionVector:
    """Binary feature mask over the m candidate features."""
    mask: np.ndarray

    def __post_init__(self):
        mask = _frozen_array(self.mask, bool)
        if mask.ndim != 1:
            raise ValueError(f"Selection mask must be 1-D, got shape {mask.shape}")
        object.__setattr__(self, "mask", mask)

    @classmethod
    def empty(cls, m: int) -> "SelectionVector":
        return cls(np.zeros(m, dtype=bool))

    @classmethod
    def full(cls, m: int) -> "SelectionVector":
        return cls(np.ones(m, dtype=bool))

    @classmethod
    def from_indices(cls, m: int, indices: Iterable[int]) -> "SelectionVector":
        mask = np.zeros(m, dtype=bool)
        mask[list(indices)] = True
        return cls(mask)

    @classmethod
    def from_bits(cls, bits: str) -> "SelectionVector":
        if any(ch not in "01" for ch in bits):
            raise ValueError(f"Selection bitstring may only contain 0/1, got '{bits}'")
        return cls(np.array([ch == "1" for ch in bits], dtype=bool))

    def __len__(self) -> int:
        return self.mask.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SelectionVector):
            return NotImplemented
        return self.mask.shape == other.mask.shape and bool(np.array_equal(self.mask, other.mask))

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"SelectionVector('{self.to_bits()}')"

    @property
    def key(self) -> bytes:
        """Hashable memoization key."""
        return np.packbits(self.mask).tobytes() + self.mask.size.to_bytes(4, "little")

    @property
    def indices(self) -> List[int]:
        return [int(k) for k in np.flatnonzero(self.mask)]

    @property
    def n_selected(self) -> int:
        return int(self.mask.sum())

    def with_feature(self, k: int) -> "SelectionVector":
        mask = self.mask.copy()
        mask[k] = True
        return SelectionVector(mask)

    def to_bits(self) -> str:
        return "".join("1" if bit else "0" for bit in self.mask)


# --- cost_model ---

COST_LEVEL_NAMES = ("low", "medium", "high")


@dataclass(frozen=True)
class CostLevel:
    level: str
    numeric_value: float

    def __post_init__(self):
        if self.level not in COST_LEVEL_NAMES:
            raise ValueError(f"Unknown cost level '{self.level}'; expected one of {COST_LEVEL_NAMES}")


@dataclass(frozen=True)
class FeatureCost:
    """Component costs g(compute, memory, privacy) for one feature."""
    feature_name: str
    memory: CostLevel
    compute: CostLevel
    privacy: CostLevel
    total: float = field(default=math.nan)

    def __post_init__(self):
        median = sorted([self.memory.numeric_value, self.compute.numeric_value, self.privacy.numeric_value])[1]
        if math.isnan(self.total):
            object.__setattr__(self, "total", median)
        elif self.total != median:
            raise ValueError(f"Feature '{self.feature_name}': total {self.total} is not the component median {median}")


@dataclass(frozen=True, eq=False)
class CostVector:
    """Per-feature extraction cost c, aligned to dataset feature order."""
    costs: np.ndarray
    feature_names: Tuple[str, ...]
    breakdown: Optional[Tuple[FeatureCost, ...]] = None

    def __post_init__(self):
        costs = _frozen_array(self.costs, float)
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        if costs.ndim != 1 or costs.size != len(self.feature_names):
            raise ValueError(f"Cost vector length {costs.size} does not match {len(self.feature_names)} features")
        if not np.all(np.isfinite(costs)) or np.any(costs <= 0):
            bad = int(np.flatnonzero(~np.isfinite(costs) | (costs <= 0))[0])
            raise ValueError(f"Feature '{self.feature_names[bad]}': cost must be a positive number, got {costs[bad]}")

    def __len__(self) -> int:
        return self.costs.size

    @property
    def total(self) -> float:
        return float(self.costs.sum())

    def restrict(self, indices: Sequence[int]) -> "CostVector":
        indices = list(indices)
        breakdown = None
        if self.breakdown is not None:
            breakdown = tuple(self.breakdown[k] for k in indices)
        return CostVector(self.costs[indices], tuple(self.feature_names[k] for k in indices), breakdown)


# --- loss_model ---

@dataclass(frozen=True, eq=False)
class LossMatrix:
    """n x n misclassification losses; values[i, j] = loss of predicting i for true j."""
    values: np.ndarray
    device_ids: Tuple[int, ...]

    def __post_init__(self):
        values = _frozen_array(self.values, float)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "device_ids", tuple(self.device_ids))
        n = len(self.device_ids)
        if values.shape != (n, n):
            raise ValueError(f"Loss matrix must be {n}x{n}, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("Loss matrix contains non-finite entries")
        if np.any(np.diag(values) != 0):
            i = int(np.flatnonzero(np.diag(values) != 0)[0])
            raise ValueError(f"nonzero diagonal: loss[{i},{i}] = {values[i, i]}")
        if np.any(values < 0):
            i, j = np.argwhere(values < 0)[0]
            raise ValueError(f"negative entry: loss[{i},{j}] = {values[i, j]}")

    @property
    def n(self) -> int:
        return len(self.device_ids)

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.values, self.values.T))


# --- classifiers ---

CLASSIFIER_KINDS = {"tree": "decision_tree", "gnb": "gaussian_nb"}


@dataclass(frozen=True)
class ClassifierConfig:
    """Classifier choice and hyperparameters. max_depth=None means unbounded."""
    kind: str = "tree"
    max_depth: Optional[int] = config.TREE_MAX_DEPTH
    min_split: int = config.TREE_MIN_SPLIT
    var_smoothing: float = config.NB_VAR_SMOOTHING

    def __post_init__(self):
        if self.kind not in CLASSIFIER_KINDS:
            raise ValueError(f"Unknown classifier '{self.kind}'; expected one of {sorted(CLASSIFIER_KINDS)}")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError(f"max_depth must be >= 0, got {self.max_depth}")
        if self.min_split < 2:
            raise ValueError(f"min_split must be >= 2, got {self.min_split}")
        if self.var_smoothing <= 0:
            raise ValueError(f"var_smoothing must be positive, got {self.var_smoothing}")


@dataclass(frozen=True, eq=False)
class TrainedModel:
    """Fitted classifier state. `parameters` holds read-only arrays."""
    kind: str
    parameters: Dict[str, Any]
    n_classes: int
    n_features: int


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """counts[i, j] = number of true-class-j rows predicted as class i."""
    counts: np.ndarray

    def __post_init__(self):
        counts = _frozen_array(self.counts, np.int64)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ValueError(f"Confusion matrix must be square, got shape {counts.shape}")
        if np.any(counts < 0):
            raise ValueError("Confusion matrix counts must be non-negative")
        object.__setattr__(self, "counts", counts)

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def column_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)


# --- risk_engine ---

@dataclass(frozen=True, eq=False)
class MisclassMatrix:
    """Column-stochastic misclassification probabilities; probs[i, j] = Pr(predicted i | true j)."""
    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "probs", _frozen_array(self.probs, float))


@dataclass(frozen=True, eq=False)
class RiskReport:
    selection: SelectionVector
    risk: float
    utility: float
    total_cost: float
    confusion: ConfusionMatrix
    macro_f1: float
    wall_time_ms: float

    def __post_init__(self):
        if self.risk < 0:
            raise ValueError(f"Risk must be non-negative, got {self.risk}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "selected_mask": self.selection.to_bits(),
            "n_selected": self.selection.n_selected,
            "risk": self.risk,
            "utility": self.utility,
            "total_cost": self.total_cost,
            "macro_f1": self.macro_f1,
            "confusion": self.confusion.counts.tolist(),
            "wall_time_ms": self.wall_time_ms,
        }

    def to_row(self) -> Dict[str, Any]:
        """Scalar columns of a long-format results row."""
        row = self.to_dict()
        del row["confusion"]
        return row


# --- selectors ---

@dataclass(frozen=True)
class CEConfig:
    eta: int = config.CE_ETA
    t_max: int = config.CE_TMAX
    rho: float = config.CE_RHO
    alpha: float = config.CE_ALPHA
    beta: float = config.CE_BETA
    seed: int = config.DEFAULT_SEED
    epsilon_converge: float = config.CE_EPSILON_CONVERGE
    max_infeasible_streak: int = config.CE_MAX_INFEASIBLE_STREAK

    def __post_init__(self):
        if self.eta < 10:
            raise ValueError(f"eta must be >= 10, got {self.eta}")
        if self.t_max < 1:
            raise ValueError(f"t_max must be >= 1, got {self.t_max}")
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must be in (0, 1), got {self.rho}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must be in (0, 1), got {self.beta}")
        if self.epsilon_converge <= 0:
            raise ValueError(f"epsilon_converge must be positive, got {self.epsilon_converge}")
        if self.max_infeasible_streak < 1:
            raise ValueError(f"max_infeasible_streak must be >= 1, got {self.max_infeasible_streak}")


class CEIterationRecord(TypedDict):
    """State of one Cross-Entropy iteration."""
    iteration: int
    gamma: Optional[float]        # None when no sample was feasible
    mean_utility: Optional[float]
    n_feasible: int               # samples within budget
    n_elite: int
    probabilities: List[float]    # p-hat after the update
    incumbent_mask: Optional[str]
    incumbent_risk: Optional[float]


@dataclass
class CETrace:
    rho: float
    records: List[CEIterationRecord] = field(default_factory=list)
    thresholded_mask: Optional[str] = None
    outcome: str = ""  # "threshold", "incumbent" or "empty"

    def write_jsonl(self, path: Union[str, Path]) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            for record in self.records:
                f.write(json.dumps(record) + "\n")


@dataclass(frozen=True, eq=False)
class SelectionResult:
    selection: SelectionVector
    report: RiskReport
    selector_name: str
    wall_time_ms: float
    trace: Optional[CETrace] = None


# --- synthgen ---

@dataclass(frozen=True)
class SynthSpec:
    """Synthetic instance description. types/brands default to an assignment
    that produces every loss value {0,1,2,3} (see synthgen)."""
    n_devices: int = 4
    m_features: int = 10
    n_informative: int = 2
    rows_per_device: int = 40
    class_separation: float = 10.0
    noise_std: float = 1.0
    seed: int = 0
    types: Optional[Tuple[str, ...]] = None
    brands: Optional[Tuple[str, ...]] = None
    cost_cycle: Tuple[float, ...] = (1.0, 2.0, 3.0)

    def __post_init__(self):
        if self.n_devices < 2:
            raise ValueError(f"n_devices must be >= 2, got {self.n_devices}")
        if self.m_features < 1:
            raise ValueError(f"m_features must be >= 1, got {self.m_features}")
        if not 0 <= self.n_informative <= self.m_features:
            raise ValueError(f"n_informative must be in [0, m_features], got {self.n_informative}")
        if self.rows_per_device < 4:
            raise ValueError(f"rows_per_device must be >= 4, got {self.rows_per_device}")
        if self.class_separation <= 0 or self.noise_std <= 0:
            raise ValueError("class_separation and noise_std must be positive")
        for name, values in (("types", self.types), ("brands", self.brands)):
            if values is not None and len(values) != self.n_devices:
                raise ValueError(f"{name} must list {self.n_devices} entries, got {len(values)}")
        if not self.cost_cycle or any(c <= 0 for c in self.cost_cycle):
            raise ValueError("cost_cycle must be a non-empty list of positive costs")


# --- cli ---

SELECTOR_NAMES = ("ce", "brute", "cga", "rga", "vga")
RANK_SCHEMES = ("single_risk", "file", "random")


@dataclass(frozen=True)
class ExperimentPlan:
    """Grid of (prefix length m, budget, selector, seed) cells over one dataset.

    Data comes either from the three CSV paths or from `synth_spec`.
    An empty `prefix_lengths` means "all features".
    """
    selectors: Tuple[str, ...]
    budgets: Tuple[float, ...]
    seeds: Tuple[int, ...] = (config.DEFAULT_SEED,)
    prefix_lengths: Tuple[int, ...] = ()
    features_path: Optional[str] = None
    devices_path: Optional[str] = None
    costs_path: Optional[str] = None
    loss_path: Optional[str] = None
    synth_spec: Optional[SynthSpec] = None
    classifier_config: ClassifierConfig = field(default_factory=ClassifierConfig)
    ce_config: CEConfig = field(default_factory=CEConfig)
    train_fraction: float = config.DEFAULT_TRAIN_FRACTION
    rank_scheme: str = "single_risk"
    ranking_path: Optional[str] = None
    brute_m_limit: int = config.BRUTE_FORCE_M_LIMIT
    workers: int = config.DEFAULT_WORKERS
    output_path: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "selectors", tuple(self.selectors))
        object.__setattr__(self, "budgets", tuple(float(b) for b in self.budgets))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        object.__setattr__(self, "prefix_lengths", tuple(int(p) for p in self.prefix_lengths))
        if not self.selectors:
            raise ValueError("At least one selector is required")
        unknown = [s for s in self.selectors if s not in SELECTOR_NAMES]
        if unknown:
            raise ValueError(f"Unknown selector(s) {unknown}; expected some of {SELECTOR_NAMES}")
        if not self.budgets or any(b < 0 or math.isnan(b) for b in self.budgets):
            raise ValueError(f"Budgets must be a non-empty list of values >= 0, got {list(self.budgets)}")
        if not self.seeds:
            raise ValueError("At least one seed is required")
        if any(p < 1 for p in self.prefix_lengths):
            raise ValueError(f"Prefix lengths must be >= 1, got {list(self.prefix_lengths)}")
        if self.rank_scheme not in RANK_SCHEMES:
            raise ValueError(f"Unknown rank scheme '{self.rank_scheme}'; expected one of {RANK_SCHEMES}")
        if self.rank_scheme == "file" and not self.ranking_path:
            raise ValueError("rank scheme 'file' needs a ranking path")
        if self.synth_spec is None and not (self.features_path and self.devices_path and self.costs_path):
            raise ValueError("Provide --features, --devices and --costs, or a synthetic spec")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
