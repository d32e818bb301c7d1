"""Loads configuration settings from environment variables (.env file)
and defines project-wide constants, such as file paths and algorithm defaults.
"""

import os
from dotenv import load_dotenv
from pathlib import Path
from typing import Tuple

# Determine the project root directory
# Assumes config.py is in src/, so two levels up is the project root
project_root = Path(__file__).resolve().parent.parent

# Load the .env file from the project root
dotenv_path = project_root / '.env'
load_dotenv(dotenv_path=dotenv_path)


def _get_float(key: str, default: float) -> float:
    raw = os.getenv(key)
    if raw is None or raw.strip() == "":
        return default
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"Environment variable {key} must be a number, got '{raw}'")


def _get_int(key: str, default: int) -> int:
    raw = os.getenv(key)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"Environment variable {key} must be an integer, got '{raw}'")


def _get_level_values(key: str, default: Tuple[float, float, float]) -> Tuple[float, float, float]:
    raw = os.getenv(key)
    if raw is None or raw.strip() == "":
        return default
    try:
        values = tuple(float(part) for part in raw.split(","))
    except ValueError:
        raise ValueError(f"Environment variable {key} must be three comma-separated numbers, got '{raw}'")
    if len(values) != 3 or not (0 < values[0] < values[1] < values[2]):
        raise ValueError(f"Environment variable {key} must be three positive, strictly increasing numbers, got '{raw}'")
    return values  # type: ignore[return-value]


# --- Data split ---
DEFAULT_TRAIN_FRACTION = _get_float("DEFAULT_TRAIN_FRACTION", 0.7)
DEFAULT_SEED = _get_int("DEFAULT_SEED", 0)

# --- Cost model ---
# low, medium, high
COST_LEVEL_VALUES = _get_level_values("COST_LEVEL_VALUES", (1.0, 2.0, 3.0))

# --- Classifiers ---
TREE_MAX_DEPTH = _get_int("TREE_MAX_DEPTH", 12)
TREE_MIN_SPLIT = _get_int("TREE_MIN_SPLIT", 2)
NB_VAR_SMOOTHING = _get_float("NB_VAR_SMOOTHING", 1e-9)

# --- Risk engine ---
ZERO_RISK_EPSILON = _get_float("ZERO_RISK_EPSILON", 1e-12)

# --- Selectors ---
BRUTE_FORCE_M_LIMIT = _get_int("BRUTE_FORCE_M_LIMIT", 25)
CE_ETA = _get_int("CE_ETA", 1000)
CE_TMAX = _get_int("CE_TMAX", 500)
CE_RHO = _get_float("CE_RHO", 0.9)
CE_ALPHA = _get_float("CE_ALPHA", 0.7)
CE_BETA = _get_float("CE_BETA", 0.5)
CE_EPSILON_CONVERGE = _get_float("CE_EPSILON_CONVERGE", 1e-3)
CE_MAX_INFEASIBLE_STREAK = _get_int("CE_MAX_INFEASIBLE_STREAK", 10)

# --- Sweeps ---
DEFAULT_WORKERS = _get_int("DEFAULT_WORKERS", 1)
VERBOSE = os.getenv("VERBOSE", "false").strip().lower() == "true"

# --- Define File Paths (relative to project root) ---

DATA_DIR = project_root / "data"
CORE_FILES_DIR = DATA_DIR / "core_files"
REFERENCE_DEVICES_PATH = CORE_FILES_DIR / "reference_devices.csv"
EXAMPLE_COSTS_PATH = CORE_FILES_DIR / "example_costs.csv"
