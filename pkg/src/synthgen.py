"""Seeded synthetic instances with known structure.

Device i's rows are Gaussian with standard deviation noise_std in every
column. On informative column j the mean is class_separation times bit
(j mod B) of i, where B = ceil(log2 n_devices), so once n_informative >= B
every pair of devices differs on at least one informative column. The
informative columns are always the first n_informative; the rest have mean 0
for every device. Feature costs cycle through cost_cycle independently of
informativeness.
"""

import sys
import os
import math
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np

# Ensure src directory is in path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from cost_model import write_costs
from ingest import write_dataset
from models import CostVector, Dataset, DeviceLabel, SynthSpec

DEFAULT_TYPES = ("camera", "plug", "bulb", "speaker", "hub", "sensor")
DEFAULT_BRANDS = ("acme", "zeta")


def default_device_identities(n_devices: int) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    """(types, brands) pairing consecutive devices by type and alternating
    brands. From four devices on, devices 0 and 1 are both acme cameras, so
    every loss value 0..3 appears between distinct devices."""
    types: List[str] = []
    for i in range(n_devices):
        pair = i // 2
        name = DEFAULT_TYPES[pair % len(DEFAULT_TYPES)]
        # numbered once the built-in names run out, so pairs stay distinct
        types.append(name if pair < len(DEFAULT_TYPES) else f"{name}{pair // len(DEFAULT_TYPES) + 1}")
    brands = [DEFAULT_BRANDS[i % 2] for i in range(n_devices)]
    if n_devices >= 4:
        brands[1] = DEFAULT_BRANDS[0]
    return tuple(types), tuple(brands)


def device_means(spec: SynthSpec) -> np.ndarray:
    """(n_devices, m_features) matrix of per-device column means."""
    bits = max(1, math.ceil(math.log2(spec.n_devices)))
    means = np.zeros((spec.n_devices, spec.m_features))
    for j in range(spec.n_informative):
        bit = j % bits
        means[:, j] = spec.class_separation * ((np.arange(spec.n_devices) >> bit) & 1)
    return means


def generate(spec: SynthSpec) -> Tuple[Dataset, CostVector]:
    rng = np.random.default_rng(spec.seed)
    default_types, default_brands = default_device_identities(spec.n_devices)
    types = spec.types if spec.types is not None else default_types
    brands = spec.brands if spec.brands is not None else default_brands

    devices = [
        DeviceLabel(id=i, label=f"dev{i}", type_name=types[i], brand=brands[i])
        for i in range(spec.n_devices)
    ]
    means = device_means(spec)
    blocks: List[np.ndarray] = []
    for i in range(spec.n_devices):
        blocks.append(rng.normal(means[i], spec.noise_std, size=(spec.rows_per_device, spec.m_features)))
    features = np.vstack(blocks)
    labels = np.repeat(np.arange(spec.n_devices), spec.rows_per_device)

    feature_names = tuple(f"f{k:03d}" for k in range(spec.m_features))
    dataset = Dataset(features=features, labels=labels, feature_names=feature_names, devices=tuple(devices))
    cost_values = np.array([spec.cost_cycle[k % len(spec.cost_cycle)] for k in range(spec.m_features)])
    return dataset, CostVector(costs=cost_values, feature_names=feature_names)


def write_instance(spec: SynthSpec, directory: Union[str, Path]) -> Dict[str, Path]:
    """Generates an instance and writes features.csv, devices.csv and costs.csv."""
    directory = Path(directory)
    dataset, costs = generate(spec)
    paths = {
        "features": directory / "features.csv",
        "devices": directory / "devices.csv",
        "costs": directory / "costs.csv",
    }
    write_dataset(dataset, paths["features"], paths["devices"])
    write_costs(costs, paths["costs"])
    return paths
