"""Handles dataset ingestion: reading the features/devices tables, validating
them into a Dataset, stratified train/test splitting and column projection.
"""

import math
from pathlib import Path
from typing import List, TextIO, Tuple, Union

import numpy as np
import pandas as pd

from models import Dataset, DeviceLabel, SelectionVector, Split

Source = Union[str, Path, TextIO]

LABEL_COLUMN = "label"


def read_table(source: Source, what: str) -> pd.DataFrame:
    """Reads a CSV source as raw strings, header row included as row 0.

    Missing trailing fields come back as NaN, so ragged rows stay detectable.
    """
    try:
        return pd.read_csv(source, header=None, dtype=str, keep_default_na=False, skip_blank_lines=True)
    except pd.errors.EmptyDataError:
        raise ValueError(f"{what} source is empty")
    except pd.errors.ParserError as e:
        # pandas reports 1-based file lines, header included
        raise ValueError(f"Ragged rows in {what} source: {e}")


def load_devices(devices_source: Source) -> List[DeviceLabel]:
    """Reads devices.csv (label,type,brand[,name]) into DeviceLabels.

    Ids are assigned densely in file order.
    """
    table = read_table(devices_source, "devices")
    header = [str(cell).strip().lower() for cell in table.iloc[0]]
    for required in ("label", "type", "brand"):
        if required not in header:
            raise ValueError(f"Devices source is missing the '{required}' column (header: {header})")
    columns = {name: header.index(name) for name in header}

    devices: List[DeviceLabel] = []
    seen = set()
    for row_number, row in enumerate(table.iloc[1:].itertuples(index=False), start=1):
        cells = list(row)
        if any(not isinstance(cell, str) for cell in cells):
            raise ValueError(f"Devices row {row_number}: expected {len(header)} columns")
        label = cells[columns["label"]].strip()
        if label in seen:
            raise ValueError(f"Devices row {row_number}: duplicate label '{label}'")
        seen.add(label)
        name = cells[columns["name"]].strip() if "name" in columns else ""
        try:
            devices.append(DeviceLabel(
                id=len(devices),
                label=label,
                type_name=cells[columns["type"]].strip(),
                brand=cells[columns["brand"]].strip(),
                display_name=name,
            ))
        except ValueError as e:
            raise ValueError(f"Devices row {row_number}: {e}")
    if not devices:
        raise ValueError("Devices source lists no devices")
    return devices


def load_dataset(features_source: Source, devices_source: Source) -> Dataset:
    """Reads features.csv and devices.csv into a validated Dataset.

    Args:
        features_source: path or text stream; header = feature names + "label".
        devices_source: path or text stream; header = label,type,brand[,name].

    Returns:
        Dataset with feature column order preserved.

    Raises:
        ValueError: ragged rows, non-numeric or non-finite cells, labels with no
            device metadata, or classes with fewer than 2 rows. Rows and columns
            in messages are 1-based, header excluded.
    """
    devices = load_devices(devices_source)
    table = read_table(features_source, "features")

    header = [str(cell).strip() for cell in table.iloc[0]]
    if len(header) < 2 or header[-1].lower() != LABEL_COLUMN:
        raise ValueError(f"Features header must end with a '{LABEL_COLUMN}' column, got {header}")
    feature_names = header[:-1]
    if len(set(feature_names)) != len(feature_names):
        raise ValueError("Features header contains duplicate feature names")
    m = len(feature_names)

    body = table.iloc[1:].reset_index(drop=True)
    if body.empty:
        raise ValueError("Features source has no data rows")

    missing = body.isna().to_numpy()
    if missing.any():
        row = int(np.argwhere(missing)[0][0])
        raise ValueError(f"Features row {row + 1}: expected {m + 1} columns (ragged row)")

    cells = body.iloc[:, :m]
    numeric = cells.apply(lambda column: pd.to_numeric(column.str.strip(), errors="coerce")).to_numpy(dtype=float)
    bad = ~np.isfinite(numeric)
    if bad.any():
        row, col = (int(v) for v in np.argwhere(bad)[0])
        raw = cells.iat[row, col]
        try:
            float(raw)
            problem = "non-finite value"
        except ValueError:
            problem = "non-numeric value"
        raise ValueError(f"Features row {row + 1}, column {col + 1} ('{feature_names[col]}'): {problem} '{raw}'")

    label_ids = {device.label: device.id for device in devices}
    labels = np.empty(len(body), dtype=int)
    for row, raw in enumerate(body.iloc[:, m]):
        key = raw.strip()
        if key not in label_ids:
            raise ValueError(f"Features row {row + 1}, column {m + 1}: label '{key}' has no device metadata")
        labels[row] = label_ids[key]

    return Dataset(features=numeric, labels=labels, feature_names=tuple(feature_names), devices=tuple(devices))


def write_dataset(dataset: Dataset, features_path: Union[str, Path], devices_path: Union[str, Path]) -> None:
    """Writes a Dataset back to features.csv / devices.csv.

    Floats are written in shortest round-trip form, so load_dataset reproduces
    values and column order exactly.
    """
    frame = pd.DataFrame(dataset.features, columns=list(dataset.feature_names))
    frame[LABEL_COLUMN] = [dataset.devices[label].label for label in dataset.labels]
    devices = pd.DataFrame(
        [(d.label, d.type_name, d.brand, d.display_name) for d in dataset.devices],
        columns=["label", "type", "brand", "name"],
    )
    for path in (features_path, devices_path):
        Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(features_path, index=False)
    devices.to_csv(devices_path, index=False)


def stratified_split(dataset: Dataset, train_fraction: float, seed: int) -> Split:
    """Per-class seeded shuffle; the first ceil(fraction * count) rows of each
    class go to train, clamped so both parts get at least one row.

    Returned index arrays are sorted, so downstream fitting sees rows in a
    fixed order.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    rng = np.random.default_rng(seed)
    train: List[int] = []
    test: List[int] = []
    for device in dataset.devices:
        rows = np.flatnonzero(dataset.labels == device.id)
        if rows.size < 2:
            raise ValueError(
                f"Device '{device.label}' has {rows.size} rows; cannot place one row in both train and test"
            )
        shuffled = rng.permutation(rows)
        n_train = min(max(math.ceil(train_fraction * rows.size), 1), rows.size - 1)
        train.extend(int(r) for r in shuffled[:n_train])
        test.extend(int(r) for r in shuffled[n_train:])
    return Split(
        train_rows=np.array(sorted(train), dtype=int),
        test_rows=np.array(sorted(test), dtype=int),
        seed=seed,
        train_fraction=train_fraction,
    )


def project(dataset: Dataset, rows: np.ndarray, selection: SelectionVector) -> Tuple[np.ndarray, np.ndarray]:
    """Rows of the feature matrix restricted to the selected columns.

    An empty selection yields a (len(rows), 0) matrix; labels are kept.
    """
    if len(selection) != dataset.m:
        raise ValueError(f"Selection has length {len(selection)} but the dataset has {dataset.m} features")
    rows = np.asarray(rows, dtype=int)
    return dataset.features[rows][:, selection.mask], dataset.labels[rows]
