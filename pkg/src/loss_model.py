"""Builds or loads the n x n misclassification loss matrix L."""

from pathlib import Path
from typing import Sequence, Union

import numpy as np
import pandas as pd

from ingest import Source, read_table
from models import DeviceLabel, LossMatrix

TYPE_WEIGHT = 2.0
BRAND_WEIGHT = 1.0


def build_default_loss(devices: Sequence[DeviceLabel]) -> LossMatrix:
    """loss[i, j] = 2 * [types differ] + [brands differ].

    Types and brands compare case- and whitespace-insensitively, so the
    result is symmetric with entries in {0, 1, 2, 3}.
    """
    types = np.array([device.type_key for device in devices], dtype=object)
    brands = np.array([device.brand_key for device in devices], dtype=object)
    type_differs = (types[:, None] != types[None, :]).astype(float)
    brand_differs = (brands[:, None] != brands[None, :]).astype(float)
    values = TYPE_WEIGHT * type_differs + BRAND_WEIGHT * brand_differs
    np.fill_diagonal(values, 0.0)
    return LossMatrix(values=values, device_ids=tuple(device.id for device in devices))


def load_loss(loss_source: Source, devices: Sequence[DeviceLabel]) -> LossMatrix:
    """Reads a user-defined loss table.

    The first row and first column hold device labels (any order); cell (i, j)
    is the loss of predicting row device i when the truth is column device j.
    Custom tables may be asymmetric.

    Raises:
        ValueError: dimension mismatch, unknown or missing device, non-numeric
            cell, nonzero diagonal or negative entry.
    """
    table = read_table(loss_source, "loss")
    if table.isna().to_numpy().any():
        raise ValueError("Loss table has ragged rows")
    column_labels = [cell.strip() for cell in table.iloc[0, 1:]]
    row_labels = [cell.strip() for cell in table.iloc[1:, 0]]
    if len(column_labels) != len(row_labels):
        raise ValueError(
            f"dimension mismatch: loss table has {len(row_labels)} rows and {len(column_labels)} columns"
        )
    if len(column_labels) != len(devices):
        raise ValueError(f"dimension mismatch: loss table is {len(row_labels)}x{len(column_labels)} "
                         f"but there are {len(devices)} devices")

    known = {device.label for device in devices}
    for axis, labels in (("row", row_labels), ("column", column_labels)):
        unknown = [label for label in labels if label not in known]
        if unknown:
            raise ValueError(f"Loss table {axis} label(s) {unknown} match no device")
        missing = sorted(known - set(labels))
        if missing:
            raise ValueError(f"Loss table is missing device(s) {missing} in its {axis} labels")

    cells = table.iloc[1:, 1:].apply(lambda column: pd.to_numeric(column.str.strip(), errors="coerce"))
    raw = cells.to_numpy(dtype=float)
    if np.isnan(raw).any():
        i, j = np.argwhere(np.isnan(raw))[0]
        raise ValueError(f"Loss table cell ({row_labels[i]}, {column_labels[j]}) is not a number")

    row_pos = {label: k for k, label in enumerate(row_labels)}
    col_pos = {label: k for k, label in enumerate(column_labels)}
    order_rows = [row_pos[device.label] for device in devices]
    order_cols = [col_pos[device.label] for device in devices]
    values = raw[np.ix_(order_rows, order_cols)]
    return LossMatrix(values=values, device_ids=tuple(device.id for device in devices))


def write_loss(loss: LossMatrix, devices: Sequence[DeviceLabel], path: Union[str, Path]) -> None:
    labels = [devices[i].label for i in loss.device_ids]
    frame = pd.DataFrame(loss.values, index=labels, columns=labels)
    frame.index.name = "device"
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path)
