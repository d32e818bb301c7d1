import pytest
from io import StringIO
from pathlib import Path
import sys
import os

import numpy as np

# Add src directory to path
src_path = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'src'))
sys.path.insert(0, src_path)

from ingest import load_devices
from loss_model import build_default_loss, load_loss, write_loss
from models import LossMatrix
import config

FIXTURES_DIR = Path(__file__).parent / 'fixtures'


@pytest.fixture
def small_devices():
    return load_devices(FIXTURES_DIR / 'devices_small.csv')


@pytest.fixture
def reference_devices():
    return load_devices(config.REFERENCE_DEVICES_PATH)


# --- build_default_loss ---

def test_default_loss_on_small_devices(small_devices):
    loss = build_default_loss(small_devices)
    # cam1/cam2 differ by brand, cam1/plug1 by type, cam2/plug1 by both
    assert loss.values.tolist() == [[0, 1, 2], [1, 0, 3], [2, 3, 0]]
    assert loss.device_ids == (0, 1, 2)


def test_default_loss_on_reference_devices(reference_devices):
    loss = build_default_loss(reference_devices)
    assert loss.n == 15
    assert loss.is_symmetric()
    assert set(np.unique(loss.values).tolist()) <= {0.0, 1.0, 2.0, 3.0}
    assert np.all(np.diag(loss.values) == 0)
    # the two D-Link cameras share type and brand
    assert loss.values[2, 3] == 0
    # Samsung hub against a TP-Link camera differs in both
    assert loss.values[9, 11] == 3
    # TP-Link bulb against a Phillips bulb differs only by brand
    assert loss.values[10, 8] == 1
    # TP-Link bulb against a TP-Link socket differs only by type
    assert loss.values[10, 13] == 2


def test_default_loss_ignores_case():
    devices = load_devices(StringIO("label,type,brand\na,Camera,ACME\nb, camera ,acme\n"))
    assert build_default_loss(devices).values.tolist() == [[0, 0], [0, 0]]


# --- load_loss ---

def test_load_loss_reorders_to_device_order(small_devices):
    loss = load_loss(FIXTURES_DIR / 'loss_small.csv', small_devices)
    assert loss.values.tolist() == [[0, 1, 2], [1, 0, 4], [2, 3, 0]]
    assert not loss.is_symmetric()


def test_loader_matches_builder_on_reference(tmp_path, reference_devices):
    built = build_default_loss(reference_devices)
    write_loss(built, reference_devices, tmp_path / "loss.csv")
    loaded = load_loss(tmp_path / "loss.csv", reference_devices)
    assert np.array_equal(loaded.values, built.values)


@pytest.mark.parametrize("body, message", [
    ("device,cam1,cam2,plug1\ncam1,1,1,2\ncam2,1,0,3\nplug1,2,3,0\n", "nonzero diagonal"),
    ("device,cam1,cam2,plug1\ncam1,0,-1,2\ncam2,1,0,3\nplug1,2,3,0\n", "negative entry"),
    ("device,cam1,cam2,lamp\ncam1,0,1,2\ncam2,1,0,3\nlamp,2,3,0\n", "match no device"),
    ("device,cam1,cam2\ncam1,0,1\ncam2,1,0\n", "dimension mismatch"),
    ("device,cam1,cam2,plug1\ncam1,0,x,2\ncam2,1,0,3\nplug1,2,3,0\n", "not a number"),
])
def test_load_loss_errors(small_devices, body, message):
    with pytest.raises(ValueError, match=message):
        load_loss(StringIO(body), small_devices)


def test_loss_matrix_rejects_wrong_shape():
    with pytest.raises(ValueError):
        LossMatrix(values=np.zeros((2, 3)), device_ids=(0, 1))
