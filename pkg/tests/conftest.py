import numpy as np
import pytest

from fcmlab.core import ActivationSpec, FcmModel
from fcmlab.io import load_bundled_document

DOLPHIN_EDGES = [
    [0, 1, 0, -1, 0],
    [0, 0, 1, 0, -1],
    [0, -1, 0, 1, -1],
    [1, 0, -1, 0, 1],
    [-1, 1, 0, -1, 0],
]


@pytest.fixture(scope="session")
def dolphin_doc():
    return load_bundled_document("dolphin")


@pytest.fixture(scope="session")
def dolphin(dolphin_doc):
    return dolphin_doc.model


@pytest.fixture(scope="session")
def trap_doc():
    return load_bundled_document("thucydides-reference")


@pytest.fixture(scope="session")
def trap(trap_doc):
    return trap_doc.model


def make_model(rows, labels=None, activation=None, name="test"):
    rows = np.asarray(rows, dtype=float)
    labels = labels or [f"n{i}" for i in range(rows.shape[0])]
    return FcmModel.create(labels, rows, activation=activation, name=name)


def make_logistic_model(rows, c=5.0, labels=None, name="test"):
    return make_model(rows, labels=labels, activation=ActivationSpec.logistic(c), name=name)
