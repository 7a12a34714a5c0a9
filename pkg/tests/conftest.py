import numpy as np
import pytest

from samadyn.params import load_params

from pathlib import Path

REPO = Path(__file__).resolve().parents[1]


@pytest.fixture(scope="session")
def paramset():
    return load_params(REPO / "params" / "default.json")


@pytest.fixture(scope="session")
def robot(paramset):
    return paramset.robot


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)
