from pathlib import Path

import pytest

from services.builder import build_lab, build_source
from services.dynamics import SmaleSpaceModel
from services.sft import make_sft, periodic_point
from services.torus import make_torus
from utils.config import load_config

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def configs_dir() -> Path:
    return CONFIGS


@pytest.fixture(scope="session")
def golden_sft():
    return make_sft([[1, 1], [1, 0]])


@pytest.fixture(scope="session")
def full_shift():
    return make_sft([[1, 1], [1, 1]])


@pytest.fixture(scope="session")
def cat_torus():
    return make_torus([[2, 1], [1, 1]])


@pytest.fixture(scope="session")
def golden_torus():
    return make_torus([[1, 1], [1, 0]])


@pytest.fixture(scope="session")
def sft_model(golden_sft):
    return SmaleSpaceModel.from_backend(golden_sft)


@pytest.fixture(scope="session")
def cat_model(cat_torus):
    return SmaleSpaceModel.from_backend(cat_torus)


@pytest.fixture(scope="session")
def zeros():
    return periodic_point((0,))


@pytest.fixture(scope="session")
def sft_config():
    return load_config(CONFIGS / "golden_sft.json")


@pytest.fixture(scope="session")
def sft_lab(sft_config):
    return build_lab(sft_config)


@pytest.fixture(scope="session")
def cat_source():
    return build_source(load_config(CONFIGS / "cat_torus.json"))
