import json
from fractions import Fraction

import pytest

from utils.config import (
    RunConfig,
    SuiteParams,
    TorusModelConfig,
    apply_overrides,
    get_database_url,
    get_output_root,
    load_config,
    parse_rational,
)
from utils.constants import is_known_suite, suite_key
from utils.errors import ConfigError

SFT = {"model": {"kind": "sft", "adjacency": [[1, 1], [1, 0]]}}


def _write(tmp_path, payload) -> str:
    path = tmp_path / "config.json"
    path.write_text(payload if isinstance(payload, str) else json.dumps(payload))
    return str(path)


@pytest.mark.parametrize("name", ["golden_sft.json", "full_shift.json", "golden_torus.json", "cat_torus.json"])
def test_shipped_configs_validate(configs_dir, name):
    config = load_config(configs_dir / name)
    assert config.model.kind in ("sft", "torus")
    assert all(is_known_suite(suite) for suite in config.suites)


def test_defaults(tmp_path):
    config = load_config(_write(tmp_path, SFT))
    assert config.slowdown == 16
    assert config.caps.homoclinic == 4
    assert config.model.metric_base == 2
    assert config.delta_exact() is None
    assert config.suite("convergence") == SuiteParams()


@pytest.mark.parametrize(
    "payload",
    [
        "{",
        {"model": {"kind": "sft", "adjacency": [[1, 1]]}},
        {"model": {"kind": "sft", "adjacency": [[1, 2], [1, 0]]}},
        {"model": {"kind": "torus", "matrix": [[1, 1]]}},
        {"model": {"kind": "solenoid"}},
        {**SFT, "delta": "-1/3"},
        {**SFT, "suites": {"spectral-flow": {}}},
        {**SFT, "colour": "blue"},
        {**SFT, "threads": 0},
    ],
)
def test_invalid_configs(tmp_path, payload):
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, payload))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.json")


def test_rationals():
    assert parse_rational("1/3") == Fraction(1, 3)
    assert parse_rational(0.5) == Fraction(1, 2)
    assert parse_rational(7) == 7
    with pytest.raises(ValueError):
        parse_rational(True)


def test_torus_points_are_normalized():
    torus = TorusModelConfig.model_validate(
        {"kind": "torus", "matrix": [[2, 1], [1, 1]], "p_points": [["2/4", 0]], "q_seed": ["0.25", "1/5"]}
    )
    assert torus.p_points == [("1/2", "0")]
    assert torus.p_rationals() == [(Fraction(1, 2), Fraction(0))]
    assert torus.q_rational() == (Fraction(1, 4), Fraction(1, 5))


def test_delta_is_kept_exact(tmp_path):
    config = load_config(_write(tmp_path, {**SFT, "delta": "1/96"}))
    assert config.delta_exact() == Fraction(1, 96)


def test_overrides():
    config = RunConfig.model_validate(SFT)
    assert apply_overrides(config, seed=None) is config
    updated = apply_overrides(config, seed=7, threads=4)
    assert (updated.seed, updated.threads) == (7, 4)
    with pytest.raises(ConfigError):
        apply_overrides(config, threads=0)


def test_suite_names():
    assert suite_key("Rank_Decay") == "rank-decay"
    assert is_known_suite("block_orthogonality")
    assert not is_known_suite("spectral-flow")


def test_environment_paths(monkeypatch, tmp_path):
    monkeypatch.setenv("SMALELAB_DB_PATH", str(tmp_path / "runs.db"))
    monkeypatch.setenv("SMALELAB_OUT_DIR", str(tmp_path / "out"))
    get_database_url.cache_clear()
    get_output_root.cache_clear()
    try:
        assert get_database_url() == f"sqlite:///{(tmp_path / 'runs.db').resolve()}"
        assert get_output_root() == (tmp_path / "out").resolve()
        monkeypatch.setenv("SMALELAB_DB_PATH", "postgresql://lab@localhost/runs")
        get_database_url.cache_clear()
        assert get_database_url() == "postgresql://lab@localhost/runs"
    finally:
        get_database_url.cache_clear()
        get_output_root.cache_clear()


def test_golden_shift_config_runs_quasi_invariance_to_32(configs_dir):
    params = load_config(configs_dir / "golden_sft.json").suite("quasi-invariance")
    assert params.n_max == 32
    assert params.j == [1, 2]
