import json

import pytest

from main import main

CAT_ENTROPY = 0.9624236501


def _config(tmp_path, payload) -> str:
    path = tmp_path / "run.json"
    path.write_text(payload if isinstance(payload, str) else json.dumps(payload))
    return str(path)


def _run(config, tmp_path, *args) -> int:
    return main(["--config", str(config), "--out-dir", str(tmp_path / "out"), "-q", *args])


def test_describe(configs_dir, tmp_path, capsys):
    assert _run(configs_dir / "cat_torus.json", tmp_path, "describe") == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed["entropy"] == pytest.approx(CAT_ENTROPY, abs=1e-9)
    assert printed["backend"] == "torus"
    assert printed["P"] and printed["Q"]
    stored = json.loads((tmp_path / "out" / "describe.json").read_text())
    assert stored == printed


def test_malformed_config_exits_2(tmp_path, capsys):
    assert _run(_config(tmp_path, "{"), tmp_path, "describe") == 2
    assert "not valid JSON" in capsys.readouterr().err


def test_unknown_suite_exits_2(configs_dir, tmp_path):
    assert _run(configs_dir / "golden_sft.json", tmp_path, "verify", "spectral-flow") == 2


def test_non_hyperbolic_matrix_exits_3(tmp_path):
    config = _config(tmp_path, {"model": {"kind": "torus", "matrix": [[1, 1], [0, 1]]}})
    assert _run(config, tmp_path, "describe") == 3


def test_unsupported_torus_cover_exits_4(tmp_path):
    config = _config(tmp_path, {"model": {"kind": "torus", "matrix": [[3, 1], [2, 1]]}})
    assert _run(config, tmp_path, "covers", "--depth", "2") == 4


def test_covers(configs_dir, tmp_path):
    assert _run(configs_dir / "golden_sft.json", tmp_path, "covers", "--depth", "3") == 0
    lines = (tmp_path / "out" / "covers.csv").read_text().splitlines()
    assert lines[0] == "quantity,n,param,measured,closed_form,residual,window_exact,passed"
    assert any(line.startswith("shift refinement,3,") for line in lines)
    payload = json.loads((tmp_path / "out" / "covers.json").read_text())
    assert payload["passed"] is True
    assert payload["fits"]["base_level"] == 4
    assert any("orbit separation not exercised" in c for c in payload["caveats"])


def test_describe_golden_automorphism(configs_dir, tmp_path, capsys):
    assert _run(configs_dir / "golden_torus.json", tmp_path, "describe") == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed["backend"] == "torus"
    assert printed["entropy"] == pytest.approx(CAT_ENTROPY / 2, abs=1e-9)


def test_sample(configs_dir, tmp_path):
    assert _run(configs_dir / "golden_sft.json", tmp_path, "sample", "--max-level", "2") == 0
    payload = json.loads((tmp_path / "out" / "sample.json").read_text())
    assert payload["mode"] == "levels"
    assert len(payload["cells"]) == 8
    assert payload["violations"] == []


def test_verify_writes_summary(configs_dir, tmp_path, capsys):
    assert _run(configs_dir / "golden_sft.json", tmp_path, "verify", "covers", "--nmax", "4") == 0
    assert json.loads(capsys.readouterr().out) == {"covers": True}
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["covers"]["params"]["n_max"] == 4
    assert (tmp_path / "out" / "covers.csv").exists()


def test_verify_archives(configs_dir, tmp_path, monkeypatch):
    from database.database import get_session
    from database.models import RunRecord
    from utils.config import get_database_url

    url = f"sqlite:///{tmp_path / 'runs.db'}"
    monkeypatch.setenv("SMALELAB_DB_PATH", url)
    get_database_url.cache_clear()
    try:
        assert _run(configs_dir / "golden_sft.json", tmp_path, "verify", "sample", "--archive") == 0
        session = get_session(url)
        runs = session.query(RunRecord).all()
        assert len(runs) == 1 and runs[0].exit_code == 0
        assert "sample" in runs[0].summary
        session.close()
    finally:
        get_database_url.cache_clear()
