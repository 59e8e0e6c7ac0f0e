import pytest

from services.covers import Rectangle
from services.sampling import SampleBuilder, build_sample, sample_violations
from utils.errors import CellExhaustedError


def _builder(lab, **kwargs):
    caps = lab.config.caps
    kwargs.setdefault("horizon", caps.orbit_horizon)
    kwargs.setdefault("effort", caps.cell_extension)
    return SampleBuilder(lab.covers, lab.source, **kwargs)


def test_levels_are_filled_exactly(sft_lab):
    sample = _builder(sft_lab).fill_levels(3)
    assert len(sample) == 1 + 2 + 5 + 13
    assert sample_violations(sft_lab.covers, sample, 64) == []
    assert sample.cells() == sorted(sample.points)


def test_rebuild_is_deterministic(sft_lab):
    caps = sft_lab.config.caps
    first = build_sample(sft_lab.covers, sft_lab.source, 2, horizon=caps.orbit_horizon, effort=caps.cell_extension)
    second = build_sample(sft_lab.covers, sft_lab.source, 2, horizon=caps.orbit_horizon, effort=caps.cell_extension)
    assert first.points == second.points
    assert first.provenance == second.provenance


def test_sample_points_avoid_reserved_orbits(sft_lab):
    reserved = sft_lab.window.points
    builder = _builder(sft_lab, reserved=reserved)
    sample = builder.fill_levels(2)
    backend = sft_lab.model.backend
    blocked = set().union(*(backend.orbit_signature(x, 64) for x in reserved))
    for rect in sample.cells():
        g = sample[rect]
        assert not backend.orbit_signature(g, 64) & blocked
        assert builder.owner(g) == rect
        assert sft_lab.covers.contains(rect, g)


def test_on_demand_cells(sft_lab):
    builder = _builder(sft_lab)
    rect = Rectangle(4, (0, 1, 0, 0, 0, 1, 0))
    g = builder.point(rect)
    assert g.window(-3, 3) == rect.key
    assert builder.point(rect) is g
    assert len(builder.sample) == 1


def test_exhausted_cell_raises(sft_lab):
    rect = Rectangle(1, (1,))
    candidates = list(sft_lab.covers.candidates(rect, sft_lab.source, 0))
    builder = _builder(sft_lab, effort=0, reserved=candidates)
    with pytest.raises(CellExhaustedError) as info:
        builder.point(rect)
    assert info.value.level == 1
    assert info.value.exit_code == 5


def test_violations_are_reported(sft_lab):
    sample = _builder(sft_lab).fill_levels(1)
    rect = sample.cells()[1]
    other = sample.cells()[2]
    sample.points[other] = sample.points[rect]
    problems = sample_violations(sft_lab.covers, sample, 64)
    assert any("repeats" in p for p in problems)
    assert "two sample points share an orbit" in problems


def test_as_dict(sft_lab):
    sample = _builder(sft_lab).fill_levels(1)
    payload = sample.as_dict()
    assert set(payload) == {"0:X", "1:0", "1:1"}
    assert all(entry["index"] >= 0 for entry in payload.values())
