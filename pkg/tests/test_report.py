import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from takacheck import catalog
from takacheck.report import SamplePlan, generate_samples, read_report, run_check, write_report


def test_grid_on_unit_interval():
    pts = generate_samples(SamplePlan(seed=7, count=3, margin=0.25, strategy="grid"), [(0.0, 1.0)])
    assert [p.tolist() for p in pts] == [[0.25], [0.5], [0.75]]


def test_grid_is_lexicographic_and_truncated():
    pts = generate_samples(SamplePlan(count=5, margin=0.0, strategy="grid"), [(0, 1), (0, 1)])
    assert [p.tolist() for p in pts] == [[0, 0], [0, 0.5], [0, 1], [0.5, 0], [0.5, 0.5]]


def test_same_plan_same_points():
    plan = SamplePlan(seed=42, count=50)
    a = generate_samples(plan, [(0, 1), (-2, 3)])
    b = generate_samples(plan, [(0, 1), (-2, 3)])
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    c = generate_samples(SamplePlan(seed=43, count=50), [(0, 1), (-2, 3)])
    assert not np.array_equal(a[0], c[0])


@settings(max_examples=40, deadline=None)
@given(
    st.integers(0, 2**64 - 1),
    st.integers(2, 60),
    st.floats(0.0, 0.49),
    st.sampled_from(["uniform_random", "grid"]),
    st.integers(1, 3),
)
def test_points_stay_in_inset_box(seed, count, margin, strategy, m):
    box = [(-1.0, 2.0)] * m
    pts = generate_samples(SamplePlan(seed, count, margin, strategy), box)
    assert len(pts) == count
    lo, hi = -1.0 + 3 * margin, 2.0 - 3 * margin
    for p in pts:
        assert p.shape == (m,)
        assert np.all(p >= lo - 1e-12) and np.all(p <= hi + 1e-12)


def test_margin_example():
    for p in generate_samples(SamplePlan(count=100, margin=0.1), [(0, 1), (0, 1)]):
        assert np.all((0.1 <= p) & (p <= 0.9))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 40), st.integers(2, 40))
def test_prefix_property(seed, k, extra):
    box = [(0, 1), (0, 2)]
    small = generate_samples(SamplePlan(seed, k), box)
    big = generate_samples(SamplePlan(seed, k + extra), box)
    assert all(np.array_equal(x, y) for x, y in zip(small, big[:k]))


def test_residual_max_monotone_in_count():
    spec, frame, _ = catalog.instantiate("slanted_circle")
    last = -1.0
    for count in (2, 5, 20, 80):
        r = run_check("cylinder", spec, frame, SamplePlan(seed=9, count=count)).result
        assert r.residual_max >= last
        last = r.residual_max


@pytest.mark.parametrize(
    "kwargs",
    [{"count": 1}, {"margin": 0.5}, {"margin": -0.1}, {"strategy": "sobol"}, {"seed": -1}],
)
def test_plan_validation(kwargs):
    with pytest.raises(ValueError):
        SamplePlan(**kwargs)


def test_invalid_box():
    with pytest.raises(ValueError):
        generate_samples(SamplePlan(), [(1.0, 0.0)])


def test_json_round_trip_and_field_order():
    spec, frame, _ = catalog.instantiate("example34")
    report = run_check("cylinder", spec, frame, SamplePlan(seed=7), provenance={"source": "catalog", "id": "example34"})
    data = write_report(report, "json")
    assert read_report(data) == report
    assert write_report(read_report(data), "json") == data
    d = json.loads(data)
    assert list(d) == ["engine_version", "provenance", "frame", "plan", "tolerances", "result", "residual_table"]
    assert d["result"]["recovered"]["c"] == pytest.approx(1.0, abs=1e-8)
    names = [row["identity"] for row in d["residual_table"]]
    assert names == sorted(names)
    assert {"laplacian_mean_curvature", "flat_tangent_energy", "frame_completeness",
            "mean_curvature_normality"} <= set(names)


def test_text_report_ends_with_verdict_and_shows_tolerances():
    spec, _, _ = catalog.instantiate("plane")
    text = write_report(run_check("sphere", spec), "text").decode()
    assert text.endswith("VERDICT: Violated\n")
    assert "tol_check=1e-08" in text and "tol_const=1e-08" in text


def test_unknown_format():
    spec, _, _ = catalog.instantiate("plane")
    with pytest.raises(ValueError):
        write_report(run_check("sphere", spec), "xml")


def test_json_independent_of_workers():
    spec, frame, _ = catalog.instantiate("torus_line")
    plan = SamplePlan(seed=3, count=64)
    a = write_report(run_check("torus", spec, frame, plan, workers=1))
    b = write_report(run_check("torus", spec, frame, plan, workers=4))
    assert a == b
