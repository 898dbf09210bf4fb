import numpy as np
import pytest

from fractal_horizon.boxdim import estimate
from fractal_horizon.experiments import (
    DEAD_ZONE, LambdaRecord, LambdaSweep, default_zoo, draw_lambdas, horizon_property_census,
    probe_experiment, sum_experiment,
)
from fractal_horizon.generators import midpoint_surface, takagi_curve, weierstrass_curve
from fractal_horizon.sampling import lin_comb, sample_curve, sample_surface

FINITE_GRID_BIAS = ("finite-grid bias: the dimension-2 probe curve estimates near 1.5 at n=9, "
                    "far below its asymptotic value; see the decisions ledger")


def test_draw_lambdas_distinct_nonzero_in_range():
    lam = draw_lambdas(500, 2.0, 3)
    assert len(set(lam.tolist())) == 500
    assert np.all(np.abs(lam) >= DEAD_ZONE)
    assert np.all(np.abs(lam) <= 2.0)
    assert np.array_equal(lam, draw_lambdas(500, 2.0, 3))
    assert not np.array_equal(lam, draw_lambdas(500, 2.0, 4))


def test_draw_lambdas_rejects_bad_args():
    with pytest.raises(ValueError):
        draw_lambdas(0)
    with pytest.raises(ValueError):
        draw_lambdas(4, 1e-7)


def test_sweep_rejects_duplicates():
    e = estimate(takagi_curve(6))
    rec = LambdaRecord(0, 1.0, e, None, True)
    with pytest.raises(ValueError):
        LambdaSweep("sum", (1.0, 1.0), (rec, rec), {}, 0.1)
    with pytest.raises(ValueError):
        LambdaSweep("sum", (1.0, 2.0), (rec,), {}, 0.1)


def test_sum_with_zero_g_reproduces_f():
    f = weierstrass_curve(1.5, 2, 0, 10)
    sw = sum_experiment(f, sample_curve("zero", 10), count=8)
    ef = estimate(f)
    assert sw.count == 8
    for r in sw.records:
        assert r.estimate == ef
    assert sw.conforming_fraction == 1.0


def test_cancellation_is_exceptional():
    g = weierstrass_curve(1.6, 2, 2, 10)
    f = lin_comb(-1.0, g, 0.0, g)
    sw = sum_experiment(f, g, lambdas=[1.0, 0.5, -0.75, 1.5])
    cands = sw.exceptional_candidates
    assert [r.lam for r in cands] == [1.0]
    assert cands[0].estimate.degenerate


def test_workers_preserve_order():
    f, g = takagi_curve(9), weierstrass_curve(1.7, 2, 0, 9)
    a = sum_experiment(f, g, count=12, seed=5)
    b = sum_experiment(f, g, count=12, seed=5, workers=4)
    assert a == b
    assert a.to_csv() == b.to_csv()


def test_sum_csv_layout():
    sw = sum_experiment(takagi_curve(8), weierstrass_curve(1.5, 2, 0, 8), count=3)
    lines = sw.to_csv(["demo"]).splitlines()
    assert lines[0] == "# demo"
    assert lines[-1] == f"# conforming={sum(r.conforming for r in sw.records)}/3"
    data = [ln for ln in lines if not ln.startswith("#")]
    assert data[0].startswith("index,lambda,")
    assert len(data) == 4


def test_sum_shape_mismatch():
    with pytest.raises(ValueError):
        sum_experiment(takagi_curve(6), takagi_curve(7))


def test_probe_with_zero_surface_tracks_probe():
    sw = probe_experiment(sample_surface("zero", 9), 2.5, count=6)
    first = sw.records[0]
    for r in sw.records:
        # scaling by lambda leaves every box-count slope nearly unchanged
        assert abs(r.estimate.ols_slope - first.estimate.ols_slope) <= 0.1
        assert abs(r.estimate.ols_slope - r.horizon_estimate.ols_slope - 1.0) <= 1e-9
    assert sw.conforming_fraction == 1.0


SMALL_LAMBDA = ("for |lambda| < 0.1 the horizon of f still dominates at n=9, so the probe's "
                "roughness has not surfaced yet; see the decisions ledger")


@pytest.fixture(scope="module")
def midpoint_sweep():
    return probe_experiment(midpoint_surface(2.5, 5, 9), 2.5, count=16)


@pytest.mark.xfail(strict=True, reason=SMALL_LAMBDA)
def test_probe_midpoint_example(midpoint_sweep):
    ok = sum(r.horizon_estimate.lower_est >= 1.5 - 0.2 for r in midpoint_sweep.records)
    assert ok >= 15


def test_probe_midpoint_misses_are_small_lambda(midpoint_sweep):
    misses = [r for r in midpoint_sweep.records if r.horizon_estimate.lower_est < 1.3]
    assert all(abs(r.lam) < 0.1 for r in misses)
    big = [r for r in midpoint_sweep.records if abs(r.lam) >= 0.1]
    assert all(r.horizon_estimate.lower_est >= 1.3 for r in big)


@pytest.mark.xfail(strict=True, reason=FINITE_GRID_BIAS)
def test_probe_alpha_three_smooth_surface():
    f = sample_surface(lambda x, y: np.sin(3 * x) * np.cos(2 * y) + x * y, 9)
    sw = probe_experiment(f, 3.0, count=32)
    ok = sum(abs(r.horizon_estimate.lower_est - 2.0) <= 0.2 for r in sw.records)
    assert ok >= 31


def test_probe_rejects_alpha():
    with pytest.raises(ValueError):
        probe_experiment(sample_surface("zero", 4), 3.5)
    with pytest.raises(TypeError):
        probe_experiment(takagi_curve(4), 2.5)


def test_census_deterministic_and_informative():
    zoo = default_zoo(0)
    text, reps = horizon_property_census(zoo, n=10)
    again, _ = horizon_property_census(default_zoo(0), n=10)
    assert text == again
    rows = dict(zip([e.name for e in zoo], reps))
    assert rows["plane_x+y"].gap == pytest.approx(1.0, abs=1e-9)
    assert rows["depression"].verdict.startswith("horizon property fails")
    for a in ("2.2", "2.5"):
        assert abs(rows[f"probe_alpha={a}"].gap - 1.0) <= 0.05
    lines = text.splitlines()
    assert lines[0].startswith("name,surface_ols")
    assert len(lines) == 1 + len(zoo)


def test_census_accepts_pairs():
    text, reps = horizon_property_census([("plane", sample_surface("x+y", 8))], n=8)
    assert text.splitlines()[1].startswith("plane,")
    assert reps[0].horizon_property
