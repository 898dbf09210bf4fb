import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fractal_horizon.boxdim import estimate, scale_table
from fractal_horizon.generators import (
    GeneratorSpec, closed_form, generate, midpoint_curve, midpoint_surface, monotone_curve,
    probe_curve_spec, probe_surface, takagi_curve, weierstrass_curve, weierstrass_terms,
)
from fractal_horizon.horizon import horizon
import oracles

FINITE_GRID_BIAS = ("sampled cell ranges undershoot near grid scale; the bias grows with "
                    "roughness and exceeds this tolerance (see the decisions ledger)")


def test_spec_validation():
    with pytest.raises(ValueError):
        GeneratorSpec("fbm", 1.5)
    with pytest.raises(ValueError):
        GeneratorSpec("weierstrass", 2.5)
    with pytest.raises(ValueError):
        GeneratorSpec("midpoint", 3.5, 0, {"d": 2})


def test_spec_text_round_trip():
    spec = GeneratorSpec("weierstrass", 1.7, 12345, {"b": 10})
    text = spec.to_text()
    assert text.splitlines() == ["family=weierstrass", "target_dim=1.7", "seed=12345", "b=10"]
    assert GeneratorSpec.from_text(text) == spec


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(["weierstrass", "midpoint"]), st.integers(0, 2**63))
def test_determinism(family, seed):
    spec = GeneratorSpec(family, 1.6, seed)
    assert generate(spec, 9) == generate(spec, 9)


def test_weierstrass_rejects_bad_dimension():
    with pytest.raises(ValueError):
        weierstrass_curve(1.0)
    with pytest.raises(ValueError):
        weierstrass_curve(2.1)
    with pytest.raises(ValueError):
        weierstrass_curve(1.5, b=1)


def test_weierstrass_truncation():
    assert weierstrass_terms(10, 2) == 10
    assert weierstrass_terms(16, 10) == 5
    assert 10**weierstrass_terms(16, 10) >= 2**16 > 10 ** (weierstrass_terms(16, 10) - 1)


def test_weierstrass_matches_direct_series():
    s, b, n = 1.4, 3, 8
    f = weierstrass_curve(s, b, 5, n)
    from fractal_horizon import rng

    K = weierstrass_terms(n, b)
    theta = 2 * np.pi * rng.uniform(5, K + 1)
    x = np.arange(2**n + 1) / 2**n
    direct = sum(b ** ((s - 2) * k) * np.cos(2 * np.pi * b**k * x + theta[k]) for k in range(K + 1))
    assert np.allclose(f.values, direct, atol=1e-9)


def test_weierstrass_extra_term_bounded():
    s, b, n = 1.5, 2, 10
    K = weierstrass_terms(n, b)
    base = weierstrass_curve(s, b, 3, n, terms=K + 1)
    more = weierstrass_curve(s, b, 3, n, terms=K + 2)
    amp = b ** ((s - 2) * (K + 1))
    # one rounding of the running sum is allowed on top of the term's amplitude
    assert np.all(np.abs(more.values - base.values) <= amp + np.spacing(np.abs(base.values).max()))


def test_single_term_is_smooth():
    f = weierstrass_curve(1.0, 2, 0, 14, terms=1)
    assert abs(estimate(f).ols_slope - 1.0) <= 0.05


def test_weierstrass_s15_calibration():
    e = estimate(weierstrass_curve(1.5, 2, 0, 16), (4, 14))
    assert abs(e.ols_slope - 1.5) <= 0.1


@pytest.mark.xfail(strict=True, reason=FINITE_GRID_BIAS)
def test_weierstrass_s18_base3_calibration():
    e = estimate(weierstrass_curve(1.8, 3, 0, 16), (4, 14))
    assert abs(e.ols_slope - 1.8) <= 0.12


def test_takagi_values_exact():
    n = 12
    f = takagi_curve(n)
    assert f.values[0] == 0 and f.values[-1] == 0
    assert f.values[2 ** (n - 1)] == 0.5
    for i in (1, 3, 1000, 2731, 4095):
        assert Fraction(f.values[i]) == oracles.takagi_exact(i, n)


def test_takagi_dimension():
    assert abs(estimate(takagi_curve(16), (4, 14)).ols_slope - 1.0) <= 0.1


def test_midpoint_curve_s1():
    for seed in (0, 1, 2):
        assert abs(estimate(midpoint_curve(1.0, seed, 14)).ols_slope - 1.0) <= 0.1


def test_midpoint_surface_example():
    assert abs(estimate(midpoint_surface(2.5, 7, 10), (2, 9)).ols_slope - 2.5) <= 0.15


def test_midpoint_amplitude_law():
    # with every uniform draw at its extreme the level-l offsets have size 2**(-(d+1-s) l)
    f = midpoint_curve(1.5, 4, 12)
    d = np.abs(f.values[1::2] - 0.5 * (f.values[:-1:2] + f.values[2::2]))
    assert d.max() <= 2.0 ** (-0.5 * 12)


def test_midpoint_range_checks():
    with pytest.raises(ValueError):
        midpoint_curve(2.5)
    with pytest.raises(ValueError):
        midpoint_surface(1.5)


def test_probe_horizon_is_generating_curve():
    for alpha in (2.0, 2.3, 2.9):
        p = probe_surface(alpha, 8)
        assert horizon(p.surface) == p.curve
        assert np.array_equal(p.surface.values[:, 5], p.curve.values)


def test_probe_alpha_two_is_smooth():
    spec = probe_curve_spec(2.0)
    assert spec.target_dim == 1.0
    assert abs(estimate(probe_surface(2.0, 10).curve).ols_slope - 1.0) <= 0.05
    with pytest.raises(ValueError):
        probe_curve_spec(3.1)


@pytest.mark.xfail(strict=True, reason=FINITE_GRID_BIAS)
def test_probe_surface_dimension_example():
    e = estimate(probe_surface(2.6, 10).surface)
    assert abs(e.ols_slope - 2.6) <= 0.15


def test_monotone_fixtures():
    assert estimate(monotone_curve(10, 0, "constant")).degenerate
    for kind in ("staircase", "sorted"):
        f = monotone_curve(14, 3, kind)
        assert np.all(np.diff(f.values) >= 0)
        assert abs(estimate(f).ols_slope - 1.0) <= 0.1
        total = f.values[-1] - f.values[0]
        assert all(r.range_sum <= total for r in scale_table(f, 0, 14).rows)


def test_closed_forms():
    from fractal_horizon.sampling import sample_curve, sample_surface

    assert np.array_equal(sample_curve("centered", 4).values, np.arange(17) / 16 - 0.5)
    assert sample_surface("x+y", 2).values[4, 4] == 2.0
    assert closed_form("zero", surface=True).params["expr"] == "zero2"
    with pytest.raises(ValueError):
        closed_form("tan")
