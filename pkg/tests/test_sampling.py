import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fractal_horizon.sampling import (
    GridCell, NonFiniteSampleError, SampledCurve, SampledSurface, add, constant_like, extrude,
    from_bytes, from_csv, lin_comb, sample_curve, sample_surface, slice_at, to_bytes, to_csv,
)
from conftest import dyadic_curve, dyadic_surface


def test_curve_grid_and_values():
    f = sample_curve(lambda x: x * x, 3)
    assert f.size == 8
    assert f.values.shape == (9,)
    assert f.values[4] == 0.25
    assert np.array_equal(f.grid, np.arange(9) / 8)


def test_surface_index_convention_is_x_first():
    f = sample_surface(lambda x, y: x + 10 * y, 2)
    assert f.values[1, 0] == 0.25  # x = 1/4, y = 0
    assert f.values[0, 1] == 2.5   # x = 0, y = 1/4


def test_samples_are_immutable():
    f = sample_curve("identity", 3)
    with pytest.raises(ValueError):
        f.values[0] = 1.0


def test_nonfinite_rejected_with_location():
    v = np.zeros(9)
    v[5] = np.nan
    with pytest.raises(NonFiniteSampleError) as err:
        SampledCurve(3, v)
    assert err.value.index == 5
    w = np.zeros((5, 5))
    w[2, 3] = np.inf
    with pytest.raises(NonFiniteSampleError) as err:
        SampledSurface(2, w)
    assert err.value.index == (2, 3)


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        SampledCurve(3, np.zeros(8))


def test_extrude_and_slice():
    psi = dyadic_curve(1, 4)
    s = extrude(psi)
    for j in (0, 7, 16):
        assert slice_at(s, j) == psi
    with pytest.raises(IndexError):
        slice_at(s, 17)


def test_lin_comb_and_add():
    f, g = dyadic_curve(1, 4), dyadic_curve(2, 4)
    assert np.array_equal(lin_comb(2.0, f, -0.5, g).values, 2.0 * f.values - 0.5 * g.values)
    assert np.array_equal(add(f, g).values, f.values + g.values)
    with pytest.raises(ValueError):
        add(f, dyadic_curve(3, 5))
    with pytest.raises(ValueError):
        lin_comb(1.0, f, 1.0, extrude(g))


def test_constant_like():
    f = dyadic_surface(3, 2)
    c = constant_like(f, -1.25)
    assert isinstance(c, SampledSurface) and np.all(c.values == -1.25)


def test_grid_cell_range():
    f = sample_curve("identity", 4)
    cell = GridCell(2, (1,))
    assert cell.sample_slice(4) == (slice(4, 9),)
    assert cell.range_of(f) == 0.25
    with pytest.raises(ValueError):
        GridCell(2, (4,))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 6), st.booleans())
def test_binary_round_trip(seed, n, surface):
    f = dyadic_surface(seed, n) if surface else dyadic_curve(seed, n)
    blob = to_bytes(f)
    assert blob[:4] == b"FRH1"
    assert from_bytes(blob) == f


def test_binary_layout_is_little_endian_row_major():
    f = sample_surface(lambda x, y: x + 2 * y, 1)
    blob = to_bytes(f)
    assert len(blob) == 9 + 8 * 9
    data = np.frombuffer(blob[9:], dtype="<f8").reshape(3, 3)
    assert np.array_equal(data, f.values)


def test_bad_files_rejected():
    f = dyadic_curve(0, 3)
    with pytest.raises(ValueError):
        from_bytes(b"XXXX" + to_bytes(f)[4:])
    with pytest.raises(ValueError):
        from_bytes(to_bytes(f)[:-1])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32), st.booleans())
def test_csv_round_trip(seed, surface):
    f = dyadic_surface(seed, 3) if surface else sample_curve(lambda x: np.sin(7 * x) / 3, 4)
    assert from_csv(to_csv(f, ["a comment"])) == f


def test_sampling_by_name_and_spec():
    from fractal_horizon.generators import GeneratorSpec

    assert np.array_equal(sample_surface("x*y", 3).values[8], np.arange(9) / 8)
    takagi = sample_curve(GeneratorSpec("takagi", 1.0), 5)
    assert takagi.values[16] == 0.5
    with pytest.raises(ValueError):
        sample_curve(GeneratorSpec("midpoint", 2.5, 0, {"d": 2}), 3)
