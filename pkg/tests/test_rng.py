import numpy as np
from hypothesis import given, strategies as st

from fractal_horizon import rng


def reference_splitmix(seed, count):
    state, out = seed, []
    for _ in range(count):
        state = (state + rng.GAMMA) & rng.MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & rng.MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & rng.MASK64
        out.append(z ^ (z >> 31))
    return out


def test_known_outputs():
    assert int(rng.splitmix64(0, 1)[0]) == 0xE220A8397B1DCDAF
    assert [int(v) for v in rng.splitmix64(1234567, 3)] == [
        6457827717110365317, 3203168211198807973, 9817491932198370423]


@given(st.integers(0, 2**64 - 1), st.integers(0, 40))
def test_vectorised_matches_scalar_loop(seed, count):
    assert [int(v) for v in rng.splitmix64(seed, count)] == reference_splitmix(seed, count)


@given(st.integers(0, 2**64 - 1), st.integers(0, 30), st.integers(1, 30))
def test_offset_slices_agree(seed, start, count):
    full = rng.splitmix64(seed, start + count)
    assert np.array_equal(rng.splitmix64(seed, count, start), full[start:])


def test_stateful_stream_continues():
    s = rng.SplitMix64(42)
    a = s.uniform(5)
    b = s.uniform(3)
    assert np.array_equal(np.concatenate([a, b]), rng.uniform(42, 8))
    assert s.position == 8


def test_uniform_range():
    u = rng.uniform(7, 10000)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 0.02
