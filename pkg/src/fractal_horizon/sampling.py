"""Dyadic grid samples of functions on [0,1] and [0,1]^2.

A curve sampled at exponent ``n`` holds ``2**n + 1`` values, ``values[i] =
f(i / 2**n)``; a surface holds a ``(2**n + 1, 2**n + 1)`` array with
``values[i, j] = f(i / 2**n, j / 2**n)``. The first index is always the x
axis and the second the y axis. Every dyadic cell of side ``2**-m`` with
``m <= n`` therefore has its corners on sample points, and the range of the
piecewise (multi)linear interpolant over such a cell is the max minus min of
the samples it contains.

Samples are immutable: the arrays are stored read-only and every operation
returns a new object.
"""
from __future__ import annotations

import csv
import io
import struct
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

MAGIC = b"FRH1"
KIND_CURVE = 1
KIND_SURFACE = 2
_HEADER = struct.Struct("<4sBI")


class NonFiniteSampleError(ValueError):
    """Raised when a sample contains NaN or infinity."""

    def __init__(self, index, value):
        super().__init__(f"non-finite sample {value!r} at grid index {index}")
        self.index = index
        self.value = value


def _freeze(values: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.shape != shape:
        raise ValueError(f"expected shape {shape}, got {arr.shape}")
    bad = ~np.isfinite(arr)
    if bad.any():
        idx = tuple(int(k) for k in np.argwhere(bad)[0])
        raise NonFiniteSampleError(idx[0] if len(idx) == 1 else idx, arr[idx])
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SampledCurve:
    n: int
    values: np.ndarray

    d = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("grid exponent n must be >= 1")
        object.__setattr__(self, "values", _freeze(self.values, (2**self.n + 1,)))

    @property
    def size(self) -> int:
        return 2**self.n

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.size + 1) / self.size

    def __eq__(self, other):
        return (
            isinstance(other, SampledCurve)
            and self.n == other.n
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SampledSurface:
    n: int
    values: np.ndarray

    d = 2

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("grid exponent n must be >= 1")
        side = 2**self.n + 1
        object.__setattr__(self, "values", _freeze(self.values, (side, side)))

    @property
    def size(self) -> int:
        return 2**self.n

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.size + 1) / self.size

    def __eq__(self, other):
        return (
            isinstance(other, SampledSurface)
            and self.n == other.n
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


Sample = Union[SampledCurve, SampledSurface]


@dataclass(frozen=True)
class GridCell:
    """A dyadic cell of side ``2**-m`` identified by its integer index."""

    m: int
    index: tuple[int, ...]

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("scale exponent must be >= 0")
        if any(not 0 <= k < 2**self.m for k in self.index):
            raise ValueError(f"cell index {self.index} outside [0, 2**{self.m})")

    def sample_slice(self, n: int) -> tuple[slice, ...]:
        """Index slices selecting the closed cell's samples on a grid of exponent n."""
        if self.m > n:
            raise ValueError(f"cell scale m={self.m} finer than grid n={n}")
        w = 2 ** (n - self.m)
        return tuple(slice(k * w, (k + 1) * w + 1) for k in self.index)

    def range_of(self, sample: Sample) -> float:
        if len(self.index) != sample.d:
            raise ValueError("cell dimension does not match sample")
        block = sample.values[self.sample_slice(sample.n)]
        return float(block.max() - block.min())


def _evaluate(func: Callable, *coords: np.ndarray) -> np.ndarray:
    out = func(*coords)
    return np.broadcast_to(np.asarray(out, dtype=np.float64), coords[0].shape)


def sample_curve(spec, n: int) -> SampledCurve:
    """Sample a recipe on the grid of exponent ``n``.

    ``spec`` may be a :class:`~fractal_horizon.generators.GeneratorSpec`, the
    id of a registered closed form (``"identity"``, ``"zero"``, ...) or a
    vectorised callable ``f(x)``.
    """
    if n < 1:
        raise ValueError("grid exponent n must be >= 1")
    if callable(spec):
        x = np.arange(2**n + 1) / 2**n
        return SampledCurve(n, _evaluate(spec, x))
    from .generators import GeneratorSpec, closed_form, generate

    if isinstance(spec, str):
        spec = closed_form(spec)
    if not isinstance(spec, GeneratorSpec):
        raise TypeError(f"cannot sample {type(spec).__name__}")
    out = generate(spec, n)
    if not isinstance(out, SampledCurve):
        raise ValueError(f"spec {spec.family!r} describes a surface, not a curve")
    return out


def sample_surface(spec, n: int) -> SampledSurface:
    """Two-variable counterpart of :func:`sample_curve`; callables get ``f(x, y)``."""
    if n < 1:
        raise ValueError("grid exponent n must be >= 1")
    if callable(spec):
        t = np.arange(2**n + 1) / 2**n
        x, y = np.meshgrid(t, t, indexing="ij")
        return SampledSurface(n, _evaluate(spec, x, y))
    from .generators import GeneratorSpec, closed_form, generate

    if isinstance(spec, str):
        spec = closed_form(spec, surface=True)
    if not isinstance(spec, GeneratorSpec):
        raise TypeError(f"cannot sample {type(spec).__name__}")
    out = generate(spec, n)
    if not isinstance(out, SampledSurface):
        raise ValueError(f"spec {spec.family!r} describes a curve, not a surface")
    return out


def extrude(psi: SampledCurve) -> SampledSurface:
    """The y-independent surface ``(x, y) -> psi(x)``."""
    side = psi.size + 1
    return SampledSurface(psi.n, np.repeat(psi.values[:, None], side, axis=1))


def slice_at(f: SampledSurface, j: int) -> SampledCurve:
    """The curve ``x -> f(x, y_j)``."""
    if not 0 <= j <= f.size:
        raise IndexError(f"slice index {j} outside [0, {f.size}]")
    return SampledCurve(f.n, f.values[:, j])


def lin_comb(a: float, f: Sample, b: float, g: Sample) -> Sample:
    """Pointwise ``a*f + b*g`` evaluated as ``a * f.values + b * g.values``."""
    if type(f) is not type(g) or f.n != g.n:
        raise ValueError("lin_comb needs samples of the same kind and grid exponent")
    return type(f)(f.n, a * f.values + b * g.values)


def add(f: Sample, g: Sample) -> Sample:
    """``f + g``; unlike ``lin_comb(1, f, 1, g)`` this never multiplies."""
    if type(f) is not type(g) or f.n != g.n:
        raise ValueError("add needs samples of the same kind and grid exponent")
    return type(f)(f.n, f.values + g.values)


def constant_like(f: Sample, c: float) -> Sample:
    return type(f)(f.n, np.full(f.values.shape, float(c)))


# -- serialisation ----------------------------------------------------------

def to_bytes(sample: Sample) -> bytes:
    """``FRH1`` | kind byte | uint32 n | float64 samples, all little-endian, row-major."""
    kind = KIND_CURVE if isinstance(sample, SampledCurve) else KIND_SURFACE
    body = np.ascontiguousarray(sample.values, dtype="<f8").tobytes()
    return _HEADER.pack(MAGIC, kind, sample.n) + body


def from_bytes(blob: bytes) -> Sample:
    if len(blob) < _HEADER.size:
        raise ValueError("truncated sample file")
    magic, kind, n = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    side = 2**n + 1
    if kind == KIND_CURVE:
        shape, cls = (side,), SampledCurve
    elif kind == KIND_SURFACE:
        shape, cls = (side, side), SampledSurface
    else:
        raise ValueError(f"unknown sample kind {kind}")
    expected = _HEADER.size + 8 * int(np.prod(shape))
    if len(blob) != expected:
        raise ValueError(f"sample file has {len(blob)} bytes, expected {expected}")
    data = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size).reshape(shape)
    return cls(n, data)


def save(sample: Sample, path) -> None:
    with open(path, "wb") as fh:
        fh.write(to_bytes(sample))


def load(path) -> Sample:
    with open(path, "rb") as fh:
        return from_bytes(fh.read())


def to_csv(sample: Sample, header_lines=()) -> str:
    """One CSV row per grid line (a single row for a curve).

    ``header_lines`` are written first as ``#`` comments; floats use ``repr``
    so the text round-trips exactly.
    """
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    rows = sample.values[None, :] if sample.d == 1 else sample.values
    for row in rows:
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def from_csv(text: str) -> Sample:
    rows = [
        [float(v) for v in r]
        for r in csv.reader(line for line in text.splitlines() if line and not line.startswith("#"))
    ]
    arr = np.array(rows, dtype=np.float64)
    side = arr.shape[1]
    n = side.bit_length() - 1
    if 2**n + 1 != side:
        raise ValueError(f"row length {side} is not 2**n + 1")
    if arr.shape[0] == 1:
        return SampledCurve(n, arr[0])
    return SampledSurface(n, arr)
