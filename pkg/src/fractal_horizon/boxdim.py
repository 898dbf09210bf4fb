"""Range sums, graph box counts and box-dimension estimates on dyadic meshes.

For a sample on the grid of exponent ``n`` and a scale ``m <= n`` the mesh
``delta = 2**-m`` splits the domain into ``(2**m)**d`` closed cells. For each
cell we take the max and min of the samples it contains. Then

* the range sum is the sum of ``max - min`` over all cells, accumulated with
  :func:`math.fsum` (exactly rounded, so the result does not depend on the
  summation order);
* the box count is the number of mesh boxes ``cell x [k*delta, (k+1)*delta)``
  met by the graph, i.e. ``floor(max/delta) - floor(min/delta) + 1`` per cell.
  Boxes are keyed by (cell index, slab index), so no two cells share a box.

With these definitions every row satisfies the two-sided bound::

    range_sum / delta <= box_count <= 2 * (1/delta + 1)**d + range_sum / delta

which :func:`scale_table` enforces on construction.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .sampling import Sample


class SandwichViolation(RuntimeError):
    """A scale row broke the range-sum/box-count bound (always a bug)."""


def _check_scale(sample: Sample, m: int) -> None:
    if m < 0:
        raise ValueError(f"scale exponent m={m} must be >= 0")
    if m > sample.n:
        raise ValueError(f"scale m={m} is finer than the grid (n={sample.n}); cell range not resolvable")


def _coarsen(a: np.ndarray, d: int, op) -> np.ndarray:
    if d == 1:
        return op(a.reshape(-1, 2), axis=1)
    k = a.shape[0] // 2
    return op(op(a.reshape(k, 2, k, 2), axis=3), axis=1)


def cell_extremes(sample: Sample, m_min: int = 0, m_max: int | None = None) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    """Per-cell (max, min) arrays for every scale ``m_min..m_max``.

    Built bottom-up: at ``m = n`` a cell is one grid interval (or square); a
    closed cell at scale ``m - 1`` is the union of its closed children, so its
    extremes are the extremes of theirs.
    """
    n = sample.n
    m_max = n if m_max is None else m_max
    _check_scale(sample, m_max)
    _check_scale(sample, m_min)
    v = sample.values
    if sample.d == 1:
        hi = np.maximum(v[:-1], v[1:])
        lo = np.minimum(v[:-1], v[1:])
    else:
        hi = np.maximum(np.maximum(v[:-1, :-1], v[1:, :-1]), np.maximum(v[:-1, 1:], v[1:, 1:]))
        lo = np.minimum(np.minimum(v[:-1, :-1], v[1:, :-1]), np.minimum(v[:-1, 1:], v[1:, 1:]))
    out = {}
    for m in range(n, m_min - 1, -1):
        if m <= m_max:
            out[m] = (hi, lo)
        if m > m_min:
            hi = _coarsen(hi, sample.d, np.max)
            lo = _coarsen(lo, sample.d, np.min)
    return out


def _range_sum(hi: np.ndarray, lo: np.ndarray) -> float:
    return math.fsum((hi - lo).ravel().tolist())


def _box_count(hi: np.ndarray, lo: np.ndarray, m: int) -> int:
    scale = 2.0**m
    # multiplying by a power of two is exact, so the floors are exact too
    top = np.floor(hi * scale)
    bottom = np.floor(lo * scale)
    return int((top - bottom + 1).sum(dtype=np.float64))


def cell_range_sum(sample: Sample, m: int) -> float:
    """Sum over all closed cells of side ``2**-m`` of (max - min)."""
    hi, lo = cell_extremes(sample, m, m)[m]
    return _range_sum(hi, lo)


def box_count_graph(sample: Sample, m: int) -> int:
    """Number of ``2**-m`` mesh boxes meeting the graph of the interpolant."""
    hi, lo = cell_extremes(sample, m, m)[m]
    return _box_count(hi, lo, m)


def sandwich_bounds(range_sum: float, m: int, d: int) -> tuple[float, float]:
    inv = 2.0**m
    return inv * range_sum, 2.0 * (inv + 1.0) ** d + inv * range_sum


@dataclass(frozen=True)
class ScaleRow:
    m: int
    range_sum: float
    box_count: int
    d: int = 1

    @property
    def delta(self) -> float:
        return 2.0**-self.m

    @property
    def lower_bound(self) -> float:
        return sandwich_bounds(self.range_sum, self.m, self.d)[0]

    @property
    def upper_bound(self) -> float:
        return sandwich_bounds(self.range_sum, self.m, self.d)[1]

    @property
    def holds(self) -> bool:
        return self.lower_bound <= self.box_count <= self.upper_bound


@dataclass(frozen=True)
class ScaleTable:
    d: int
    rows: tuple[ScaleRow, ...]
    source: str = ""

    def __post_init__(self):
        ms = [r.m for r in self.rows]
        if any(b <= a for a, b in zip(ms, ms[1:])):
            raise ValueError("scale rows must have strictly increasing m")

    @property
    def ms(self) -> np.ndarray:
        return np.array([r.m for r in self.rows])

    @property
    def range_sums(self) -> np.ndarray:
        return np.array([r.range_sum for r in self.rows])

    @property
    def box_counts(self) -> np.ndarray:
        return np.array([r.box_count for r in self.rows], dtype=np.int64)

    @property
    def empirical_constant(self) -> float:
        """max over rows of max(N / (range_sum/delta), (range_sum/delta) / N).

        Infinite when some range sum is zero; the comparison constant in the
        asymptotic equivalence is only guaranteed for non-constant inputs.
        """
        worst = 1.0
        for r in self.rows:
            if r.range_sum == 0.0:
                return math.inf
            ratio = r.box_count / r.lower_bound
            worst = max(worst, ratio, 1.0 / ratio)
        return worst

    def to_csv(self, header_lines=()) -> str:
        buf = io.StringIO()
        for line in header_lines:
            buf.write(f"# {line}\n")
        if self.source:
            buf.write(f"# source={self.source}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "delta", "range_sum", "box_count", "lower_bound_rhs", "upper_bound_rhs"])
        for r in self.rows:
            w.writerow([r.m, repr(r.delta), repr(r.range_sum), r.box_count,
                        repr(r.lower_bound), repr(r.upper_bound)])
        return buf.getvalue()


def scale_table(sample: Sample, m_min: int, m_max: int, source: str = "") -> ScaleTable:
    """Range sums and box counts for ``m = m_min..m_max``.

    Raises :class:`SandwichViolation` if any row breaks the two-sided bound.
    """
    if not 0 <= m_min < m_max:
        raise ValueError(f"need 0 <= m_min < m_max, got {m_min}..{m_max}")
    ext = cell_extremes(sample, m_min, m_max)
    rows = []
    for m in range(m_min, m_max + 1):
        hi, lo = ext[m]
        row = ScaleRow(m, _range_sum(hi, lo), _box_count(hi, lo, m), sample.d)
        if not row.holds:
            raise SandwichViolation(
                f"m={m}: {row.lower_bound!r} <= {row.box_count} <= {row.upper_bound!r} fails"
            )
        rows.append(row)
    return ScaleTable(sample.d, tuple(rows), source)


@dataclass(frozen=True)
class SandwichReport:
    m: int
    lower: float
    box_count: int
    upper: float

    @property
    def holds(self) -> bool:
        return self.lower <= self.box_count <= self.upper


def sandwich_check(sample: Sample, m: int) -> SandwichReport:
    hi, lo = cell_extremes(sample, m, m)[m]
    rs = _range_sum(hi, lo)
    lower, upper = sandwich_bounds(rs, m, sample.d)
    return SandwichReport(m, lower, _box_count(hi, lo, m), upper)


# -- estimation -------------------------------------------------------------

def ols_slope(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    xc = x - x.mean()
    return float((xc * (y - y.mean())).sum() / (xc * xc).sum())


@dataclass(frozen=True)
class DimensionEstimate:
    d: int
    ols_slope: float
    lower_est: float
    upper_est: float
    window: int
    degenerate: bool = False
    diagnostics: dict = field(default_factory=dict, compare=False)

    def as_row(self) -> dict:
        return {
            "ols_slope": self.ols_slope,
            "lower_est": self.lower_est,
            "upper_est": self.upper_est,
            "window": self.window,
            "degenerate": self.degenerate,
        }


def estimate_dims(table: ScaleTable, window: int = 4) -> DimensionEstimate:
    """Slopes of log2(box count) against m.

    ``ols_slope`` fits every row. ``lower_est``/``upper_est`` are the min/max
    slope over all runs of ``window`` consecutive rows inside the finer half
    of the table (the last ``window`` rows if that half is shorter). All three
    are clamped to ``[d, d + 1]``; raw values stay in ``diagnostics``.
    """
    if window < 2:
        raise ValueError("window must be >= 2")
    rows = table.rows
    if len(rows) < window + 1:
        raise ValueError(f"need at least window+1={window + 1} scale rows, got {len(rows)}")
    d = table.d
    if all(r.range_sum == 0.0 for r in rows):
        return DimensionEstimate(d, float(d), float(d), float(d), window, True,
                                 {"reason": "constant input"})
    ms = table.ms.astype(np.float64)
    logn = np.log2(table.box_counts.astype(np.float64))
    raw_ols = ols_slope(ms, logn)
    start = min(len(rows) // 2, len(rows) - window)
    slopes = [ols_slope(ms[i:i + window], logn[i:i + window])
              for i in range(start, len(rows) - window + 1)]
    raw_lo, raw_hi = min(slopes), max(slopes)

    def clamp(v):
        return float(min(max(v, d), d + 1))

    diag = {"raw_ols": raw_ols, "raw_lower": raw_lo, "raw_upper": raw_hi,
            "window_slopes": slopes, "tail_start_m": int(ms[start])}
    return DimensionEstimate(d, clamp(raw_ols), clamp(raw_lo), clamp(raw_hi), window, False, diag)


def default_scales(n: int) -> tuple[int, int]:
    """``(2, n - 1)``, the range used when none is given.

    Grids with ``n < 7`` would leave fewer than five rows, so they use ``(0, n)``.
    """
    return (2, n - 1) if n >= 7 else (0, n)


def estimate(sample: Sample, scales: tuple[int, int] | None = None, window: int = 4) -> DimensionEstimate:
    m_min, m_max = scales or default_scales(sample.n)
    return estimate_dims(scale_table(sample, m_min, m_max), window)
