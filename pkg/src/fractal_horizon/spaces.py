"""Scale-weighted norms, the induced metric, and the Hoelder-type Lipschitz constant.

For a sample ``f`` and ``alpha >= d`` the weighted range sum at scale ``m``
is ``R(m) * 2**(-m*(alpha - 1))``, where ``R(m)`` is the cell range sum at
mesh ``2**-m``. The norm is ``sup|f| + sup_m`` of that quantity, with the
sup over the dyadic scales ``m = 0..m_max`` only. A graph of upper box
dimension ``s`` has ``R(m) ~ 2**(m(s-1))``, so the sup stays bounded exactly
when ``s <= alpha``.

Lowering ``alpha`` raises every weight (``2**m >= 1``), so the norm is
nonincreasing in ``alpha``; in particular the norm at ``alpha + 1/(k+1)`` is
at least the norm at ``alpha + 1/k``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .boxdim import _range_sum, cell_extremes
from .sampling import Sample, SampledCurve, SampledSurface


def sup_norm(sample: Sample) -> float:
    return float(np.abs(sample.values).max())


def scale_weight(m: int, alpha: float) -> float:
    """``2**(-m*(alpha - 1))``; the factor applied to the range sum at scale ``m``."""
    return 2.0 ** (-m * (alpha - 1.0))


@dataclass(frozen=True)
class NormReport:
    sup_norm: float
    v_alpha_sup: float
    achieved_m: int
    alpha: float
    weighted: tuple[float, ...] = ()

    @property
    def norm(self) -> float:
        return self.sup_norm + self.v_alpha_sup

    def as_row(self) -> dict:
        return {"alpha": self.alpha, "sup_norm": self.sup_norm,
                "v_alpha_sup": self.v_alpha_sup, "achieved_m": self.achieved_m,
                "norm": self.norm}

    def to_csv(self) -> str:
        row = self.as_row()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(row))
        w.writerow([repr(v) if isinstance(v, float) else v for v in row.values()])
        return buf.getvalue()


def range_sums(sample: Sample, m_max: int | None = None) -> list[float]:
    """Cell range sums for ``m = 0..m_max``."""
    m_max = sample.n if m_max is None else m_max
    ext = cell_extremes(sample, 0, m_max)
    return [_range_sum(*ext[m]) for m in range(m_max + 1)]


def v_alpha_norm(sample: Sample, alpha: float, m_max: int | None = None) -> NormReport:
    if alpha < sample.d:
        raise ValueError(f"alpha={alpha} below the domain dimension {sample.d}")
    return _norm_from_sums(sample, range_sums(sample, m_max), alpha)


def _norm_from_sums(sample: Sample, sums: list[float], alpha: float) -> NormReport:
    weighted = tuple(r * scale_weight(m, alpha) for m, r in enumerate(sums))
    best = int(np.argmax(weighted))  # first maximiser
    return NormReport(sup_norm(sample), weighted[best], best, alpha, weighted)


def _difference(f: Sample, g: Sample) -> Sample:
    if type(f) is not type(g) or f.n != g.n:
        raise ValueError("metric needs samples of the same kind and grid exponent")
    return type(f)(f.n, f.values - g.values)


@dataclass(frozen=True)
class MetricReport:
    value: float
    tail_bound: float
    terms: tuple[float, ...]

    def __float__(self) -> float:
        return self.value


def d_alpha_metric(f: Sample, g: Sample, alpha: float, K: int = 10,
                   m_max: int | None = None) -> MetricReport:
    """Partial sum ``sum_{k=1..K} min(2**-k, ||f - g||_{alpha + 1/k})``.

    The omitted terms add at most ``2**-K``, reported as ``tail_bound``.
    """
    if K < 1:
        raise ValueError("need at least one term")
    diff = _difference(f, g)
    if alpha < diff.d:
        raise ValueError(f"alpha={alpha} below the domain dimension {diff.d}")
    sums = range_sums(diff, m_max)
    terms = tuple(min(2.0**-k, _norm_from_sums(diff, sums, alpha + 1.0 / k).norm)
                  for k in range(1, K + 1))
    return MetricReport(math.fsum(terms), 2.0**-K, terms)


@dataclass(frozen=True)
class MonotonicityReport:
    alpha: float
    norms: tuple[float, ...]  # norms[k-1] is the norm at alpha + 1/k
    per_scale_ok: bool

    @property
    def monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.norms, self.norms[1:]))

    @property
    def holds(self) -> bool:
        return self.monotone and self.per_scale_ok


def norm_monotonicity_check(sample: Sample, alpha: float, k_max: int = 6,
                            m_max: int | None = None) -> MonotonicityReport:
    """Norms at ``alpha + 1/k`` for ``k = 1..k_max``, expected nondecreasing in ``k``.

    Also checks the scale-by-scale statement: every weighted range sum at
    ``alpha + 1/k`` is at most the one at ``alpha + 1/(k+1)``.
    """
    if alpha < sample.d:
        raise ValueError(f"alpha={alpha} below the domain dimension {sample.d}")
    sums = range_sums(sample, m_max)
    reports = [_norm_from_sums(sample, sums, alpha + 1.0 / k) for k in range(1, k_max + 1)]
    per_scale = all(
        a <= b for lo, hi in zip(reports, reports[1:]) for a, b in zip(lo.weighted, hi.weighted)
    )
    return MonotonicityReport(alpha, tuple(r.norm for r in reports), per_scale)


# -- Lipschitz constant ---------------------------------------------------------

ALL_PAIRS_MAX_N = 8


def distance_power(a: int, b: int, n: int, exponent: float) -> float:
    """``|(a, b)| * 2**-n`` raised to ``exponent``, for grid offset ``(a, b)``."""
    return (math.hypot(a, b) * 2.0**-n) ** exponent


def _offsets(n: int, all_pairs: bool) -> list[tuple[int, int]]:
    size = 2**n
    if all_pairs:
        # half plane: (a, b) and (-a, -b) give the same pairs
        return [(a, b) for a in range(0, size + 1) for b in range(-size, size + 1)
                if a > 0 or b > 0]
    out = []
    for p in range(n + 1):
        s = 2**p
        out += [(s, 0), (0, s), (s, s), (s, -s)]
    return out


def _max_abs_diff(v: np.ndarray, a: int, b: int) -> float:
    rows = v.shape[0]
    x0, x1 = v[: rows - a], v[a:]
    if b >= 0:
        d = x1[:, b:] - x0[:, : v.shape[1] - b]
    else:
        d = x1[:, : v.shape[1] + b] - x0[:, -b:]
    return float(np.abs(d).max())


@dataclass(frozen=True)
class LipReport:
    value: float
    alpha: float
    offsets_checked: int
    all_pairs: bool
    worst_offset: tuple[int, int] | None

    @property
    def ladder_factor(self) -> float:
        """Bound on true/computed when only dyadic offsets were used.

        An offset ``(a, b)`` splits into the binary digits of ``a`` and ``b``;
        chaining those axial steps gives ``|df| <= L * 2 * |o|**e / (1 - 2**-e)``
        with ``e = 3 - alpha``.
        """
        if self.all_pairs:
            return 1.0
        e = 3.0 - self.alpha
        return 2.0 / (1.0 - 2.0**-e)


def lip_alpha_report(f: SampledSurface, alpha: float, all_pairs: bool | None = None) -> LipReport:
    """``max |f(p) - f(q)| / |p - q|**(3 - alpha)`` over grid pairs.

    With ``all_pairs`` (the default for ``n <= 8``) every pair of grid points
    is covered; offsets are visited by increasing distance and the scan stops
    once the global range over the remaining distances cannot beat the
    current maximum. Otherwise only axial and diagonal offsets of length
    ``2**p`` are used; the true constant is then at most
    :attr:`LipReport.ladder_factor` times larger.
    """
    if not isinstance(f, SampledSurface):
        raise TypeError("lip_alpha needs a surface")
    if not 2.0 <= alpha < 3.0:
        raise ValueError(f"alpha={alpha} outside [2, 3)")
    if all_pairs is None:
        all_pairs = f.n <= ALL_PAIRS_MAX_N
    e = 3.0 - alpha
    v = f.values
    spread = float(v.max() - v.min())
    offs = sorted(_offsets(f.n, all_pairs), key=lambda ab: (ab[0] ** 2 + ab[1] ** 2, ab))
    best, worst, checked = 0.0, None, 0
    for a, b in offs:
        dp = distance_power(a, b, f.n, e)
        if spread / dp <= best:
            break
        checked += 1
        q = _max_abs_diff(v, a, b) / dp
        if q > best:
            best, worst = q, (a, b)
    return LipReport(best, alpha, checked, all_pairs, worst)


def lip_alpha(f: SampledSurface, alpha: float) -> float:
    return lip_alpha_report(f, alpha).value


def curve_holder_quotient(curve: SampledCurve, exponent: float) -> float:
    """All-pairs ``max |c(x1) - c(x2)| / |x1 - x2|**exponent`` for a curve."""
    v = curve.values
    best = 0.0
    for a in range(1, curve.size + 1):
        q = float(np.abs(v[a:] - v[:-a]).max()) / distance_power(a, 0, curve.n, exponent)
        best = max(best, q)
    return best
