"""Forcers and modifiers: surfaces that pin column maxima to a chosen row.

A *forcer* for a finite family ``K`` and a row ``y0`` is ``-F(y)`` extruded
along ``x``, with ``F`` the two-sided running maximum of

    g*(y) = max_x max_{f in K} (f(x, y) - f(x, y0)),

so that adding it to any member of ``K`` moves every column maximum onto
``y0``. A *modifier* for a curve ``g`` is a surface equal to ``g`` on the
row ``y0`` and below it elsewhere, built by blending a ladder of Lipschitz
minorants of ``g`` across dyadic strips so that its graph still has box
dimension 2 however rough ``g`` is.

All postconditions are checked in floating point, not only in exact
arithmetic; the few places where rounding could break them are handled
explicitly and commented.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .boxdim import DimensionEstimate, cell_extremes, default_scales, estimate, _range_sum
from .generators import midpoint_surface, takagi_curve, weierstrass_curve
from .horizon import horizon
from .sampling import SampledCurve, SampledSurface, add, extrude, slice_at


def grid_index(y0: float, n: int) -> int:
    """Index of the grid row at coordinate ``y0``; raises if ``y0`` is off-grid."""
    j = y0 * 2**n
    if not 0.0 <= y0 <= 1.0 or j != math.floor(j):
        raise ValueError(f"y0={y0} is not a grid coordinate for n={n}")
    return int(j)


# -- forcer -----------------------------------------------------------------

@dataclass(frozen=True)
class ForcerParts:
    phi_sup: SampledSurface
    g_star: np.ndarray
    F: SampledCurve
    forcer: SampledSurface
    y0_index: int


def _check_family(K) -> int:
    K = list(K)
    if not K:
        raise ValueError("forcer needs a non-empty family")
    n = K[0].n
    if any(not isinstance(f, SampledSurface) or f.n != n for f in K):
        raise ValueError("all members of the family must be surfaces on the same grid")
    return n


def _running_max_outward(g: np.ndarray, j0: int) -> np.ndarray:
    out = np.empty_like(g)
    out[j0:] = np.maximum.accumulate(g[j0:])
    out[: j0 + 1] = np.maximum.accumulate(g[: j0 + 1][::-1])[::-1]
    return out


def forcer(K, y0: float) -> ForcerParts:
    n = _check_family(K)
    j0 = grid_index(y0, n)
    vals = [f.values for f in K]
    phi = np.max([v - v[:, j0:j0 + 1] for v in vals], axis=0)
    g_star = phi.max(axis=0)
    # In exact arithmetic F >= g* already gives f(x,y) - F(y) <= f(x,y0).
    # After rounding the subtraction can land one ulp above; push each
    # column value up until the rounded inequality holds for every member.
    lifted = g_star.copy()
    while True:
        bad = np.zeros(lifted.shape, dtype=bool)
        for v in vals:
            bad |= (v - lifted[None, :] > v[:, j0:j0 + 1]).any(axis=0)
        if not bad.any():
            break
        lifted[bad] = np.nextafter(lifted[bad], np.inf)
    F = _running_max_outward(lifted, j0)
    side = 2**n + 1
    return ForcerParts(
        phi_sup=SampledSurface(n, phi),
        g_star=g_star,
        F=SampledCurve(n, F),
        forcer=SampledSurface(n, np.broadcast_to(-F[None, :], (side, side))),
        y0_index=j0,
    )


@dataclass(frozen=True)
class PostconditionReport:
    checks: dict  # name -> bool
    worst_slack: float

    @property
    def holds(self) -> bool:
        return all(self.checks.values())

    def lines(self) -> list[str]:
        out = [f"{name}: {'pass' if ok else 'FAIL'}" for name, ok in self.checks.items()]
        out.append(f"worst_slack: {self.worst_slack!r}")
        return out


def forcer_postconditions(K, parts: ForcerParts) -> PostconditionReport:
    """Exhaustive grid check of the two forcer properties.

    (1) ``f(x,y0) + forcer(x,y0) >= f(x,y) + forcer(x,y)`` for every member;
    (2) ``forcer(x,y0) == 0``. Also checks the envelope shape of ``F``.
    """
    j0 = parts.y0_index
    fv = parts.forcer.values
    slack = math.inf
    for f in K:
        s = f.values + fv
        slack = min(slack, float((s[:, j0:j0 + 1] - s).min()))
    F = parts.F.values
    checks = {
        "column_max_at_y0": slack >= 0.0,
        "zero_on_y0": bool(np.all(fv[:, j0] == 0.0)),
        "F_dominates_g_star": bool(np.all(F >= parts.g_star)),
        "F_zero_at_y0": bool(F[j0] == 0.0),
        "F_monotone_each_side": bool(np.all(np.diff(F[: j0 + 1]) <= 0) and np.all(np.diff(F[j0:]) >= 0)),
    }
    return PostconditionReport(checks, slack)


# -- approximant ladder -----------------------------------------------------

SLOPE_MARGIN = 1.0 - 2.0**-30


@dataclass(frozen=True)
class ApproximantLadder:
    g: SampledCurve
    p: tuple[SampledCurve, ...]  # p[k] for k = 0..k_max
    schedule: tuple[int, ...] = field(default=())

    @property
    def k_max(self) -> int:
        return len(self.p) - 1

    def lipschitz(self, k: int) -> float:
        """Largest adjacent-sample slope of ``p[k]``."""
        v = self.p[k].values
        return float(np.abs(np.diff(v)).max()) * 2.0**self.g.n

    def invariants(self) -> dict:
        g = self.g.values
        gaps = [float((g - pk.values).max()) for pk in self.p]
        return {
            "increasing": all(bool(np.all(a.values <= b.values)) for a, b in zip(self.p, self.p[1:])),
            "below_g": all(bool(np.all(pk.values <= g)) for pk in self.p),
            "gap_nonincreasing": all(b <= a for a, b in zip(gaps, gaps[1:])),
            "lipschitz": all(self.lipschitz(k) <= 2.0**k for k in range(len(self.p))),
        }


def lower_lipschitz_envelope(values: np.ndarray, slope: float, h: float) -> np.ndarray:
    """Largest function below ``values`` whose adjacent slopes are at most ``slope``."""
    u = np.array(values, dtype=np.float64)
    step = slope * h
    for i in range(1, len(u)):
        u[i] = min(u[i], u[i - 1] + step)
    for i in range(len(u) - 2, -1, -1):
        u[i] = min(u[i], u[i + 1] + step)
    return u


def monotone_approximants(g: SampledCurve, k_max: int) -> ApproximantLadder:
    """Piecewise-linear minorants ``p_0 <= p_1 <= ... <= p_k_max <= g``.

    ``p_k = max(L_k(g) - eps_k, -|g|_inf)`` where ``L_k`` is the lower
    Lipschitz envelope at slope ``2**k`` (shaved by a relative ``2**-30`` to
    absorb rounding) and ``eps_k = |g|_inf * 2**-k``. The envelope grows with
    the slope and the offset shrinks, so the ladder is increasing without any
    repeated terms; once ``2**k`` exceeds the steepest grid slope of ``g`` the
    envelope is ``g`` itself and the gap is just ``eps_k``.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    gv = g.values
    gmax = float(np.abs(gv).max())
    h = 2.0**-g.n
    p = []
    for k in range(k_max + 1):
        env = lower_lipschitz_envelope(gv, 2.0**k * SLOPE_MARGIN, h)
        p.append(SampledCurve(g.n, np.maximum(env - gmax * 2.0**-k, -gmax)))
    return ApproximantLadder(g, tuple(p), tuple(1 for _ in p))


# -- strip profile and modifier ---------------------------------------------

def strip_of(t: float) -> tuple[int, float]:
    """Strip index ``k`` with ``2**-k <= t < 2**(-k+1)`` and ``q = 2**k t - 1``.

    ``t = 1`` is placed at the closed right end of the first strip (``k = 1``,
    ``q = 1``). Both values are exact: ``q`` is ``2*mantissa - 1``.
    """
    if not 0.0 < t <= 1.0:
        raise ValueError(f"t={t} outside (0, 1]")
    if t == 1.0:
        return 1, 1.0
    mant, e = math.frexp(t)
    return 1 - e, 2.0 * mant - 1.0


def q_profile(y: float, k: int | None = None) -> float:
    """The strip-wise linear ramp: 0 at 0, ``2**k y - 1`` on ``[2**-k, 2**(-k+1))``, 1 at 1.

    ``k`` is implied by ``y``; if given it must match.
    """
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"y={y} outside [0, 1]")
    if y == 0.0:
        return 0.0
    if y == 1.0:
        return 1.0
    kk, q = strip_of(y)
    if k is not None and k != kk:
        raise ValueError(f"y={y} lies in strip {kk}, not {k}")
    return q


def blend(p_prev: np.ndarray, p_k: np.ndarray, q: float) -> np.ndarray:
    """``q*p_prev + (1-q)*p_k`` written as ``p_k - q*(p_k - p_prev)``.

    With ``p_prev <= p_k`` the subtracted term is nonnegative after rounding,
    so the result never exceeds ``p_k`` (and hence never exceeds ``g``).
    """
    return p_k - q * (p_k - p_prev)


def modifier_coordinates(n: int, j0: int) -> np.ndarray:
    """``|y - y0| / max(y0, 1 - y0)`` on the grid rows."""
    size = 2**n
    j = np.arange(size + 1)
    return np.abs(j - j0) / max(j0, size - j0)


def modifier(g: SampledCurve, y0: float = 0.0, k_max: int | None = None,
             ladder: ApproximantLadder | None = None) -> SampledSurface:
    """Surface equal to ``g`` on row ``y0`` and at most ``g`` elsewhere.

    Rows are mapped to ``t = |y - y0| / max(y0, 1 - y0)`` so both sides of
    ``y0`` use the same strips. On strip ``k`` the row is
    ``q*p_{k-1} + (1-q)*p_k``; strips beyond ``k_max`` use ``p_{k_max}``.
    """
    n = g.n
    k_max = n if k_max is None else k_max
    if k_max > n:
        raise ValueError(f"k_max={k_max} exceeds grid exponent n={n}")
    j0 = grid_index(y0, n)
    ladder = ladder or monotone_approximants(g, k_max)
    p = [pk.values for pk in ladder.p]
    t = modifier_coordinates(n, j0)
    out = np.empty((2**n + 1, 2**n + 1))
    for j, tj in enumerate(t):
        if tj == 0.0:
            out[:, j] = g.values
            continue
        k, q = strip_of(float(tj))
        if k > k_max:
            out[:, j] = p[k_max]
        else:
            out[:, j] = blend(p[k - 1], p[k], q)
    return SampledSurface(n, out)


def modifier_postconditions(M: SampledSurface, g: SampledCurve, y0: float = 0.0) -> PostconditionReport:
    j0 = grid_index(y0, M.n)
    v = M.values
    slack = float((v[:, j0:j0 + 1] - v).min())
    checks = {
        "equals_g_on_y0": bool(np.array_equal(v[:, j0], g.values)),
        "below_row_y0": slack >= 0.0,
        "horizon_is_g": bool(np.array_equal(horizon(M).values, g.values)),
    }
    return PostconditionReport(checks, slack)


def modifier_constant(g: SampledCurve) -> float:
    return 1.5 + 2.0 * float(np.abs(g.values).max())


@dataclass(frozen=True)
class RangeBoundRow:
    m: int
    range_sum: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.range_sum <= self.bound


def modifier_range_bound(M: SampledSurface, g: SampledCurve, y0: float = 0.0,
                         m_max: int | None = None) -> list[RangeBoundRow]:
    """Per-scale check ``R(m) <= c*m*2**m + (2**m + 1)*2*|M|_inf``, ``c = 3/2 + 2|g|_inf``.

    The first term covers cells meeting strips ``1..m`` (``2**m * 2**(m-k)``
    cells of range at most ``c * 2**(k-m)``); the second covers the row of
    cells touching ``y0``. Only valid when the strips line up with the mesh,
    i.e. ``y0`` is 0 or 1.
    """
    if y0 not in (0.0, 1.0):
        raise ValueError("the strip-aligned range bound needs y0 in {0, 1}")
    c = modifier_constant(g)
    mnorm = float(np.abs(M.values).max())
    m_max = M.n if m_max is None else m_max
    ext = cell_extremes(M, 0, m_max)
    return [RangeBoundRow(m, _range_sum(*ext[m]), c * m * 2.0**m + (2.0**m + 1.0) * 2.0 * mnorm)
            for m in range(m_max + 1)]


@dataclass(frozen=True)
class ModifierDimReport:
    estimate: DimensionEstimate
    c: float
    slack: float
    bound_rows: tuple[RangeBoundRow, ...]

    @property
    def dim_ok(self) -> bool:
        return self.estimate.upper_est <= 2.0 + self.slack

    @property
    def bound_ok(self) -> bool:
        return all(r.holds for r in self.bound_rows)

    @property
    def holds(self) -> bool:
        return self.dim_ok and self.bound_ok


def modifier_dim_check(M: SampledSurface, g: SampledCurve, scales: tuple[int, int] | None = None,
                       window: int = 4, y0: float = 0.0) -> ModifierDimReport:
    """Estimate the dimension of ``M`` against ``2 + log2(c*n)/n``.

    The slack comes from the count ``N <= c * n * 4**n + O(4**n)``. The
    per-scale range bound is included when ``y0`` is 0 or 1.
    """
    c = modifier_constant(g)
    rows = tuple(modifier_range_bound(M, g, y0)) if y0 in (0.0, 1.0) else ()
    est = estimate(M, scales or default_scales(M.n), window)
    return ModifierDimReport(est, c, math.log2(c * M.n) / M.n, rows)


# -- composite scenario -----------------------------------------------------

@dataclass(frozen=True)
class TightScenarioReport:
    alpha: float
    identities: tuple[bool, bool]
    horizon_estimates: tuple[DimensionEstimate, DimensionEstimate]
    surface_estimates: tuple[DimensionEstimate, DimensionEstimate]
    forcer_report: PostconditionReport

    @property
    def holds(self) -> bool:
        return all(self.identities) and self.forcer_report.holds


def composite(f0: SampledSurface, parts: ForcerParts, M: SampledSurface) -> SampledSurface:
    """``(f0 + forcer) + M``, in that order, so the horizon identity is exact."""
    return add(add(f0, parts.forcer), M)


def theorem_tight_scenario(alpha: float, f1: SampledCurve | None = None, f2: SampledCurve | None = None,
                           K=None, n: int = 9, scales: tuple[int, int] | None = None,
                           window: int = 4) -> TightScenarioReport:
    """Forcer plus modifier composites for a rough and a smooth target horizon.

    With ``f0 = K[0]`` and ``F`` the forcer of ``K`` at row 0, the horizon of
    ``f0 + F + M_{f_i}`` is ``f0(., 0) + f_i`` exactly. Defaults: ``f1`` a
    Weierstrass curve of dimension 2, ``f2`` the Takagi curve, and ``K`` a
    single midpoint surface of dimension ``alpha``.
    """
    if not 2.0 <= alpha <= 3.0:
        raise ValueError(f"alpha={alpha} outside [2, 3]")
    f1 = f1 if f1 is not None else weierstrass_curve(2.0, 2, 0, n)
    f2 = f2 if f2 is not None else takagi_curve(n)
    K = list(K) if K is not None else [midpoint_surface(alpha, 11, n)]
    f0 = K[0]
    parts = forcer(K, 0.0)
    f0_star = slice_at(f0, 0).values
    scales = scales or default_scales(n)
    ids, hests, sests = [], [], []
    for fi in (f1, f2):
        if fi.n != f0.n:
            raise ValueError("target curves must share the family's grid")
        comp = composite(f0, parts, modifier(fi, 0.0))
        h = horizon(comp)
        ids.append(bool(np.array_equal(h.values, f0_star + fi.values)))
        hests.append(estimate(h, scales, window))
        sests.append(estimate(comp, scales, window))
    return TightScenarioReport(alpha, tuple(ids), tuple(hests), tuple(sests),
                               forcer_postconditions(K, parts))


__all__ = [
    "ApproximantLadder", "ForcerParts", "ModifierDimReport", "PostconditionReport", "RangeBoundRow",
    "TightScenarioReport", "blend", "composite", "forcer", "forcer_postconditions",
    "grid_index", "lower_lipschitz_envelope", "modifier", "modifier_constant", "modifier_dim_check",
    "modifier_postconditions", "modifier_range_bound", "monotone_approximants", "q_profile",
    "strip_of", "theorem_tight_scenario",
]
