"""Horizon curves of surfaces and the dimension-gap diagnostic.

The horizon of ``f`` is ``x -> max_y f(x, y)``, evaluated as the column
maximum over the sampled ``y`` values. Along a grid column the multilinear
interpolant is piecewise linear in ``y``, so its sup is attained at a sample
and the discrete maximum is exact.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boxdim import DimensionEstimate, default_scales, estimate
from .generators import midpoint_surface
from .sampling import SampledCurve, SampledSurface, add, constant_like, extrude


def horizon(f: SampledSurface) -> SampledCurve:
    if not isinstance(f, SampledSurface):
        raise TypeError("horizon needs a surface")
    return SampledCurve(f.n, f.values.max(axis=1))


@dataclass(frozen=True)
class HorizonGapReport:
    surface_estimate: DimensionEstimate
    horizon_estimate: DimensionEstimate
    tolerance: float

    @property
    def gap(self) -> float:
        """Surface minus horizon dimension, both by the full-range fit."""
        return self.surface_estimate.ols_slope - self.horizon_estimate.ols_slope

    @property
    def gap_lower_upper(self) -> float:
        return self.surface_estimate.lower_est - self.horizon_estimate.upper_est

    @property
    def gap_upper_lower(self) -> float:
        return self.surface_estimate.upper_est - self.horizon_estimate.lower_est

    @property
    def alpha(self) -> float:
        return self.surface_estimate.ols_slope

    @property
    def lower_side_ok(self) -> bool:
        """Horizon lower estimate at least ``alpha - 1`` (within tolerance)."""
        return self.horizon_estimate.lower_est >= self.alpha - 1.0 - self.tolerance

    @property
    def upper_side_ok(self) -> bool:
        return self.horizon_estimate.upper_est <= 2.0 + self.tolerance

    @property
    def horizon_property(self) -> bool:
        return abs(self.gap - 1.0) <= self.tolerance

    @property
    def verdict(self) -> str:
        if self.horizon_property and self.lower_side_ok and self.upper_side_ok:
            return "horizon property holds"
        if not self.lower_side_ok:
            return "horizon property fails: horizon below alpha-1"
        if not self.upper_side_ok:
            return "horizon property fails: horizon above 2"
        return "horizon property fails: gap differs from 1"

    def as_row(self) -> dict:
        s, h = self.surface_estimate, self.horizon_estimate
        return {
            "surface_ols": s.ols_slope, "surface_lower": s.lower_est, "surface_upper": s.upper_est,
            "horizon_ols": h.ols_slope, "horizon_lower": h.lower_est, "horizon_upper": h.upper_est,
            "gap": self.gap, "gap_lower_upper": self.gap_lower_upper,
            "gap_upper_lower": self.gap_upper_lower, "verdict": self.verdict,
        }


def horizon_gap(f: SampledSurface, scales: tuple[int, int] | None = None, window: int = 4,
                tolerance: float = 0.15) -> HorizonGapReport:
    scales = scales or default_scales(f.n)
    return HorizonGapReport(estimate(f, scales, window), estimate(horizon(f), scales, window), tolerance)


@dataclass(frozen=True)
class AlgebraReport:
    translation_exact: bool
    constant_exact: bool
    extrude_exact: bool

    @property
    def holds(self) -> bool:
        return self.translation_exact and self.constant_exact and self.extrude_exact


def horizon_algebra_check(f: SampledSurface, g_curve: SampledCurve, c: float = 0.0) -> AlgebraReport:
    """Bit-exact checks of ``H(f + g) = H(f) + g`` for y-independent ``g``.

    Adding the same number to every entry of a column preserves the order of
    the rounded sums, so the maximiser does not move and the identities hold
    in floating point, not just approximately.
    """
    h = horizon(f).values
    trans = horizon(add(f, extrude(g_curve))).values
    const = horizon(add(f, constant_like(f, c))).values
    return AlgebraReport(
        translation_exact=bool(np.array_equal(trans, h + g_curve.values)),
        constant_exact=bool(np.array_equal(const, h + c)),
        extrude_exact=bool(np.array_equal(horizon(extrude(g_curve)).values, g_curve.values)),
    )


def _window(t: np.ndarray, center: float, half_width: float) -> np.ndarray:
    u = (t - center) / half_width
    return np.where(np.abs(u) < 1.0, np.cos(0.5 * np.pi * u) ** 2, 0.0)


def depression_surface(n: int = 10, seed: int = 0, roughness: float = 2.8,
                       amplitude: float = 0.2) -> SampledSurface:
    """A valley ``(y - 1/2)**2 + g(x)`` with a rough patch at its floor.

    The patch is midpoint noise scaled into ``[-amplitude, amplitude]`` and
    tapered by a smooth bump supported in ``|x - 1/2| < 1/2``,
    ``|y - 1/2| < 0.35``. Since ``amplitude < 1/4`` the patch never reaches the
    valley rims at ``y = 0, 1``, so the horizon is the smooth curve
    ``1/4 + g(x)`` while the surface inherits the roughness of the patch.
    """
    if not 0.0 <= amplitude < 0.25:
        raise ValueError("amplitude must stay below the rim height 1/4")
    t = np.arange(2**n + 1) / 2**n
    noise = midpoint_surface(roughness, seed, n).values
    lo, hi = noise.min(), noise.max()
    noise = 2.0 * (noise - lo) / (hi - lo) - 1.0 if hi > lo else np.zeros_like(noise)
    bump = np.outer(_window(t, 0.5, 0.5), _window(t, 0.5, 0.35))
    valley = (t - 0.5) ** 2
    g = 0.1 * np.cos(2.0 * np.pi * t)
    return SampledSurface(n, g[:, None] + valley[None, :] + amplitude * bump * noise)
