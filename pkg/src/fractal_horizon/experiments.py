"""Seeded sweeps over mixing coefficients, and a batch horizon-gap census.

A sweep draws ``N`` distinct coefficients ``lambda`` uniformly from
``[-Lambda, Lambda]`` (redrawing anything within ``1e-6`` of zero) and
estimates dimensions of ``f + lambda*g`` for each. "Almost every lambda" is
read as "every sampled lambda except a reported list of exceptional
candidates": a continuous draw hits a null set with probability zero, so a
failing lambda is either estimator noise or a structured exception such as
an exact cancellation, and is listed rather than dropped.
"""
from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import rng
from .boxdim import DimensionEstimate, default_scales, estimate
from .constructions import composite, forcer, modifier
from .generators import midpoint_surface, probe_surface, takagi_curve
from .horizon import HorizonGapReport, depression_surface, horizon, horizon_gap
from .sampling import Sample, SampledSurface, lin_comb, sample_surface

DEAD_ZONE = 1e-6
DEFAULT_LAMBDA = 2.0
DEFAULT_COUNT = 16
PROBE_BASE = 10


def draw_lambdas(count: int, bound: float = DEFAULT_LAMBDA, seed: int = 0) -> np.ndarray:
    """``count`` distinct values from uniform ``[-bound, bound]`` outside the dead zone."""
    if count < 1 or bound <= DEAD_ZONE:
        raise ValueError("need count >= 1 and bound above the dead zone")
    stream = rng.SplitMix64(seed)
    out: list[float] = []
    seen = set()
    while len(out) < count:
        lam = bound * (2.0 * float(stream.uniform(1)[0]) - 1.0)
        if abs(lam) < DEAD_ZONE or lam in seen:
            continue
        seen.add(lam)
        out.append(lam)
    return np.array(out)


@dataclass(frozen=True)
class LambdaRecord:
    index: int
    lam: float
    estimate: DimensionEstimate
    horizon_estimate: DimensionEstimate | None
    conforming: bool


@dataclass(frozen=True)
class LambdaSweep:
    kind: str
    lambdas: tuple[float, ...]
    records: tuple[LambdaRecord, ...]
    reference: dict
    tolerance: float

    def __post_init__(self):
        if len(self.records) != len(self.lambdas):
            raise ValueError("sweep lost records")
        if len(set(self.lambdas)) != len(self.lambdas) or any(lam == 0.0 for lam in self.lambdas):
            raise ValueError("sweep coefficients must be distinct and nonzero")

    @property
    def count(self) -> int:
        return len(self.records)

    @property
    def conforming_fraction(self) -> float:
        return sum(r.conforming for r in self.records) / self.count

    @property
    def exceptional_candidates(self) -> list[LambdaRecord]:
        return [r for r in self.records if not r.conforming]

    def to_csv(self, header_lines=()) -> str:
        buf = io.StringIO()
        for line in header_lines:
            buf.write(f"# {line}\n")
        for key in sorted(self.reference):
            buf.write(f"# {key}={self.reference[key]!r}\n")
        w = csv.writer(buf, lineterminator="\n")
        cols = ["index", "lambda", "ols_slope", "lower_est", "upper_est", "degenerate"]
        horizons = any(r.horizon_estimate is not None for r in self.records)
        if horizons:
            cols += ["horizon_ols", "horizon_lower", "horizon_upper"]
        w.writerow(cols + ["conforming"])
        for r in self.records:
            e = r.estimate
            row = [r.index, repr(r.lam), repr(e.ols_slope), repr(e.lower_est), repr(e.upper_est), int(e.degenerate)]
            if horizons:
                h = r.horizon_estimate
                row += [repr(h.ols_slope), repr(h.lower_est), repr(h.upper_est)]
            w.writerow(row + [int(r.conforming)])
        buf.write(f"# conforming={sum(r.conforming for r in self.records)}/{self.count}\n")
        return buf.getvalue()


def _map_ordered(fn, items, workers: int | None):
    if not workers or workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))  # map keeps input order


def _resolve_lambdas(lambdas, bound, count, seed) -> np.ndarray:
    if lambdas is None:
        return draw_lambdas(count, bound, seed)
    lam = np.asarray(lambdas, dtype=np.float64)
    if lam.ndim != 1 or lam.size == 0:
        raise ValueError("lambdas must be a non-empty sequence")
    return lam


def sum_experiment(f: Sample, g: Sample, bound: float = DEFAULT_LAMBDA, count: int = DEFAULT_COUNT,
                   seed: int = 0, scales: tuple[int, int] | None = None, window: int = 4,
                   tolerance: float = 0.1, lambdas: Sequence[float] | None = None,
                   workers: int | None = None) -> LambdaSweep:
    """Dimensions of ``f + lambda*g`` over a seeded sweep.

    A coefficient conforms when its upper estimate is within ``tolerance`` of
    ``max(upper f, upper g)`` and its lower estimate is at least
    ``max(lower f, lower g) - tolerance``. ``lambdas`` overrides the draw.
    """
    if type(f) is not type(g) or f.n != g.n:
        raise ValueError("f and g must be samples of the same kind and grid exponent")
    scales = scales or default_scales(f.n)
    ef, eg = estimate(f, scales, window), estimate(g, scales, window)
    top_upper = max(ef.upper_est, eg.upper_est)
    top_lower = max(ef.lower_est, eg.lower_est)
    lam = _resolve_lambdas(lambdas, bound, count, seed)

    def run(item):
        i, x = item
        e = estimate(lin_comb(1.0, f, float(x), g), scales, window)
        ok = abs(e.upper_est - top_upper) <= tolerance and e.lower_est >= top_lower - tolerance
        return LambdaRecord(i, float(x), e, None, ok)

    records = _map_ordered(run, list(enumerate(lam)), workers)
    ref = {"f_upper": ef.upper_est, "f_lower": ef.lower_est, "g_upper": eg.upper_est,
           "g_lower": eg.lower_est, "target_upper": top_upper, "target_lower": top_lower}
    return LambdaSweep("sum", tuple(float(x) for x in lam), tuple(records), ref, tolerance)


def probe_experiment(f: SampledSurface, alpha: float, bound: float = DEFAULT_LAMBDA,
                     count: int = DEFAULT_COUNT, seed: int = 0, scales: tuple[int, int] | None = None,
                     window: int = 4, tolerance: float = 0.2, upper_tolerance: float = 0.1,
                     probe_family: str = "weierstrass", probe_seed: int = 0, base: int = PROBE_BASE,
                     lambdas: Sequence[float] | None = None, workers: int | None = None) -> LambdaSweep:
    """Dimensions of ``f + lambda*Psi`` and of its horizon, ``Psi`` the extruded probe.

    A coefficient conforms when the surface fit is within ``tolerance`` of
    ``alpha``, the horizon lower estimate is at least ``alpha - 1 - tolerance``
    and the horizon upper estimate is at most ``2 + upper_tolerance``. The
    Weierstrass probe uses frequency base 10 by default, the base with the
    smallest finite-grid bias in calibration.
    """
    if not isinstance(f, SampledSurface):
        raise TypeError("probe experiment needs a surface")
    if not 2.0 <= alpha <= 3.0:
        raise ValueError(f"alpha={alpha} outside [2, 3]")
    scales = scales or default_scales(f.n)
    probe = probe_surface(alpha, f.n, probe_family, probe_seed, base)
    lam = _resolve_lambdas(lambdas, bound, count, seed)

    def run(item):
        i, x = item
        s = lin_comb(1.0, f, float(x), probe.surface)
        e = estimate(s, scales, window)
        h = estimate(horizon(s), scales, window)
        ok = (abs(e.ols_slope - alpha) <= tolerance
              and h.lower_est >= alpha - 1.0 - tolerance
              and h.upper_est <= 2.0 + upper_tolerance)
        return LambdaRecord(i, float(x), e, h, ok)

    records = _map_ordered(run, list(enumerate(lam)), workers)
    ref = {"alpha": alpha, "probe": probe.spec.to_text().replace("\n", ";")}
    return LambdaSweep("probe", tuple(float(x) for x in lam), tuple(records), ref, tolerance)


# -- census -----------------------------------------------------------------

@dataclass(frozen=True)
class CensusEntry:
    name: str
    build: Callable[[int], SampledSurface]


def default_zoo(seed: int = 0) -> list[CensusEntry]:
    """Probes over the alpha grid, midpoint surfaces, a modifier composite,
    the hidden-roughness depression and a plane."""
    zoo = [CensusEntry(f"probe_alpha={a}", lambda n, a=a: probe_surface(a, n, seed=seed, b=PROBE_BASE).surface)
           for a in (2.2, 2.5, 2.8)]
    zoo += [CensusEntry(f"midpoint_s={s}", lambda n, s=s: midpoint_surface(s, seed, n)) for s in (2.3, 2.6)]

    def modifier_composite(n):
        f0 = midpoint_surface(2.3, seed, n)
        return composite(f0, forcer([f0], 0.0), modifier(takagi_curve(n), 0.0))

    zoo.append(CensusEntry("modifier_composite_takagi", modifier_composite))
    zoo.append(CensusEntry("depression", lambda n: depression_surface(n, seed)))
    zoo.append(CensusEntry("plane_x+y", lambda n: sample_surface("x+y", n)))
    return zoo


CENSUS_COLUMNS = ["name", "surface_ols", "surface_lower", "surface_upper", "horizon_ols",
                  "horizon_lower", "horizon_upper", "gap", "gap_lower_upper", "gap_upper_lower", "verdict"]


def horizon_property_census(specs: Sequence[CensusEntry | tuple], n: int = 10,
                            scales: tuple[int, int] | None = None, window: int = 4,
                            tolerance: float = 0.15, header_lines=()) -> tuple[str, list[HorizonGapReport]]:
    """Run :func:`horizon_gap` over each entry and tabulate as CSV.

    Entries are :class:`CensusEntry` objects or ``(name, surface)`` pairs.
    """
    scales = scales or default_scales(n)
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CENSUS_COLUMNS)
    reports = []
    for entry in specs:
        if isinstance(entry, CensusEntry):
            name, surface = entry.name, entry.build(n)
        else:
            name, surface = entry
        rep = horizon_gap(surface, scales, window, tolerance)
        reports.append(rep)
        row = rep.as_row()
        w.writerow([name] + [repr(row[c]) if isinstance(row[c], float) else row[c] for c in CENSUS_COLUMNS[1:]])
    return buf.getvalue(), reports
