"""Seeded curves and surfaces with a prescribed box dimension.

Families
--------
weierstrass
    ``W(x) = sum_{k=0..K} b**((s-2)k) cos(2 pi b**k x + theta_k)`` with phases
    ``theta_k = 2 pi U_k`` from the SplitMix64 stream of the seed, truncated
    at the first ``K`` with ``b**K >= 2**n``. The argument ``b**k x`` is
    reduced modulo 1 in integer arithmetic, so grid values are exact up to
    the cosine itself.
midpoint
    Random midpoint displacement. Level ``l`` (``l = 0`` sets the corners)
    adds uniform ``[-1, 1)`` offsets scaled by ``2**(-(d+1-s) l)``.
takagi
    ``T(x) = sum_{k=0..n} 2**-k dist(2**k x, Z)``; box dimension 1.
monotone-envelope
    Nondecreasing fixtures of dimension 1.
closed-form
    Named elementary functions (see :data:`CLOSED_FORMS`).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng
from .sampling import SampledCurve, SampledSurface, extrude

FAMILIES = ("weierstrass", "midpoint", "takagi", "monotone-envelope", "closed-form")


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    target_dim: float
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        lo, hi = (2.0, 3.0) if self.is_surface else (1.0, 2.0)
        if not lo <= self.target_dim <= hi:
            raise ValueError(f"target_dim {self.target_dim} outside [{lo}, {hi}]")

    @property
    def is_surface(self) -> bool:
        if self.family == "closed-form":
            return self.params.get("expr") in SURFACE_FORMS
        if self.family == "midpoint":
            return int(self.params.get("d", 2 if self.target_dim > 2 else 1)) == 2
        return False

    def to_text(self) -> str:
        """``key=value`` lines: family, target_dim, seed, then params sorted by key."""
        lines = [f"family={self.family}", f"target_dim={self.target_dim!r}", f"seed={self.seed}"]
        lines += [f"{k}={self.params[k]}" for k in sorted(self.params)]
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str) -> "GeneratorSpec":
        kv = {}
        for line in text.splitlines():
            line = line.strip().lstrip("#").strip()
            if not line or "=" not in line:
                continue
            k, v = line.split("=", 1)
            kv[k.strip()] = v.strip()
        family = kv.pop("family")
        target = float(kv.pop("target_dim"))
        seed = int(kv.pop("seed", "0"))
        return cls(family, target, seed, {k: _parse_scalar(v) for k, v in kv.items()})


def _parse_scalar(v: str):
    for conv in (int, float):
        try:
            return conv(v)
        except ValueError:
            pass
    return v


# -- curves -----------------------------------------------------------------

def weierstrass_terms(n: int, b: int) -> int:
    """Index ``K`` of the last term: the first ``K`` with ``b**K >= 2**n``."""
    k = 0
    while b**k < 2**n:
        k += 1
    return k


def weierstrass_curve(s: float, b: int = 2, seed: int = 0, n: int = 12,
                      terms: int | None = None) -> SampledCurve:
    """Weierstrass-type curve with graph dimension ``s``.

    ``terms`` overrides the number of series terms (``terms=1`` gives the
    single smooth cosine ``cos(2 pi x + theta_0)``).
    """
    if not (1.0 < s <= 2.0 or (s == 1.0 and terms == 1)):
        raise ValueError(f"weierstrass dimension s={s} outside (1, 2]")
    if b < 2:
        raise ValueError("frequency base b must be >= 2")
    count = weierstrass_terms(n, b) + 1 if terms is None else terms
    if count < 1:
        raise ValueError("need at least one term")
    return SampledCurve(n, _weierstrass_values(s, b, seed, n, count))


def _weierstrass_values(s, b, seed, n, count):
    size = 2**n
    i = np.arange(size + 1, dtype=np.int64)
    theta = 2.0 * np.pi * rng.uniform(seed, count)
    out = np.zeros(size + 1)
    for k in range(count):
        freq = pow(b, k, size)  # b**k mod 2**n
        frac = ((freq * i) % size) / size
        out += float(b) ** ((s - 2.0) * k) * np.cos(2.0 * np.pi * frac + theta[k])
    return out


def takagi_curve(n: int) -> SampledCurve:
    size = 2**n
    i = np.arange(size + 1, dtype=np.int64)
    out = np.zeros(size + 1)
    for k in range(n + 1):
        r = (pow(2, k, size) * i) % size
        out += np.minimum(r, size - r) / size * 2.0**-k
    return SampledCurve(n, out)


def midpoint_curve(s: float, seed: int = 0, n: int = 12) -> SampledCurve:
    if not 1.0 <= s <= 2.0:
        raise ValueError(f"midpoint curve dimension s={s} outside [1, 2]")
    h_exp = 2.0 - s
    size = 2**n
    v = np.zeros(size + 1)
    stream = rng.SplitMix64(seed)
    v[[0, size]] = 2.0 * stream.uniform(2) - 1.0
    for level in range(1, n + 1):
        step = 2 ** (n - level)
        new = slice(step, size, 2 * step)
        u = 2.0 * stream.uniform(2 ** (level - 1)) - 1.0
        v[new] = 0.5 * (v[0:size - step:2 * step] + v[2 * step::2 * step]) + 2.0 ** (-h_exp * level) * u
    return SampledCurve(n, v)


def midpoint_surface(s: float, seed: int = 0, n: int = 9) -> SampledSurface:
    """Midpoint displacement on the square grid.

    At each level the cell centres get the mean of their four corners and the
    edge midpoints the mean of their two endpoints, then every new point is
    displaced. Level ``l`` consumes ``(2**l + 1)**2`` stream values laid out
    row-major over that level's grid; only the new points use theirs.
    """
    if not 2.0 <= s <= 3.0:
        raise ValueError(f"midpoint surface dimension s={s} outside [2, 3]")
    h_exp = 3.0 - s
    size = 2**n
    v = np.zeros((size + 1, size + 1))
    stream = rng.SplitMix64(seed)
    v[::size, ::size] = (2.0 * stream.uniform(4) - 1.0).reshape(2, 2)
    for level in range(1, n + 1):
        step = 2 ** (n - level)
        g = v[::step, ::step]  # view: this level's grid
        c = g[::2, ::2]
        side = 2**level + 1
        amp = 2.0 ** (-h_exp * level)
        u = amp * (2.0 * stream.uniform(side * side) - 1.0).reshape(side, side)
        g[1::2, 1::2] = 0.25 * (c[:-1, :-1] + c[1:, :-1] + c[:-1, 1:] + c[1:, 1:]) + u[1::2, 1::2]
        g[1::2, ::2] = 0.5 * (c[:-1, :] + c[1:, :]) + u[1::2, ::2]
        g[::2, 1::2] = 0.5 * (c[:, :-1] + c[:, 1:]) + u[::2, 1::2]
    return SampledSurface(n, v)


def monotone_curve(n: int, seed: int = 0, kind: str = "staircase") -> SampledCurve:
    """Nondecreasing fixture on [0, 1].

    ``staircase``: jumps of random height at roughly one grid point in eight;
    ``sorted``: sorted uniform draws; ``constant``: all zeros.
    """
    size = 2**n
    stream = rng.SplitMix64(seed)
    if kind == "constant":
        return SampledCurve(n, np.zeros(size + 1))
    if kind == "sorted":
        return SampledCurve(n, np.sort(stream.uniform(size + 1)))
    if kind != "staircase":
        raise ValueError(f"unknown monotone kind {kind!r}")
    u = stream.uniform(2 * size)
    jumps = np.where(u[:size] < 0.125, u[size:], 0.0)
    v = np.concatenate([[0.0], np.cumsum(jumps)])
    top = v[-1]
    return SampledCurve(n, v / top if top > 0 else v)


# -- probes -----------------------------------------------------------------

@dataclass(frozen=True)
class Probe:
    alpha: float
    surface: SampledSurface
    curve: SampledCurve
    spec: GeneratorSpec


def probe_curve_spec(alpha: float, family: str = "weierstrass", seed: int = 0, b: int = 2) -> GeneratorSpec:
    if not 2.0 <= alpha <= 3.0:
        raise ValueError(f"probe alpha={alpha} outside [2, 3]")
    s = alpha - 1.0
    if s == 1.0 and family == "weierstrass":
        return GeneratorSpec("weierstrass", 1.0, seed, {"b": b, "terms": 1})
    if family == "weierstrass":
        return GeneratorSpec("weierstrass", s, seed, {"b": b})
    if family == "midpoint":
        return GeneratorSpec("midpoint", s, seed, {"d": 1})
    raise ValueError(f"unsupported probe family {family!r}")


def probe_surface(alpha: float, n: int, family: str = "weierstrass", seed: int = 0, b: int = 2) -> Probe:
    """The extruded surface ``(x, y) -> psi(x)`` with ``psi`` of dimension ``alpha - 1``.

    For ``alpha = 2`` the Weierstrass family falls back to its single smooth
    cosine term.
    """
    spec = probe_curve_spec(alpha, family, seed, b)
    curve = generate(spec, n)
    return Probe(alpha, extrude(curve), curve, spec)


# -- closed forms and dispatch ----------------------------------------------

CURVE_FORMS = {
    "identity": lambda x, c: x,
    "zero": lambda x, c: np.zeros_like(x),
    "constant": lambda x, c: np.full_like(x, c),
    "centered": lambda x, c: x - 0.5,
    "cos": lambda x, c: np.cos(2.0 * np.pi * x),
}
SURFACE_FORMS = {
    "x+y": lambda x, y, c: x + y,
    "x*y": lambda x, y, c: x * y,
    "x": lambda x, y, c: x,
    "y": lambda x, y, c: y,
    "zero2": lambda x, y, c: np.zeros_like(x),
    "constant2": lambda x, y, c: np.full_like(x, c),
}
CLOSED_FORMS = {**CURVE_FORMS, **SURFACE_FORMS}


def closed_form(expr: str, c: float = 0.0, surface: bool = False) -> GeneratorSpec:
    if expr not in CLOSED_FORMS:
        raise ValueError(f"unknown closed form {expr!r}; known: {sorted(CLOSED_FORMS)}")
    if surface and expr in CURVE_FORMS and expr + "2" in SURFACE_FORMS:
        expr = expr + "2"
    dim = 2.0 if expr in SURFACE_FORMS else 1.0
    params = {"expr": expr}
    if c:
        params["c"] = c
    return GeneratorSpec("closed-form", dim, 0, params)


def generate(spec: GeneratorSpec, n: int):
    """Materialise ``spec`` on the grid of exponent ``n``."""
    p = spec.params
    if spec.family == "weierstrass":
        return weierstrass_curve(spec.target_dim, int(p.get("b", 2)), spec.seed, n,
                                 int(p["terms"]) if "terms" in p else None)
    if spec.family == "midpoint":
        if spec.is_surface:
            return midpoint_surface(spec.target_dim, spec.seed, n)
        return midpoint_curve(spec.target_dim, spec.seed, n)
    if spec.family == "takagi":
        return takagi_curve(n)
    if spec.family == "monotone-envelope":
        return monotone_curve(n, spec.seed, str(p.get("kind", "staircase")))
    expr = p["expr"]
    c = float(p.get("c", 0.0))
    t = np.arange(2**n + 1) / 2**n
    if expr in SURFACE_FORMS:
        x, y = np.meshgrid(t, t, indexing="ij")
        return SampledSurface(n, np.broadcast_to(SURFACE_FORMS[expr](x, y, c), x.shape))
    return SampledCurve(n, np.broadcast_to(CURVE_FORMS[expr](t, c), t.shape))
