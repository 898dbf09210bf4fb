"""Command-line interface.

Sample files are the binary ``FRH1`` format (see :mod:`fractal_horizon.sampling`)
unless the path ends in ``.csv``. Every command writes text reports to stdout
or to ``--out`` with ``repr`` floats, so identical invocations produce
byte-identical output.

A ``--config`` file holds ``key=value`` lines whose keys are the long flag
names (``scales=2..9``, ``window=4``); flags given on the command line win.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .boxdim import default_scales, estimate_dims, scale_table
from .constructions import (forcer, forcer_postconditions, modifier, modifier_dim_check,
                            modifier_postconditions)
from .experiments import default_zoo, horizon_property_census, probe_experiment, sum_experiment
from .generators import FAMILIES, GeneratorSpec, generate
from .horizon import horizon, horizon_gap
from .sampling import (Sample, SampledCurve, SampledSurface, from_bytes, from_csv, to_bytes,
                       to_csv)
from .spaces import d_alpha_metric, v_alpha_norm


# -- io helpers -------------------------------------------------------------

def read_sample(path: str) -> Sample:
    p = Path(path)
    if p.suffix == ".csv":
        return from_csv(p.read_text())
    return from_bytes(p.read_bytes())


def write_sample(sample: Sample, path: str, header=()) -> None:
    p = Path(path)
    if p.suffix == ".csv":
        p.write_text(to_csv(sample, header))
    else:
        p.write_bytes(to_bytes(sample))


def pgm_bytes(surface: SampledSurface) -> bytes:
    """8-bit binary PGM, x to the right and y upward, min-max normalised."""
    v = surface.values.T[::-1]
    lo, hi = float(v.min()), float(v.max())
    scaled = np.zeros(v.shape) if hi == lo else (v - lo) / (hi - lo)
    pix = np.rint(scaled * 255.0).astype(np.uint8)
    h, w = pix.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + pix.tobytes()


def parse_scales(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"scales must look like m_min..m_max, got {text!r}") from None


def read_config(path: str) -> dict[str, str]:
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line without '=': {raw!r}")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _scales_for(args, sample: Sample) -> tuple[int, int]:
    return args.scales or default_scales(sample.n)


def _maybe_pgm(args, sample: Sample) -> None:
    if args.pgm:
        if not isinstance(sample, SampledSurface):
            raise SystemExit("--pgm needs a surface")
        Path(args.pgm).write_bytes(pgm_bytes(sample))


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def _kv_line(d: dict) -> str:
    return " ".join(f"{k}={_fmt(v)}" for k, v in d.items()) + "\n"


# -- commands ---------------------------------------------------------------

def cmd_gen(args) -> int:
    params = {}
    for item in args.param or []:
        k, v = item.split("=", 1)
        params[k] = v
    text = "\n".join([f"family={args.family}", f"target_dim={args.dim}", f"seed={args.seed}"]
                     + [f"{k}={params[k]}" for k in sorted(params)])
    spec = GeneratorSpec.from_text(text)
    sample = generate(spec, args.n)
    if not args.out:
        raise SystemExit("gen needs --out")
    write_sample(sample, args.out, [f"n={args.n}"] + spec.to_text().splitlines())
    _maybe_pgm(args, sample)
    return 0


def cmd_boxdim(args) -> int:
    sample = read_sample(args.input)
    m_min, m_max = _scales_for(args, sample)
    table = scale_table(sample, m_min, m_max, source=Path(args.input).name)
    est = estimate_dims(table, args.window)
    header = [_kv_line(est.as_row()).strip()]
    _emit(table.to_csv(header), args.out)
    if args.out:
        sys.stdout.write(_kv_line(est.as_row()))
    _maybe_pgm(args, sample)
    return 0


def cmd_horizon(args) -> int:
    f = read_sample(args.input)
    if not isinstance(f, SampledSurface):
        raise SystemExit("horizon needs a surface file")
    h = horizon(f)
    if args.out:
        write_sample(h, args.out)
    rep = horizon_gap(f, _scales_for(args, f), args.window)
    row = rep.as_row()
    sys.stdout.write(_kv_line({k: row[k] for k in ("surface_ols", "horizon_ols", "gap")})
                     .rstrip("\n") + f" verdict={row['verdict'].replace(' ', '_')}\n")
    _maybe_pgm(args, f)
    return 0


def cmd_norm(args) -> int:
    f = read_sample(args.input)
    rep = v_alpha_norm(f, args.alpha, args.m_max)
    if args.out:
        Path(args.out).write_text(rep.to_csv())
    sys.stdout.write(_kv_line({"sup_norm": rep.sup_norm, "v_alpha_sup": rep.v_alpha_sup,
                               "achieved_m": rep.achieved_m}))
    return 0


def cmd_metric(args) -> int:
    f, g = read_sample(args.first), read_sample(args.second)
    rep = d_alpha_metric(f, g, args.alpha, args.terms, args.m_max)
    _emit(_kv_line({"metric": rep.value, "tail_bound": rep.tail_bound}), args.out)
    return 0


def cmd_forcer(args) -> int:
    K = [read_sample(p) for p in args.inputs]
    parts = forcer(K, args.y0)
    rep = forcer_postconditions(K, parts)
    if args.out:
        write_sample(parts.forcer, args.out)
    sys.stdout.write("\n".join(rep.lines()) + "\n")
    _maybe_pgm(args, parts.forcer)
    return 0 if rep.holds else 1


def cmd_modifier(args) -> int:
    g = read_sample(args.input)
    if not isinstance(g, SampledCurve):
        raise SystemExit("modifier needs a curve file")
    M = modifier(g, args.y0, args.k_max)
    rep = modifier_postconditions(M, g, args.y0)
    lines = rep.lines()
    if args.y0 in (0.0, 1.0):
        dim = modifier_dim_check(M, g, _scales_for(args, M), args.window, args.y0)
        lines.append(f"range_bound: {'pass' if dim.bound_ok else 'FAIL'}")
        lines.append(f"upper_est: {dim.estimate.upper_est!r} limit: {2.0 + dim.slack!r} "
                     f"{'pass' if dim.dim_ok else 'FAIL'}")
    if args.out:
        write_sample(M, args.out)
    sys.stdout.write("\n".join(lines) + "\n")
    _maybe_pgm(args, M)
    return 0 if rep.holds else 1


def cmd_sum_sweep(args) -> int:
    f, g = read_sample(args.first), read_sample(args.second)
    sw = sum_experiment(f, g, args.bound, args.count, args.seed, _scales_for(args, f), args.window,
                        args.tolerance)
    _emit(sw.to_csv([f"sum-sweep f={Path(args.first).name} g={Path(args.second).name}"]), args.out)
    return 0


def cmd_probe_sweep(args) -> int:
    f = read_sample(args.input)
    if not isinstance(f, SampledSurface):
        raise SystemExit("probe-sweep needs a surface file")
    sw = probe_experiment(f, args.alpha, args.bound, args.count, args.seed, _scales_for(args, f),
                          args.window, args.tolerance)
    _emit(sw.to_csv([f"probe-sweep f={Path(args.input).name}"]), args.out)
    return 0


def cmd_census(args) -> int:
    scales = args.scales or default_scales(args.n)
    text, _ = horizon_property_census(default_zoo(args.seed), args.n, scales, args.window,
                                      header_lines=[f"n={args.n} seed={args.seed}"])
    _emit(text, args.out)
    return 0


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=9, help="grid exponent (2**n + 1 points per axis)")
    common.add_argument("--scales", type=parse_scales, default=None, help="m_min..m_max")
    common.add_argument("--window", type=int, default=4)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None)
    common.add_argument("--config", default=None, help="key=value file; flags override it")
    common.add_argument("--pgm", default=None, help="also write the surface as 8-bit PGM")

    parser = argparse.ArgumentParser(prog="fractal-horizon", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    p = add("gen", cmd_gen, "generate a sample file from a generator spec")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--dim", type=float, required=True, help="target dimension")
    p.add_argument("--param", action="append", help="family parameter key=value (repeatable)")

    p = add("boxdim", cmd_boxdim, "scale table CSV and dimension estimates")
    p.add_argument("input")

    p = add("horizon", cmd_horizon, "horizon curve and gap report")
    p.add_argument("input")

    p = add("norm", cmd_norm, "scale-weighted norm")
    p.add_argument("input")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--m-max", type=int, default=None)

    p = add("metric", cmd_metric, "truncated metric between two samples")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--terms", type=int, default=10)
    p.add_argument("--m-max", type=int, default=None)

    p = add("forcer", cmd_forcer, "forcer surface for a family of surfaces")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--y0", type=float, default=0.0)

    p = add("modifier", cmd_modifier, "modifier surface for a curve")
    p.add_argument("input")
    p.add_argument("--y0", type=float, default=0.0)
    p.add_argument("--k-max", type=int, default=None)

    for name, fn in (("sum-sweep", cmd_sum_sweep), ("probe-sweep", cmd_probe_sweep)):
        p = add(name, fn, "seeded coefficient sweep")
        if name == "sum-sweep":
            p.add_argument("first")
            p.add_argument("second")
            p.add_argument("--tolerance", type=float, default=0.1)
        else:
            p.add_argument("input")
            p.add_argument("--alpha", type=float, required=True)
            p.add_argument("--tolerance", type=float, default=0.2)
        p.add_argument("--bound", type=float, default=2.0, help="coefficients drawn from [-bound, bound]")
        p.add_argument("--count", type=int, default=16)

    p = add("census", cmd_census, "horizon-gap census over the built-in fixture zoo")
    p.set_defaults(n=10)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    cfg = read_config(known.config)
    # each subcommand takes the keys it understands; argparse converts string defaults
    for action in parser._subparsers._group_actions:
        for sp in action.choices.values():
            dests = {a.dest for a in sp._actions}
            sp.set_defaults(**{k: v for k, v in cfg.items() if k in dests})


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    _apply_config(parser, argv)
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
