"""Command-line surface: bounds, optimization, code design, quantization,
simulation.  All numeric CSV output uses 12 significant digits so emitted
files are bit-stable for plotting; exit codes are 0 on success, 2 on usage
errors (argparse), 1 on runtime errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from binceo.bounds import (
    GeneralChannel,
    NoisePair,
    TestChannelPair,
    general_channel_search,
    grid_optimum,
    high_res_d2,
    mu_max,
    rd_bound,
    region_scan,
)
from binceo.codegraph import CodeMargins, Corner, Intermediate, build_ldgm, plan_code
from binceo.pipeline import ExperimentConfig, SingleLink, model_sanity, run_experiment
from binceo.quantizer import BipConfig, bip_quantize

__all__ = ["main"]


def _fmt(x) -> str:
    return f"{float(x):.12g}"


def _write_text(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _noise(args) -> NoisePair:
    return NoisePair(args.p1, args.p2)


def _add_noise_flags(p):
    p.add_argument("--p1", type=float, required=True, help="link-1 observation noise")
    p.add_argument("--p2", type=float, required=True, help="link-2 observation noise")


def _add_d_flags(p):
    p.add_argument("--d1", type=float, required=True, help="link-1 test-channel crossover")
    p.add_argument("--d2", type=float, required=True, help="link-2 test-channel crossover")


# ---------------------------------------------------------------------------
# command handlers


def cmd_bound(args) -> int:
    t = rd_bound(_noise(args), TestChannelPair(args.d1, args.d2))
    print(f"R1={_fmt(t.r1_min)} R2={_fmt(t.r2_min)} "
          f"Rsum={_fmt(t.rsum_min)} D={_fmt(t.d_min)}")
    return 0


def cmd_optimize(args) -> int:
    pt = grid_optimum(_noise(args), args.mu, args.coarse_step, args.refine_step)
    t = rd_bound(_noise(args), pt.d_star)
    print(f"mu={_fmt(pt.mu)} d1={_fmt(pt.d_star.d1)} d2={_fmt(pt.d_star.d2)} "
          f"F={_fmt(pt.f_value)} region={pt.region.name}")
    print(f"R1={_fmt(t.r1_min)} R2={_fmt(t.r2_min)} "
          f"Rsum={_fmt(t.rsum_min)} D={_fmt(t.d_min)}")
    return 0


def cmd_regions(args) -> int:
    noise = _noise(args)
    hi = args.mu_hi if args.mu_hi is not None else mu_max(noise)
    grid = np.linspace(args.mu_lo, hi, args.steps)
    scan = region_scan(noise, grid.tolist())
    lines = ["mu,d1,d2,F,region"]
    for mu, pt in scan.points:
        lines.append(f"{_fmt(mu)},{_fmt(pt.d_star.d1)},{_fmt(pt.d_star.d2)},"
                     f"{_fmt(pt.f_value)},{pt.region.name}")
    _write_text(args.out, "\n".join(lines) + "\n")
    print("thresholds: " + (" ".join(_fmt(t) for t in scan.thresholds) or "none"))
    return 0


def cmd_mu_max(args) -> int:
    print(_fmt(mu_max(_noise(args))))
    return 0


def cmd_highres(args) -> int:
    noise = _noise(args)
    d1s = np.geomspace(args.d1_lo, args.d1_hi, args.steps)
    lines = ["d1,d2"]
    for d1 in d1s:
        lines.append(f"{_fmt(d1)},{_fmt(high_res_d2(noise, float(d1)))}")
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_curve(args) -> int:
    noise = _noise(args)
    hi = args.mu_hi if args.mu_hi is not None else mu_max(noise)
    lines = ["mu,d1,d2,R1,R2,Rsum,D,F"]
    for mu in np.linspace(args.mu_lo, hi, args.mu_steps):
        pt = grid_optimum(noise, float(mu), args.coarse_step, args.refine_step)
        t = rd_bound(noise, pt.d_star)
        lines.append(
            f"{_fmt(mu)},{_fmt(pt.d_star.d1)},{_fmt(pt.d_star.d2)},"
            f"{_fmt(t.r1_min)},{_fmt(t.r2_min)},{_fmt(t.rsum_min)},"
            f"{_fmt(t.d_min)},{_fmt(pt.f_value)}"
        )
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_oracle_channels(args) -> int:
    res = general_channel_search(_noise(args), args.mu, grid_step=args.grid_step)
    ch1, ch2 = res.best if isinstance(res.best, tuple) else (res.best, res.best)
    print(f"best: ch1=({_fmt(ch1.a)},{_fmt(ch1.b)}) ch2=({_fmt(ch2.a)},{_fmt(ch2.b)}) "
          f"F={_fmt(res.best_objective)}")
    s = res.best_symmetric
    s1, s2 = s if isinstance(s, tuple) else (s, s)
    print(f"best-symmetric: ch1=({_fmt(s1.a)},{_fmt(s1.b)}) ch2=({_fmt(s2.a)},{_fmt(s2.b)}) "
          f"F={_fmt(res.best_symmetric_objective)}")
    print(f"bsc_optimal_within={_fmt(res.bsc_optimal_within)}")
    return 0


def _point_kind(args):
    if args.point == "corner":
        return Corner()
    if args.point == "single":
        return SingleLink()
    if args.delta is None:
        raise ValueError("--delta is required for intermediate points")
    return Intermediate(args.delta)


def _margins(args) -> CodeMargins:
    return CodeMargins(args.eps11, args.eps12, args.eps21, args.eps22)


def cmd_design(args) -> int:
    kind = _point_kind(args)
    if isinstance(kind, SingleLink):
        raise ValueError("design covers corner/intermediate plans; single-link "
                         "uses m1 = k1 = ceil(n(1-h_b(d1)+eps11)) directly")
    plan = plan_code(_noise(args), TestChannelPair(args.d1, args.d2),
                     args.n, kind, _margins(args))
    print(f"m1={plan.m1} k1={plan.k1} m2={plan.m2} k2={plan.k2}")
    print(f"R1={_fmt(plan.k1 / args.n)} R2={_fmt(plan.k2 / args.n)} "
          f"Rquant1={_fmt(plan.m1 / args.n)} Rquant2={_fmt(plan.m2 / args.n)}")
    return 0


def cmd_quantize(args) -> int:
    G = build_ldgm(args.n, args.m, args.degree, seed=args.code_seed, systematic=True)
    cfg = BipConfig(gamma=args.gamma, threshold=args.threshold,
                    one_at_a_time=args.one_at_a_time)
    rng = np.random.default_rng(args.seed)
    ds = []
    for b in range(args.blocks):
        y = rng.integers(0, 2, size=args.n).astype(np.uint8)
        res = bip_quantize(G, y, dataclasses.replace(cfg, seed=args.seed + b))
        ds.append(res.hamming_distortion)
        print(f"block={b} distortion={_fmt(res.hamming_distortion)} "
              f"rounds={res.rounds_used}")
    print(f"mean={_fmt(np.mean(ds))} rate={_fmt(args.m / args.n)}")
    return 0


def _load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        raw = json.load(fh)
    kind_raw = raw["point_kind"]
    kind_name = kind_raw["kind"].lower()
    if kind_name == "corner":
        kind = Corner()
    elif kind_name == "intermediate":
        kind = Intermediate(float(kind_raw["delta"]))
    elif kind_name in ("single_link", "single"):
        kind = SingleLink()
    else:
        raise ValueError(f"unknown point_kind {kind_raw['kind']!r}")
    margins = CodeMargins(**raw.get("margins", {}))
    bip = BipConfig(**raw.get("bip", {}))
    known = {"noise", "d_target", "n", "point_kind", "margins", "bip"}
    extras = {
        k: raw[k]
        for k in ("mu", "runs", "master_seed", "sp_max_iters", "jsp_rounds",
                  "jsp_iters", "ldgm_check_degree", "dh_var_degree",
                  "code_seed", "workers")
        if k in raw
    }
    unknown = set(raw) - known - set(extras)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(
        noise=NoisePair(*raw["noise"]),
        d_target=TestChannelPair(*raw["d_target"]),
        n=int(raw["n"]),
        point_kind=kind,
        margins=margins,
        bip=bip,
        **extras,
    )


def cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    if args.workers is not None:
        cfg = dataclasses.replace(cfg, workers=args.workers)
    report = run_experiment(cfg)
    _write_text(args.out, report.to_json())
    if args.csv:
        _write_text(args.csv, report.to_csv())
    print(f"Rsum={_fmt(report.rates['Rsum'])} D_em={_fmt(report.dem_mean)} "
          f"D_th={_fmt(report.d_th)} gap={_fmt(report.gap)}")
    return 0


def cmd_sanity(args) -> int:
    noise = _noise(args)
    d = TestChannelPair(args.d1, args.d2)
    d_em = model_sanity(noise, d, args.n, args.seed)
    d_th = rd_bound(noise, d).d_min
    print(f"D_em={_fmt(d_em)} D_th={_fmt(d_th)} diff={_fmt(d_em - d_th)}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="binceo",
        description="Two-link binary CEO problem under log-loss: bounds, "
                    "code design, and coding simulations.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="rate-distortion bound at a test-channel pair")
    _add_noise_flags(p)
    _add_d_flags(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("optimize", help="Lagrangian optimum at one mu")
    _add_noise_flags(p)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--coarse-step", type=float, default=1e-3)
    p.add_argument("--refine-step", type=float, default=1e-5)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("regions", help="region classification along a mu sweep")
    _add_noise_flags(p)
    p.add_argument("--mu-lo", type=float, default=1e-3)
    p.add_argument("--mu-hi", type=float, default=None, help="default mu_max")
    p.add_argument("--steps", type=int, default=40)
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("mu-max", help="largest useful Lagrange multiplier")
    _add_noise_flags(p)
    p.set_defaults(func=cmd_mu_max)

    p = sub.add_parser("highres", help="high-resolution d2(d1) law")
    _add_noise_flags(p)
    p.add_argument("--d1-lo", type=float, default=1e-4)
    p.add_argument("--d1-hi", type=float, default=1e-3)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_highres)

    p = sub.add_parser("curve", help="sum-rate-distortion curve along mu")
    _add_noise_flags(p)
    p.add_argument("--mu-lo", type=float, default=0.0)
    p.add_argument("--mu-hi", type=float, default=None, help="default mu_max")
    p.add_argument("--mu-steps", type=int, required=True)
    p.add_argument("--coarse-step", type=float, default=1e-3)
    p.add_argument("--refine-step", type=float, default=1e-5)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("oracle-channels",
                       help="exhaustive general-channel search at one mu")
    _add_noise_flags(p)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--grid-step", type=float, default=0.02)
    p.set_defaults(func=cmd_oracle_channels)

    p = sub.add_parser("design", help="compound-code block plan for a point")
    _add_noise_flags(p)
    _add_d_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--point", choices=["corner", "intermediate", "single"],
                   required=True)
    p.add_argument("--delta", type=float, default=None)
    defaults = CodeMargins()
    p.add_argument("--eps11", type=float, default=defaults.eps11)
    p.add_argument("--eps12", type=float, default=defaults.eps12)
    p.add_argument("--eps21", type=float, default=defaults.eps21)
    p.add_argument("--eps22", type=float, default=defaults.eps22)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("quantize", help="BiP-quantize random blocks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--degree", type=int, default=7)
    p.add_argument("--blocks", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--code-seed", type=int, default=1)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--threshold", type=float, default=0.9)
    p.add_argument("--one-at-a-time", action="store_true")
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("simulate", help="run an end-to-end experiment config")
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--out", default=None, help="report path (default stdout)")
    p.add_argument("--csv", default=None, help="optional per-run CSV path")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sanity", help="coding-free soft-estimator ceiling")
    _add_noise_flags(p)
    _add_d_flags(p)
    p.add_argument("--n", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sanity)

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
