"""Command line interface.

Subcommands: run (one Monte Carlo experiment), sweep (a JSON grid of
experiments to CSV, resumable), bisect (threshold search on the
initial advantage), analyze (per-vertex diagnostics CSV), bounds
(evaluate a bound/estimate from flags, print a CSV row).

Exit codes: 0 success, 2 configuration or parameter error, 3
bracketing error from bisect.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import analysis, bounds
from .coloring import balanced_with_defectors
from .dynamics import step
from .errors import BracketingError, ConfigError, ParameterError, ValidationError
from .graphs import ModelParams, generate_gnp
from .harness import (
    SCHEMES,
    ExperimentConfig,
    mix64,
    run_trials,
    summary_row,
    sweep,
    threshold_bisect,
)

_CONFIG_KEYS = {
    "n", "p", "delta", "seed", "scheme", "trials",
    "max_days", "store_colorings", "workers", "constants",
}


def _config_from_dict(entry: dict) -> ExperimentConfig:
    unknown = set(entry) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = {"n", "p", "delta", "seed", "scheme", "trials"} - set(entry)
    if missing:
        raise ConfigError(f"missing config keys: {sorted(missing)}")
    constants = bounds.DEFAULT_CONSTANTS
    if "constants" in entry:
        spec = entry["constants"]
        if not isinstance(spec, dict):
            raise ConfigError("constants must be an object")
        valid = {f for f in bounds.ConstantsConfig.__dataclass_fields__}
        unknown = set(spec) - valid
        if unknown:
            raise ConfigError(f"unknown constants keys: {sorted(unknown)}")
        constants = bounds.ConstantsConfig(**spec)
    return ExperimentConfig(
        params=ModelParams(
            n=int(entry["n"]), p=float(entry["p"]),
            delta=entry["delta"], seed=int(entry["seed"]),
        ),
        scheme=str(entry["scheme"]),
        trials=int(entry["trials"]),
        max_days=int(entry["max_days"]) if entry.get("max_days") is not None else None,
        store_colorings=bool(entry.get("store_colorings", False)),
        workers=int(entry.get("workers", 1)),
        constants=constants,
    )


def cmd_run(args) -> int:
    cfg = ExperimentConfig(
        params=ModelParams(n=args.n, p=args.p, delta=args.delta, seed=args.seed),
        scheme=args.scheme,
        trials=args.trials,
        max_days=args.max_days,
        store_colorings=args.store_colorings,
        workers=args.workers,
    )
    summary = run_trials(cfg)
    for key, value in summary.counts.items():
        print(f"{key}: {value}")
    print(f"win_prob: {summary.win_probability:.6f} "
          f"[{summary.ci_low:.6f}, {summary.ci_high:.6f}]")
    print(f"mean_days: {summary.mean_days:.3f}")
    print(f"max_days_observed: {summary.max_days_observed}")
    print(f"mean_delta2: {summary.mean_delta2:.3f}")
    if args.json is not None:
        params = {"n": args.n, "p": args.p, "delta": args.delta, "seed": args.seed}
        payload = {
            "params": params,
            "scheme": cfg.scheme,
            "trials": cfg.trials,
            "counts": summary.counts,
            "win_probability": summary.win_probability,
            "ci_low": summary.ci_low,
            "ci_high": summary.ci_high,
            "day_histogram": summary.day_histogram,
            "mean_days": summary.mean_days,
            "max_days_observed": summary.max_days_observed,
            "mean_delta2": summary.mean_delta2,
            "trajectories": [
                rec.trajectory.to_json_dict(params=params, seed=rec.seed)
                for rec in summary.records
            ],
        }
        with open(args.json, "w", encoding="ascii") as fh:
            json.dump(payload, fh, indent=2)
        print(f"wrote {args.json}")
    return 0


def cmd_sweep(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if isinstance(raw, dict) and "configs" in raw:
        extra = set(raw) - {"configs"}
        if extra:
            raise ConfigError(f"unknown top-level keys: {sorted(extra)}")
        raw = raw["configs"]
    if isinstance(raw, dict):
        raw = [raw]
    if not isinstance(raw, list):
        raise ConfigError("config file must be a JSON array of experiment objects")
    configs = [_config_from_dict(entry) for entry in raw]
    rows = sweep(configs, out_path=args.out, workers=args.workers)
    print(f"{len(rows)} rows -> {args.out}")
    return 0


def cmd_bisect(args) -> int:
    delta_star = threshold_bisect(
        n=args.n,
        p=args.p,
        target_prob=args.target,
        trials_per_point=args.trials_per_point,
        seed=args.seed,
        max_days=args.max_days,
        delta_hi=args.delta_hi,
        workers=args.workers,
    )
    print(f"delta_star={delta_star}")
    return 0


def cmd_analyze(args) -> int:
    graph = generate_gnp(args.n, args.p, mix64(args.seed, 1))
    scenario = balanced_with_defectors(args.n, args.delta, mix64(args.seed, 2))
    hat0 = scenario.hat_coloring
    disc = analysis.signed_discrepancies(graph, hat0)
    almost_mask = analysis.almost_red_set(graph, hat0, args.D).member_mask(args.n)
    vuln = np.zeros(args.n, dtype=bool)
    vuln[analysis.vulnerable_set(graph, scenario)] = True
    flip = np.zeros(args.n, dtype=bool)
    flip[analysis.flipping_set(graph, scenario)] = True
    with open(args.out, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["vertex", "discrepancy", "almost_red@D", "vulnerable", "flipping", "regular"])
        for v in range(args.n):
            report = analysis.regularity_report(graph, hat0, v, args.p)
            writer.writerow([
                v, int(disc[v]), int(almost_mask[v]), int(vuln[v]),
                int(flip[v]), int(report.regular),
            ])
    print(f"wrote {args.out} ({args.n} vertices, D={args.D})")
    return 0


def _parse_kv(pairs) -> dict:
    out = {}
    for item in pairs:
        if "=" not in item:
            raise ParameterError(f"bounds arguments must look like key=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            value = int(raw)
        except ValueError:
            try:
                value = float(raw)
            except ValueError:
                value = raw
        out[key] = value
    return out


def _bounds_ops() -> dict:
    return {
        "kl_divergence": (
            ["x", "y"],
            lambda a: bounds.kl_divergence(a["x"], a["y"]),
        ),
        "chernoff_tail": (
            ["n", "p", "eps", "side"],
            lambda a: bounds.chernoff_tail(
                bounds.TailQuery(n=a["n"], p=a["p"], threshold=a["eps"], side=a["side"])
            ),
        ),
        "window_bound": (
            ["n", "p", "t"],
            lambda a: bounds.window_bound(a["n"], a["p"], a["t"]),
        ),
        "poisson_tail_bound": (
            ["n", "p", "t"],
            lambda a: bounds.poisson_tail_bound(a["n"], a["p"], a["t"]),
        ),
        "exact_tail": (
            ["n", "p", "t", "side"],
            lambda a: bounds.exact_tail(a["n"], a["p"], a["t"], a["side"]),
        ),
        "gaussian_cdf": (
            ["x"],
            lambda a: bounds.gaussian_cdf(a["x"]),
        ),
        "collision_probability": (
            ["m", "p"],
            lambda a: bounds.collision_probability(a["m"], a["p"]).value,
        ),
        "almost_red_probability_estimate": (
            ["n", "p", "D", "sign"],
            lambda a: bounds.almost_red_probability_estimate(
                a["n"], a["p"], a["D"], a["sign"]
            ).value,
        ),
    }


def cmd_bounds(args) -> int:
    ops = _bounds_ops()
    kv = _parse_kv(args.args)
    if args.op == "theory_thresholds":
        needed = ["n", "p"]
        missing = [k for k in needed if k not in kv]
        if missing:
            raise ParameterError(f"op theory_thresholds needs arguments {needed}")
        th = bounds.theory_thresholds(kv["n"], kv["p"])
        d = kv.get("D", 0)
        print("n,p,D,delta_min,expected_A_excess_lower,var_A_upper")
        print(f"{kv['n']},{kv['p']},{d},{th.delta_min!r},"
              f"{th.expected_A_excess_lower(d)!r},{th.var_A_upper!r}")
        return 0
    if args.op not in ops:
        raise ParameterError(
            f"unknown bounds op {args.op!r}; available: "
            f"{sorted(list(ops) + ['theory_thresholds'])}"
        )
    names, fn = ops[args.op]
    missing = [k for k in names if k not in kv]
    if missing:
        raise ParameterError(f"op {args.op} needs arguments {names}, missing {missing}")
    value = fn(kv)
    print(",".join(names + ["value"]))
    print(",".join([str(kv[k]) for k in names] + [repr(float(value))]))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="majoritylab",
        description="Majority dynamics on G(n, p): simulation, diagnostics, bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one Monte Carlo experiment")
    p_run.add_argument("--n", type=int, required=True)
    p_run.add_argument("--p", type=float, required=True)
    p_run.add_argument("--delta", type=int, default=0)
    p_run.add_argument("--scheme", choices=SCHEMES, required=True)
    p_run.add_argument("--trials", type=int, required=True)
    p_run.add_argument("--seed", type=int, required=True)
    p_run.add_argument("--max-days", type=int, default=None)
    p_run.add_argument("--store-colorings", action="store_true")
    p_run.add_argument("--json", type=str, default=None, help="write the full summary JSON here")
    p_run.add_argument("--workers", type=int, default=1)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a JSON grid of experiments to CSV (resumable)")
    p_sweep.add_argument("--config", type=str, required=True)
    p_sweep.add_argument("--out", type=str, required=True)
    p_sweep.add_argument("--workers", type=int, default=None)
    p_sweep.set_defaults(func=cmd_sweep)

    p_bisect = sub.add_parser("bisect", help="bisect for the smallest winning advantage")
    p_bisect.add_argument("--n", type=int, required=True)
    p_bisect.add_argument("--p", type=float, required=True)
    p_bisect.add_argument("--target", type=float, required=True)
    p_bisect.add_argument("--trials-per-point", type=int, required=True)
    p_bisect.add_argument("--seed", type=int, required=True)
    p_bisect.add_argument("--max-days", type=int, default=None)
    p_bisect.add_argument("--delta-hi", type=int, default=None)
    p_bisect.add_argument("--workers", type=int, default=1)
    p_bisect.set_defaults(func=cmd_bisect)

    p_analyze = sub.add_parser("analyze", help="per-vertex day-1 diagnostics CSV")
    p_analyze.add_argument("--n", type=int, required=True)
    p_analyze.add_argument("--p", type=float, required=True)
    p_analyze.add_argument("--delta", type=int, required=True)
    p_analyze.add_argument("--seed", type=int, required=True)
    p_analyze.add_argument("--D", type=int, required=True)
    p_analyze.add_argument("--out", type=str, required=True)
    p_analyze.set_defaults(func=cmd_analyze)

    p_bounds = sub.add_parser("bounds", help="evaluate a bound/estimate, print a CSV row")
    p_bounds.add_argument("--op", type=str, required=True)
    p_bounds.add_argument("args", nargs="*", help="op arguments as key=value pairs")
    p_bounds.set_defaults(func=cmd_bounds)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BracketingError as exc:
        print(f"bracketing error: {exc}", file=sys.stderr)
        for key, value in exc.diagnostics.items():
            print(f"  {key}: {value}", file=sys.stderr)
        return 3
    except (ConfigError, ParameterError, ValidationError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
