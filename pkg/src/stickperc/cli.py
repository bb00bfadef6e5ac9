"""Batch command-line front door.

Subcommands: bounds, threshold, scaling, branching, oriented, measure-mc,
verify.  Machine-parseable JSON goes to stdout, logs to stderr; CSV outputs
are written to explicit paths.  Exit codes: 0 success, 1 check/acceptance
failure, 2 invalid input.  All randomness flows from --seed, and outputs
are byte-identical across reruns and --workers settings.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import branching, measures, oriented, percolation, verify
from .errors import StickPercError
from .geometry import Segment, Stick
from .percolation import replicate_seeds
from .sampling import Rigid, Uniform

SCHEMA_VERSION = 1

_DEFAULTS = {
    "bounds": {"delta": 1.0},
    "threshold": {
        "s_factor": 10.0,
        "replicates": 200,
        "workers": 1,
        "axis": 0,
        "delta": 1.0,
        "max_bisect": 12,
        "probes_csv": None,
    },
    "scaling": {
        "L_list": "8,16,32,64",
        "s_factor": 10.0,
        "replicates": 200,
        "workers": 1,
        "axis": 0,
        "delta": 1.0,
        "max_bisect": 12,
        "csv": None,
    },
    "branching": {
        "law": "uniform",
        "trials": 2000,
        "gw_runs": 200,
        "max_generations": 60,
        "population_cap": 100000,
        "samples_csv": None,
    },
    "oriented": {"variant": "bond", "n_max": 500, "trials": 500, "csv": None},
    "measure-mc": {"L": 256.0, "trials": 1000000, "lam": 1.0, "delta": 1.0},
    "verify": {"suite": "all"},
}


def _law_object(tag: str, d: int):
    if tag == "uniform":
        return Uniform()
    if tag == "rigid":
        axis = np.zeros(d)
        axis[1] = 1.0
        return Rigid(axis)
    raise StickPercError(f"law {tag!r} is not samplable from the CLI (use uniform or rigid)")


def _emit(doc: dict) -> None:
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    sys.stdout.write(json.dumps(doc, sort_keys=True) + "\n")


def _log(msg: str) -> None:
    sys.stderr.write(msg + "\n")


def _apply_config(args: argparse.Namespace, command: str) -> None:
    table = dict(_DEFAULTS.get(command, {}))
    overrides = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            overrides = json.load(fh)
    for key, default in table.items():
        attr = key.replace("-", "_")
        if getattr(args, attr, None) is None:
            value = overrides.get(key, default)
            setattr(args, attr, value)
    for key, value in overrides.items():
        attr = key.replace("-", "_")
        if getattr(args, attr, None) is None:
            setattr(args, attr, value)


def _write_csv(path: str, schema: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w") as fh:
        fh.write(f"# schema=stickperc.{schema}.v{SCHEMA_VERSION}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")


def _probe_doc(stats: percolation.CrossingStats) -> dict:
    return {
        "intensity": stats.intensity,
        "frequency": stats.frequency,
        "successes": stats.successes,
        "replicates": stats.replicates,
        "ci_low": stats.ci_low,
        "ci_high": stats.ci_high,
    }


def _threshold_csv_rows(est: percolation.ThresholdEstimate) -> list[list]:
    rows = []
    for probe_id, probe in enumerate(est.probes):
        seeds = replicate_seeds(est.seed, probe_id, probe.replicates)
        for r, (crossed, s) in enumerate(zip(probe.outcomes, seeds)):
            rows.append([est.length, probe.intensity, crossed, r, s])
    return rows


def cmd_bounds(args) -> int:
    lower_threshold = measures.bound_validity_threshold(args.d, args.law, "lower")
    upper_threshold = measures.bound_validity_threshold(args.d, args.law, "upper")
    if not args.L > lower_threshold:
        raise StickPercError(
            f"no bound applies: {args.law} lower bound requires L > {lower_threshold:.6g}"
        )
    report = measures.theorem_bounds(args.d, args.L, args.law, delta=args.delta, strict=False)
    _emit(
        {
            "kind": "bounds",
            "d": report.d,
            "L": report.length,
            "law": report.law,
            "delta": report.delta,
            "lower": report.lower,
            "upper": report.upper,
            "lower_valid": bool(args.L > lower_threshold),
            "upper_valid": bool(args.L > upper_threshold),
        }
    )
    return 0


def _run_threshold(args, length: float) -> percolation.ThresholdEstimate:
    law = _law_object(args.law, args.d)
    side = args.s_factor * length
    return percolation.estimate_threshold(
        args.d,
        length,
        law,
        side,
        replicates=int(args.replicates),
        seed=args.seed,
        axis=int(args.axis),
        workers=int(args.workers),
        max_bisect=int(args.max_bisect),
        delta=args.delta,
    )


def _estimate_doc(est: percolation.ThresholdEstimate) -> dict:
    return {
        "d": est.d,
        "L": est.length,
        "law": est.law,
        "side": est.side,
        "lambda_hat": est.lambda_hat,
        "ci_low": est.ci_low,
        "ci_high": est.ci_high,
        "replicates_per_probe": est.replicates_per_probe,
        "bracket": list(est.bracket),
        "probes": [_probe_doc(p) for p in est.probes],
        "seed": est.seed,
    }


def cmd_threshold(args) -> int:
    est = _run_threshold(args, args.L)
    if args.probes_csv:
        _write_csv(
            args.probes_csv,
            "probes",
            ["L", "lambda", "crossed", "replicate", "seed"],
            _threshold_csv_rows(est),
        )
    _emit({"kind": "threshold", **_estimate_doc(est)})
    return 0


def cmd_scaling(args) -> int:
    lengths = [float(v) for v in str(args.L_list).split(",") if v]
    points = []
    estimates = []
    for length in lengths:
        _log(f"estimating threshold at L={length:g}")
        est = _run_threshold(args, length)
        estimates.append(est)
        points.append((length, est.lambda_hat, percolation.fit_weight(est)))
    fit = percolation.scaling_fit(points)
    if args.csv:
        rows = [
            [est.length, est.lambda_hat, est.ci_low, est.ci_high, pt[2]]
            for est, pt in zip(estimates, points)
        ]
        _write_csv(args.csv, "scaling", ["L", "lambda_hat", "ci_low", "ci_high", "weight"], rows)
    _emit(
        {
            "kind": "scaling",
            "d": args.d,
            "law": args.law,
            "s_factor": args.s_factor,
            "replicates": int(args.replicates),
            "seed": args.seed,
            "slope": fit.slope,
            "intercept": fit.intercept,
            "stderr": fit.stderr,
            "points": [
                {"L": est.length, "lambda_hat": est.lambda_hat, "ci_low": est.ci_low, "ci_high": est.ci_high}
                for est in estimates
            ],
            "estimates": [_estimate_doc(est) for est in estimates],
        }
    )
    return 0


def cmd_branching(args) -> int:
    law = _law_object(args.law, args.d)
    d = args.d
    axis = np.zeros(d)
    axis[1 if args.law == "rigid" else 0] = 1.0
    seed_stick = Stick(Segment(np.zeros(d), axis, args.L))
    est = branching.offspring_mean_mc(
        d, args.L, args.lam, law, seed_stick, int(args.trials), args.seed
    )
    bound = measures.gw_offspring_bound(d, args.L, args.lam, args.law)
    gw_extinct = 0
    runs = int(args.gw_runs)
    example_sizes: list[int] = []
    for k in range(runs):
        report = branching.dominating_gw_run(
            est.samples, int(args.max_generations), int(args.population_cap), args.seed + k
        )
        gw_extinct += 1 if report.extinct else 0
        if k == 0:
            example_sizes = list(report.generation_sizes)
    if args.samples_csv:
        _write_csv(
            args.samples_csv,
            "offspring",
            ["trial", "count"],
            [[i, v] for i, v in enumerate(est.samples)],
        )
    _emit(
        {
            "kind": "branching",
            "d": d,
            "L": args.L,
            "intensity": args.lam,
            "law": args.law,
            "trials": est.trials,
            "mean": est.mean,
            "stderr": est.stderr,
            "offspring_bound": bound,
            "below_bound": est.mean <= bound + 3.0 * est.stderr,
            "gw_runs": runs,
            "gw_extinct": gw_extinct,
            "gw_max_generations": int(args.max_generations),
            "gw_population_cap": int(args.population_cap),
            "gw_example_generations": example_sizes,
            "seed": args.seed,
        }
    )
    return 0


def cmd_oriented(args) -> int:
    stats = oriented.survival_probability(
        args.alpha, args.variant, int(args.n_max), int(args.trials), args.seed
    )
    if args.csv:
        rows = [
            [stats.alpha, t, 1 if lvl < 0 else 0, lvl]
            for t, lvl in enumerate(stats.extinction_levels)
        ]
        _write_csv(
            args.csv,
            "oriented",
            ["alpha", "trial", "survived", "extinction_level"],
            rows,
        )
    _emit(
        {
            "kind": "oriented",
            "alpha": stats.alpha,
            "variant": stats.variant,
            "n_max": stats.n_max,
            "trials": stats.trials,
            "survivors": stats.survivors,
            "fraction": stats.fraction,
            "ci_low": stats.ci_low,
            "ci_high": stats.ci_high,
            "seed": args.seed,
        }
    )
    return 0


def cmd_measure_mc(args) -> int:
    geom = measures.ConstructionGeometry(args.d, args.L)
    gamma = geom.box_center((-2, 0))
    zeta = geom.right_face_center((0, 0))
    est = measures.mc_two_ball_measure(
        args.d, args.L, gamma, zeta, Uniform(), int(args.trials), args.seed, intensity=args.lam
    )
    bound = measures.two_ball_lower_bound(args.d, args.L, delta=args.delta, intensity=args.lam)
    _emit(
        {
            "kind": "measure_mc",
            "d": args.d,
            "L": args.L,
            "intensity": args.lam,
            "delta": args.delta,
            "trials": est.trials,
            "hits": est.hits,
            "estimate": est.value,
            "stderr": est.stderr,
            "lower_bound": bound,
            "above_bound": est.value + 3.0 * est.stderr >= bound,
            "seed": args.seed,
        }
    )
    return 0


def cmd_verify(args) -> int:
    checks = verify.run_suite(args.suite, args.seed)
    for check in checks:
        _log(f"[{'PASS' if check.passed else 'FAIL'}] {check.name}: {check.detail}")
    passed = all(c.passed for c in checks)
    _emit(
        {
            "kind": "verify",
            "suite": args.suite,
            "seed": args.seed,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks
            ],
            "passed": passed,
        }
    )
    return 0 if passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stickperc")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--config", type=str, default=None, help="JSON file with parameter defaults")

    p = sub.add_parser("bounds", help="critical-intensity bracket for (d, L, law)")
    common(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--law", choices=["uniform", "rigid", "density"], required=True)
    p.add_argument("--delta", type=float, default=None)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("threshold", help="estimate the crossing intensity at one L")
    common(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--law", choices=["uniform", "rigid"], required=True)
    p.add_argument("--s-factor", dest="s_factor", type=float, default=None)
    p.add_argument("--replicates", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--axis", type=int, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--max-bisect", dest="max_bisect", type=int, default=None)
    p.add_argument("--probes-csv", dest="probes_csv", type=str, default=None)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("scaling", help="thresholds across an L list plus log-log fit")
    common(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--law", choices=["uniform", "rigid"], required=True)
    p.add_argument("--L-list", dest="L_list", type=str, default=None)
    p.add_argument("--s-factor", dest="s_factor", type=float, default=None)
    p.add_argument("--replicates", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--axis", type=int, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--max-bisect", dest="max_bisect", type=int, default=None)
    p.add_argument("--csv", type=str, default=None)
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("branching", help="offspring-mean Monte Carlo and dominating GW runs")
    common(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--law", choices=["uniform", "rigid"], default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--gw-runs", dest="gw_runs", type=int, default=None)
    p.add_argument("--max-generations", dest="max_generations", type=int, default=None)
    p.add_argument("--population-cap", dest="population_cap", type=int, default=None)
    p.add_argument("--samples-csv", dest="samples_csv", type=str, default=None)
    p.set_defaults(func=cmd_branching)

    p = sub.add_parser("oriented", help="oriented-percolation survival estimate")
    common(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--variant", choices=["bond", "site"], default=None)
    p.add_argument("--n-max", dest="n_max", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--csv", type=str, default=None)
    p.set_defaults(func=cmd_oriented)

    p = sub.add_parser("measure-mc", help="two-ball connection measure Monte Carlo")
    common(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--L", type=float, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.set_defaults(func=cmd_measure_mc)

    p = sub.add_parser("verify", help="run seeded property suites")
    common(p)
    p.add_argument(
        "--suite",
        choices=["geometry", "measures", "branching", "oriented", "all"],
        default=None,
    )
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_config(args, args.command)
    try:
        return args.func(args)
    except StickPercError as exc:
        _log(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
