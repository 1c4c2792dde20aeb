"""Command-line interface.

Subcommands: estimate, pml, polyapprox, experiment, verify, probe.
JSON goes to stdout; experiment sweeps can write CSV with --out.
Exit codes: 0 success, 2 usage error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from .distributions import PropertyKind, parse_dist_spec, sample
from .estimators import (EstimatorConfig, SplitSample, dtu_estimate, entropy_estimate,
                         sml_plugin, support_coverage_estimate, support_estimate)
from .harness import (ExperimentConfig, bounded_difference_probe, report_to_csv,
                      run_experiment, verify_ml_metatheorem)
from .pml import pml_optimize
from .poly_approx import AbsShift, NegYLogY, best_poly_approx
from .profiles import Profile


class UsageError(Exception):
    """Bad command-line usage detected after parsing."""


def read_samples(path: str) -> np.ndarray:
    """Whitespace-separated integers, one sequence per line, concatenated."""
    rows = []
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise RuntimeError(f"cannot open {path}: {exc.strerror}") from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rows.append([int(tok) for tok in line.split()])
            except ValueError:
                raise RuntimeError(f"{path}:{lineno}: malformed sample line (expected integers)")
    if not rows:
        raise RuntimeError(f"{path}: empty samples file")
    return np.concatenate([np.asarray(r, dtype=np.int64) for r in rows])


def _parse_range(text: str) -> range:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return range(int(lo), int(hi) + 1)
    v = int(text)
    return range(v, v + 1)


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symprop",
                                description="Symmetric-property estimation for discrete distributions")
    sub = p.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate a property from a samples file")
    est.add_argument("--property", required=True, choices=("entropy", "support", "coverage", "dtu"))
    est.add_argument("--input", required=True, help="samples file (integers, whitespace separated)")
    est.add_argument("--k", type=int, help="alphabet size/bound (entropy, support, dtu)")
    est.add_argument("--m", type=int, help="coverage horizon (coverage)")
    est.add_argument("--epsilon", type=float, default=0.25)
    est.add_argument("--mode", choices=("paper", "performance"), default="performance")
    est.add_argument("--bits", action="store_true", help="report entropy in bits instead of nats")

    pml = sub.add_parser("pml", help="profile maximum likelihood for a profile")
    pml.add_argument("--profile", required=True, help="comma-separated multiplicities, e.g. 1,1,2")
    pml.add_argument("--support", default=None, help="support range lo..hi")
    pml.add_argument("--restarts", type=int, default=50)
    pml.add_argument("--seed", type=int, default=0)

    pa = sub.add_parser("polyapprox", help="near-minimax polynomial approximation")
    pa.add_argument("--target", required=True, choices=("neg-y-log-y", "abs-shift"))
    pa.add_argument("--shift", type=float, default=0.0, help="c for the |y-c| target")
    pa.add_argument("--lo", type=float, required=True)
    pa.add_argument("--hi", type=float, required=True)
    pa.add_argument("--degree", type=int, required=True)

    ex = sub.add_parser("experiment", help="run a seeded estimator sweep from a JSON config")
    ex.add_argument("--config", required=True)
    ex.add_argument("--out", default=None, help="write output to this path instead of stdout")
    ex.add_argument("--format", choices=("json", "csv"), default=None)

    ver = sub.add_parser("verify", help="exhaustive plug-in guarantee check (two symbols)")
    ver.add_argument("--n", type=int, default=6)
    ver.add_argument("--epsilons", default="0.1,0.2,0.4")
    ver.add_argument("--grid-step", type=float, default=0.05)
    ver.add_argument("--betas", default="1,0.5,0.1")
    ver.add_argument("--restarts", type=int, default=50)
    ver.add_argument("--seed", type=int, default=0)

    pr = sub.add_parser("probe", help="empirical single-sample sensitivity of an estimator")
    pr.add_argument("--estimator", required=True, choices=("sml-entropy", "poly-entropy"))
    pr.add_argument("--dist", required=True, help="distribution spec, e.g. uniform:1000")
    pr.add_argument("--n", type=int, required=True, help="total samples")
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--probes", type=int, default=10_000)
    pr.add_argument("--mode", choices=("paper", "performance"), default="paper")
    return p


def _cmd_estimate(args) -> dict:
    samples = read_samples(args.input)
    n_total = int(samples.size)
    cfg = EstimatorConfig.for_mode(args.mode, args.epsilon)
    if args.property in ("entropy", "dtu", "support") and not args.k:
        raise UsageError(f"--k is required for {args.property}")
    if args.property == "entropy":
        value = entropy_estimate(SplitSample.from_samples(samples), args.k, cfg)
        if args.bits:
            value /= math.log(2.0)
    elif args.property == "dtu":
        value = dtu_estimate(SplitSample.from_samples(samples), args.k, cfg)
    elif args.property == "coverage":
        if not args.m:
            raise UsageError("--m is required for coverage")
        value = support_coverage_estimate(samples, args.m, cfg)
    else:
        value = support_estimate(samples, args.k, args.epsilon)
    config_used = dataclasses.asdict(cfg)
    config_used.update({"property": args.property, "k": args.k, "m": args.m,
                        "bits": bool(args.bits)})
    return {"estimate": float(value), "config_used": config_used, "n": n_total}


def _cmd_pml(args) -> dict:
    profile = Profile.parse(args.profile)
    support_range = _parse_range(args.support) if args.support else None
    result = pml_optimize(profile, support_range=support_range,
                          restarts=args.restarts, seed=args.seed)
    return {
        "support": result.dist.support_size(),
        "probs": [float(v) for v in result.dist.probs],
        "log_likelihood": result.log_likelihood,
        "beta_empirical": result.beta_empirical,
    }


def _cmd_polyapprox(args) -> dict:
    target = NegYLogY() if args.target == "neg-y-log-y" else AbsShift(args.shift)
    approx = best_poly_approx(target, (args.lo, args.hi), args.degree)
    return {
        "target": args.target,
        "degree": approx.degree,
        "interval": list(approx.interval),
        "coeffs": list(approx.coeffs),
        "sup_error": approx.sup_error,
    }


def _cmd_experiment(args) -> tuple[str, str | None]:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise RuntimeError(f"cannot open {args.config}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise RuntimeError(f"{args.config}:{exc.lineno}: invalid JSON ({exc.msg})") from exc
    try:
        cfg = ExperimentConfig.from_json_dict(raw)
    except (KeyError, TypeError, ValueError) as exc:
        raise RuntimeError(f"{args.config}: bad experiment config: {exc}") from exc
    report = run_experiment(cfg)
    fmt = args.format or ("csv" if args.out else "json")
    text = report_to_csv(report) if fmt == "csv" else json.dumps(report.to_json_dict(), sort_keys=True, indent=2) + "\n"
    return text, args.out


def _cmd_verify(args) -> dict:
    return verify_ml_metatheorem(n=args.n, epsilons=_parse_floats(args.epsilons),
                                 grid_step=args.grid_step, betas=_parse_floats(args.betas),
                                 restarts=args.restarts, seed=args.seed)


def _cmd_probe(args) -> dict:
    dist = parse_dist_spec(args.dist)
    samples = sample(dist, args.n, args.seed)
    if args.estimator == "sml-entropy":
        estimator = lambda s: sml_plugin(s, PropertyKind.entropy())
    else:
        cfg = EstimatorConfig.for_mode(args.mode, 0.25)
        estimator = lambda s: entropy_estimate(SplitSample.from_samples(s), dist.dim, cfg)
    change = bounded_difference_probe(estimator, samples, dist.dim,
                                      probes=args.probes, seed=args.seed)
    return {"estimator": args.estimator, "dist": args.dist, "n": args.n,
            "max_change": change}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "experiment":
            text, out = _cmd_experiment(args)
            if out:
                with open(out, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            return 0
        handler = {
            "estimate": _cmd_estimate,
            "pml": _cmd_pml,
            "polyapprox": _cmd_polyapprox,
            "verify": _cmd_verify,
            "probe": _cmd_probe,
        }[args.command]
        payload = handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    json.dump(payload, sys.stdout, sort_keys=True, indent=2)
    sys.stdout.write("\n")
    return 0


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
