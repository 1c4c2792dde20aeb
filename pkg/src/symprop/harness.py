"""Experiment orchestration and exhaustive verification.

``run_experiment`` sweeps estimators over sample sizes with fully
derived per-trial seeds, so reports are pure functions of their config.
``verify_ml_metatheorem`` enumerates a two-symbol desk-scale instance
exactly and checks that the plug-in through the profile-likelihood
maximizer fails at accuracy 2e with probability at most the number of
profiles times the failure probability of a reference profile-based
estimator at accuracy e (divided by beta for likelihood-ratio-beta
approximate maximizers).  ``bounded_difference_probe`` measures the
worst single-sample sensitivity of an estimator empirically.
"""

from __future__ import annotations

import hashlib
import itertools
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .distributions import (DiscreteDistribution, PropertyKind, entropy_nats,
                            parse_dist_spec, sample, true_property)
from .estimators import (EstimatorConfig, SplitSample, dtu_estimate, entropy_estimate,
                         sml_plugin, support_coverage_estimate, support_estimate)
from .pml import pml_plugin, support_sweep, certify_against_grid, _pick_incumbent
from .profiles import enumerate_profiles, extract_profile, profile_probability

KNOWN_ESTIMATORS = ("sml", "poly", "pml", "gt")
EXHAUSTIVE_PROBE_LIMIT = 10_000

CSV_COLUMNS = ("estimator", "property", "dist", "n", "trial",
               "estimate", "truth", "abs_error", "seed", "status")


def property_label(kind: PropertyKind) -> str:
    if kind.kind == "entropy":
        return "entropy"
    if kind.kind == "support_size":
        return "support"
    if kind.kind == "support_coverage":
        return f"coverage:{kind.m}"
    return f"dtu:{kind.k}"


def parse_property_label(label: str) -> PropertyKind:
    parts = label.split(":")
    if parts[0] == "entropy":
        return PropertyKind.entropy()
    if parts[0] == "support":
        return PropertyKind.support_size()
    if parts[0] == "coverage" and len(parts) == 2:
        return PropertyKind.support_coverage(int(parts[1]))
    if parts[0] == "dtu" and len(parts) == 2:
        return PropertyKind.distance_to_uniform(int(parts[1]))
    raise ValueError(f"bad property label {label!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a distribution, a property, estimators to race
    over a grid of total sample budgets, and the master seed from which
    every per-trial seed is derived."""

    dist_spec: str
    property: PropertyKind
    n_grid: tuple[int, ...]
    trials: int
    estimators: tuple[str, ...]
    master_seed: int
    epsilon: float
    mode: str = "performance"

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "estimators", tuple(self.estimators))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])) or not self.n_grid:
            raise ValueError("n_grid must be nonempty and strictly increasing")
        for est in self.estimators:
            if est not in KNOWN_ESTIMATORS:
                raise ValueError(f"unknown estimator {est!r}")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")

    def to_json_dict(self) -> dict:
        return {
            "dist_spec": self.dist_spec,
            "property": property_label(self.property),
            "n_grid": list(self.n_grid),
            "trials": self.trials,
            "estimators": list(self.estimators),
            "master_seed": self.master_seed,
            "epsilon": self.epsilon,
            "mode": self.mode,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ExperimentConfig":
        return cls(
            dist_spec=d["dist_spec"],
            property=parse_property_label(d["property"]),
            n_grid=tuple(d["n_grid"]),
            trials=int(d["trials"]),
            estimators=tuple(d["estimators"]),
            master_seed=int(d["master_seed"]),
            epsilon=float(d["epsilon"]),
            mode=d.get("mode", "performance"),
        )


@dataclass(frozen=True)
class TrialRecord:
    estimator: str
    property: str
    dist: str
    n: int
    trial: int
    estimate: float | None
    truth: float
    abs_error: float | None
    seed: int
    status: str


@dataclass(frozen=True)
class Aggregate:
    mean_abs_error: float
    rmse: float
    prob_error_exceeds_epsilon: float
    runtime_seconds: float
    trials_ok: int
    trials_failed: int


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    records: tuple[TrialRecord, ...]
    aggregates: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "config": self.config.to_json_dict(),
            "aggregates": {
                f"{est}@{n}": vars(agg) for (est, n), agg in sorted(self.aggregates.items())
            },
            "trials": [vars(r) for r in self.records],
        }


def trial_seed(master_seed: int, estimator: str, n: int, trial: int) -> int:
    """Per-trial seed: a pure, platform-stable function of its coordinates."""
    key = f"{master_seed}|{estimator}|{n}|{trial}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big") >> 1


def _max_workers() -> int:
    raw = os.environ.get("SYMPROP_THREADS", "0").strip() or "0"
    try:
        val = int(raw)
    except ValueError as exc:
        raise ValueError(f"SYMPROP_THREADS must be an integer, got {raw!r}") from exc
    if val < 0:
        raise ValueError("SYMPROP_THREADS must be >= 0")
    return val if val > 0 else min(32, os.cpu_count() or 1)


def _estimator_config(cfg: ExperimentConfig) -> EstimatorConfig:
    # the experiment epsilon is a reporting threshold and may exceed 1;
    # the estimator-side accuracy target lives in (0, 1)
    return EstimatorConfig.for_mode(cfg.mode, min(cfg.epsilon, 0.99))


def _run_one(estimator: str, kind: PropertyKind, samples: np.ndarray,
             dist_dim: int, cfg: ExperimentConfig, seed: int) -> float:
    if estimator == "sml":
        return sml_plugin(samples, kind)
    if estimator == "poly":
        ecfg = _estimator_config(cfg)
        split = SplitSample.from_samples(samples)
        if kind.kind == "entropy":
            return entropy_estimate(split, dist_dim, ecfg)
        if kind.kind == "distance_to_uniform":
            return dtu_estimate(split, kind.k, ecfg)
        raise ValueError("poly estimator applies to entropy and distance to uniformity")
    if estimator == "gt":
        ecfg = _estimator_config(cfg)
        if kind.kind == "support_coverage":
            return support_coverage_estimate(samples, kind.m, ecfg)
        if kind.kind == "support_size":
            return support_estimate(samples, dist_dim, min(cfg.epsilon, 0.99)) * dist_dim
        raise ValueError("gt estimator applies to support coverage and support size")
    if estimator == "pml":
        return pml_plugin(samples, kind, seed=seed)
    raise ValueError(f"unknown estimator {estimator!r}")


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Run every (estimator, n, trial) cell; failures are recorded per
    trial and never abort the sweep."""
    dist = parse_dist_spec(cfg.dist_spec)
    truth = true_property(dist, cfg.property)
    label = property_label(cfg.property)

    tasks = [(est, n, trial) for est in cfg.estimators for n in cfg.n_grid
             for trial in range(cfg.trials)]

    def run_task(task):
        est, n, trial = task
        seed = trial_seed(cfg.master_seed, est, n, trial)
        start = time.perf_counter()
        try:
            samples = sample(dist, n, seed)
            value = _run_one(est, cfg.property, samples, dist.dim, cfg, seed)
            record = TrialRecord(est, label, cfg.dist_spec, n, trial,
                                 float(value), truth, abs(float(value) - truth), seed, "ok")
        except (ValueError, RuntimeError):
            record = TrialRecord(est, label, cfg.dist_spec, n, trial,
                                 None, truth, None, seed, "failed")
        return record, time.perf_counter() - start

    workers = _max_workers()
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_task, tasks))
    else:
        results = [run_task(t) for t in tasks]

    records = tuple(r for r, _ in results)
    aggregates = {}
    for est in cfg.estimators:
        for n in cfg.n_grid:
            cell = [(r, dt) for (r, dt) in results if r.estimator == est and r.n == n]
            ok = [r for r, _ in cell if r.status == "ok"]
            errors = np.array([r.abs_error for r in ok]) if ok else np.array([])
            aggregates[(est, n)] = Aggregate(
                mean_abs_error=float(errors.mean()) if ok else math.nan,
                rmse=float(np.sqrt((errors ** 2).mean())) if ok else math.nan,
                prob_error_exceeds_epsilon=float((errors > cfg.epsilon).mean()) if ok else math.nan,
                runtime_seconds=float(sum(dt for _, dt in cell)),
                trials_ok=len(ok),
                trials_failed=len(cell) - len(ok),
            )
    return ExperimentReport(config=cfg, records=records, aggregates=aggregates)


def report_to_csv(report: ExperimentReport) -> str:
    """Flat per-trial CSV; byte-identical across repeated runs of the
    same config (aggregate runtimes deliberately stay out of it)."""
    lines = [",".join(CSV_COLUMNS)]
    for r in report.records:
        lines.append(",".join([
            r.estimator, r.property, r.dist, str(r.n), str(r.trial),
            "" if r.estimate is None else repr(r.estimate),
            repr(r.truth),
            "" if r.abs_error is None else repr(r.abs_error),
            str(r.seed), r.status,
        ]))
    return "\n".join(lines) + "\n"


def bounded_difference_probe(estimator, samples, alphabet, probes: int = EXHAUSTIVE_PROBE_LIMIT,
                             seed: int = 0) -> float:
    """Largest |f(X) - f(X')| over single-position replacements.

    Exhaustive over positions x alphabet when that is at most 10^4,
    otherwise a seeded subsample of ``probes`` replacement pairs.
    """
    base_samples = np.asarray(samples)
    if base_samples.size == 0:
        raise ValueError("samples must be nonempty")
    symbols = np.arange(alphabet) if isinstance(alphabet, int) else np.asarray(alphabet)
    base = estimator(base_samples)
    total = base_samples.size * symbols.size
    if total <= EXHAUSTIVE_PROBE_LIMIT:
        pairs = itertools.product(range(base_samples.size), symbols)
    else:
        rng = np.random.default_rng(seed)
        pos = rng.integers(0, base_samples.size, size=probes)
        sym = symbols[rng.integers(0, symbols.size, size=probes)]
        pairs = zip(pos, sym)
    worst = 0.0
    for position, symbol in pairs:
        if base_samples[position] == symbol:
            continue
        modified = base_samples.copy()
        modified[position] = symbol
        worst = max(worst, abs(estimator(modified) - base))
    return worst


def _profile_masses_by_enumeration(q: float, n: int) -> dict:
    """Profile distribution of (q, 1-q) samples via direct enumeration
    of all 2^n sequences; the independent cross-check path."""
    masses: dict = {}
    for bits in itertools.product((0, 1), repeat=n):
        ones = sum(bits)
        prob = (1.0 - q) ** (n - ones) * q ** ones
        if prob == 0.0:
            continue
        prof = extract_profile(bits)
        masses[prof] = masses.get(prof, 0.0) + prob
    return masses


def verify_ml_metatheorem(n: int = 6, epsilons=(0.1, 0.2, 0.4), grid_step: float = 0.05,
                          betas=(1.0, 0.5, 0.1), max_support: int = 12,
                          restarts: int = 50, seed: int = 0,
                          reference_table: dict | None = None) -> dict:
    """Exhaustive two-symbol entropy check of the plug-in guarantee.

    For every grid distribution p = (q, 1-q): delta(p) is the exact
    probability that the reference profile estimator errs by more than
    epsilon, and the plug-in through the certified tiny maximizer must
    err by more than 2 epsilon with probability at most delta times the
    number of profiles.  The beta variant plugs in, per profile, the
    most property-deviant per-support incumbent whose likelihood is at
    least beta times the maximum, against the bound scaled by 1/beta.
    All probabilities are reproduced through direct sequence enumeration.
    """
    if not 1 <= n <= 7:
        raise ValueError("exhaustive verification is guarded to n <= 7")
    if not 0 < grid_step <= 0.5:
        raise ValueError("grid_step must be in (0, 0.5]")
    profiles = enumerate_profiles(n)

    pml_entropy = {}
    reference = {}
    pools = {}
    for prof in profiles:
        pool = support_sweep(prof, range(1, max_support + 1), restarts=max(restarts, 50), seed=seed)
        _, dist, ll = _pick_incumbent(pool)
        dist, ll = certify_against_grid(prof, dist, ll, max_support)
        pml_entropy[prof] = entropy_nats(dist.probs)
        pools[prof] = [(d, lc) for _, d, lc in pool] + [(dist, ll)]
        reference[prof] = (reference_table[str(prof)] if reference_table is not None
                           else pml_entropy[prof])
        best_ll = max(lc for _, lc in pools[prof])
        pools[prof] = [(entropy_nats(d.probs), lc - best_ll) for d, lc in pools[prof]]

    qs = np.round(np.arange(0.0, 1.0 + grid_step / 2, grid_step), 12)
    points = []
    all_hold = True
    max_discrepancy = 0.0
    for q in qs:
        p = DiscreteDistribution(np.array([1.0 - q, q]))
        masses = {prof: profile_probability(p, prof) for prof in profiles}
        enum = _profile_masses_by_enumeration(float(q), n)
        for prof in profiles:
            max_discrepancy = max(max_discrepancy, abs(masses[prof] - enum.get(prof, 0.0)))
        hp = entropy_nats(p.probs)
        checks = []
        for eps in epsilons:
            failing = [prof for prof in profiles if abs(hp - reference[prof]) > eps]
            delta = sum(masses[prof] for prof in failing)
            delta_enum = sum(enum.get(prof, 0.0) for prof in failing)
            max_discrepancy = max(max_discrepancy, abs(delta - delta_enum))
            pml_fail = sum(masses[prof] for prof in profiles
                           if abs(hp - pml_entropy[prof]) > 2 * eps)
            bound = delta * len(profiles)
            holds = pml_fail <= bound + 1e-12
            beta_checks = []
            for beta in betas:
                log_beta = math.log(beta)
                fail_b = 0.0
                for prof in profiles:
                    eligible = [h for h, lrel in pools[prof] if lrel >= log_beta - 1e-12]
                    cand = max(eligible, key=lambda h: abs(h - reference[prof]))
                    if abs(hp - cand) > 2 * eps:
                        fail_b += masses[prof]
                bound_b = bound / beta
                holds_b = fail_b <= bound_b + 1e-12
                beta_checks.append({"beta": beta, "failure": fail_b, "bound": bound_b,
                                    "holds": holds_b})
                all_hold = all_hold and holds_b
            checks.append({"epsilon": eps, "delta": delta, "pml_failure": pml_fail,
                           "bound": bound, "holds": holds, "beta_checks": beta_checks})
            all_hold = all_hold and holds
        total = sum(masses.values())
        if abs(total - 1.0) > 1e-10:
            raise RuntimeError(f"profile masses sum to {total}, not 1")
        points.append({"q": float(q), "entropy": hp, "checks": checks})
    return {
        "n": n,
        "num_profiles": len(profiles),
        "profiles": {str(prof): {"pml_entropy": pml_entropy[prof],
                                 "reference": reference[prof]} for prof in profiles},
        "points": points,
        "all_hold": all_hold,
        "cross_check_max_discrepancy": max_discrepancy,
    }
