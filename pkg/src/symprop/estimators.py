"""Property estimators.

Besides the empirical plug-in, this module implements the split-sample
polynomial estimators for entropy and distance to uniformity, the
smoothed unseen-symbols extrapolation for support coverage and support
size, and a median-of-blocks booster.

The split-sample estimators consume 2n samples as two halves.  Per
symbol, the first-half count decides the regime and the second-half
count feeds the estimate:

  * both counts small: unbiased falling-factorial estimate of a
    near-minimax polynomial approximation of the target on the
    small-probability interval,
  * first-half count small but second-half count large (a rare
    disagreement): contribute 0, which keeps the single-sample
    sensitivity of the estimator bounded,
  * first-half count large: empirical value (plus a first-order bias
    correction for entropy).

Threshold comparisons are strict; ties fall to the later branch.  The
total is clamped to the property's range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy import stats

from .distributions import entropy_nats
from .poly_approx import AbsShift, NegYLogY, PolynomialApprox, best_poly_approx, falling_factorial_table

PAPER_MODE = "paper"
PERFORMANCE_MODE = "performance"

POISSON = "poisson"
BINOMIAL = "binomial"

# Desk-scale thresholds for performance mode.  The default c2 keeps the
# single-sample sensitivity analysis intact but routes every desk-scale
# symbol into the polynomial branch over an interval too wide for low
# degrees to track -y log y, so performance mode shrinks the thresholds
# and raises the degree.
_PERF_C2 = 0.25
_PERF_DEGREE_FACTOR = 0.75


@dataclass(frozen=True)
class EstimatorConfig:
    """Knobs shared by the split-sample and smoothing estimators.

    c2 and c1 = 2*c2 scale the count thresholds (in units of log n)
    separating the polynomial and empirical branches; alpha is the
    sensitivity exponent; r is the smoothing mean for the unseen-symbols
    estimator, defaulting to log(3/epsilon).
    """

    c2: float = 36.0
    c1: float = 72.0
    alpha: float = 0.1
    L_override: int | None = None
    r: float | None = None
    epsilon: float = 0.25
    mode: str = PAPER_MODE
    smoothing: str = POISSON

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must be in (0, 1)")
        if self.c1 <= 0 or self.c2 <= 0:
            raise ValueError("c1 and c2 must be positive")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must be in (0, 1)")
        if self.mode not in (PAPER_MODE, PERFORMANCE_MODE):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.smoothing not in (POISSON, BINOMIAL):
            raise ValueError(f"unknown smoothing {self.smoothing!r}")
        if self.r is not None and self.r < 0:
            raise ValueError("r must be >= 0")

    @classmethod
    def for_mode(cls, mode: str, epsilon: float = 0.25, **overrides) -> "EstimatorConfig":
        if mode == PERFORMANCE_MODE:
            base = cls(c2=_PERF_C2, c1=2 * _PERF_C2, epsilon=epsilon, mode=mode)
        else:
            base = cls(epsilon=epsilon, mode=mode)
        return replace(base, **overrides) if overrides else base

    @property
    def smoothing_mean(self) -> float:
        return self.r if self.r is not None else math.log(3.0 / self.epsilon)

    def degree(self, n: int) -> int:
        """Polynomial degree for a half-sample of size n."""
        if self.L_override is not None:
            return min(self.L_override, n)
        if self.mode == PERFORMANCE_MODE:
            L = max(2, round(_PERF_DEGREE_FACTOR * math.log(n)))
        else:
            L = max(2, math.floor(0.25 * self.alpha * math.log(n)))
        return min(L, n)


@dataclass(frozen=True, eq=False)
class SplitSample:
    """A 2n sample split into its first and second halves."""

    first_half: np.ndarray
    second_half: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.first_half, dtype=np.int64)
        b = np.asarray(self.second_half, dtype=np.int64)
        if a.size != b.size or a.size == 0:
            raise ValueError("halves must be nonempty and of equal length")
        object.__setattr__(self, "first_half", a)
        object.__setattr__(self, "second_half", b)

    @classmethod
    def from_samples(cls, samples) -> "SplitSample":
        """Split a 2n sample into prefix and suffix halves, no shuffling."""
        s = np.asarray(samples, dtype=np.int64)
        if s.size % 2 != 0 or s.size == 0:
            raise ValueError("need an even, positive number of samples to split")
        return cls(s[: s.size // 2], s[s.size // 2:])

    @property
    def n(self) -> int:
        return int(self.first_half.size)

    def aligned_counts(self):
        """Per-symbol counts (first-half, second-half) over the union of
        observed symbols."""
        sym = np.unique(np.concatenate([self.first_half, self.second_half]))
        np_counts = np.bincount(np.searchsorted(sym, self.first_half), minlength=sym.size)
        n_counts = np.bincount(np.searchsorted(sym, self.second_half), minlength=sym.size)
        return sym, np_counts, n_counts


def _empirical_probs(samples) -> np.ndarray:
    s = np.asarray(samples)
    _, counts = np.unique(s, return_counts=True)
    return counts / s.size


def sml_plugin(samples, kind) -> float:
    """Plug-in estimate through the empirical distribution."""
    s = np.asarray(samples)
    if s.size == 0:
        raise ValueError("samples must be nonempty")
    q = _empirical_probs(s)
    if kind.kind == "entropy":
        return entropy_nats(q)
    if kind.kind == "support_size":
        return float(q.size)
    if kind.kind == "support_coverage":
        return float((1.0 - (1.0 - q) ** kind.m).sum())
    if kind.kind == "distance_to_uniform":
        k = kind.k
        if s.min() < 0 or s.max() >= k:
            raise ValueError("samples fall outside the declared alphabet")
        return float(np.abs(q - 1.0 / k).sum() + (k - q.size) / k)
    raise ValueError(f"unknown property kind {kind.kind!r}")


@lru_cache(maxsize=128)
def entropy_poly_approx(n: int, cfg: EstimatorConfig) -> PolynomialApprox:
    """The polynomial used by the entropy estimator's small-count branch."""
    hi = min(cfg.c1 * math.log(n) / n, 1.0)
    return best_poly_approx(NegYLogY(), (0.0, hi), cfg.degree(n))


@lru_cache(maxsize=128)
def _dtu_poly_approx(n: int, interval: tuple[float, float], shift: float,
                     cfg: EstimatorConfig) -> PolynomialApprox:
    return best_poly_approx(AbsShift(shift), interval, cfg.degree(n))


def entropy_estimate(split: SplitSample, k: int, cfg: EstimatorConfig) -> float:
    """Split-sample polynomial entropy estimate, clamped to [0, log k].

    Small-count symbols use the falling-factorial estimate of the
    -y log y approximation with its constant removed (the target is 0 at
    0, so unobserved symbols contribute nothing); large-count symbols
    use the empirical term with the +1/(2n) first-order bias correction.
    """
    n = split.n
    if n < 2:
        raise ValueError("each half must have at least 2 samples")
    if k < 2:
        raise ValueError("alphabet bound k must be >= 2")
    logn = math.log(n)
    if cfg.c2 * logn < 1.0:
        raise ValueError("sample too small for split estimator (c2 log n < 1)")
    thr2 = cfg.c2 * logn
    thr1 = cfg.c1 * logn

    approx = entropy_poly_approx(n, cfg)
    _, np_counts, n_counts = split.aligned_counts()
    G = falling_factorial_table(approx, n, int(n_counts.max()), drop_constant=True)

    poly_branch = (np_counts < thr2) & (n_counts < thr1)
    emp_branch = np_counts >= thr2

    total = float(G[n_counts[poly_branch]].sum())
    y = n_counts[emp_branch] / n
    y = y[y > 0]
    total += float(-(y * np.log(y)).sum()) + int(emp_branch.sum()) / (2.0 * n)
    return min(max(total, 0.0), math.log(k))


def dtu_estimate(split: SplitSample, k: int, cfg: EstimatorConfig) -> float:
    """Split-sample estimate of the L1 distance to uniform over a known
    k-symbol alphabet, clamped to [0, 2].

    Every alphabet symbol participates, unseen ones with counts 0.  In
    the large-alphabet regime (1/k below c2 log n / n) the generic
    three-branch estimator runs with target |y - 1/k|; otherwise the
    branches compare the halves' empirical deviations from 1/k against
    sqrt(c log n / (k n)) thresholds, with the polynomial fitted around
    1/k and no bias correction on the empirical branch.
    """
    n = split.n
    if k < 1:
        raise ValueError("alphabet size k must be >= 1")
    for half in (split.first_half, split.second_half):
        if half.min() < 0 or half.max() >= k:
            raise ValueError("samples fall outside the declared alphabet")
    logn = math.log(n)
    np_counts = np.bincount(split.first_half, minlength=k)
    n_counts = np.bincount(split.second_half, minlength=k)
    c = 1.0 / k

    if c < cfg.c2 * logn / n:
        thr2 = cfg.c2 * logn
        thr1 = cfg.c1 * logn
        hi = min(cfg.c1 * logn / n, 1.0)
        approx = _dtu_poly_approx(n, (0.0, hi), c, cfg)
        poly_branch = (np_counts < thr2) & (n_counts < thr1)
        emp_branch = np_counts >= thr2
    else:
        dev_first = np.abs(np_counts / n - c)
        dev_second = np.abs(n_counts / n - c)
        thr2 = math.sqrt(cfg.c2 * logn / (k * n))
        thr1 = math.sqrt(cfg.c1 * logn / (k * n))
        lo = max(0.0, c - thr1)
        hi = min(1.0, c + thr1)
        approx = _dtu_poly_approx(n, (lo, hi), c, cfg)
        poly_branch = (dev_first < thr2) & (dev_second < thr1)
        emp_branch = dev_first >= thr2

    G = falling_factorial_table(approx, n, int(n_counts.max()))
    total = float(G[n_counts[poly_branch]].sum())
    total += float(np.abs(n_counts[emp_branch] / n - c).sum())
    return min(max(total, 0.0), 2.0)


def _log_tail(i: np.ndarray, cfg: EstimatorConfig) -> np.ndarray:
    """log Pr(Z >= i) for the smoothing variable Z with mean r."""
    r = cfg.smoothing_mean
    if cfg.smoothing == POISSON:
        return stats.poisson.logsf(i - 1, r)
    trials = max(int(math.ceil(2 * r)), 1)
    return stats.binom.logsf(i - 1, trials, r / trials)


def good_toulmin_coefficients(i: np.ndarray, t: float, cfg: EstimatorConfig) -> np.ndarray:
    """Per-prevalence coefficients 1 - (-t)^i Pr(Z >= i) of the smoothed
    unseen-symbols extrapolation, computed in log space so large t^i
    never overflow against vanishing tails."""
    i = np.asarray(i, dtype=np.int64)
    if t == 0.0:
        return np.ones(i.shape)
    logmag = i * math.log(t) + _log_tail(i, cfg)
    signs = np.where(i % 2 == 0, 1.0, -1.0)
    return 1.0 - signs * np.exp(logmag)


def support_coverage_estimate(samples, m: int, cfg: EstimatorConfig | None = None) -> float:
    """Smoothed extrapolation of the number of distinct symbols that
    would appear in m draws, from n <= m observed draws.

    With m = n this is the observed distinct count.  The i-times-seen
    prevalences are weighted by 1 - (-t)^i Pr(Z >= i) with t = (m-n)/n,
    damping the alternating extrapolation by the smoothing tail.
    """
    cfg = cfg or EstimatorConfig()
    s = np.asarray(samples)
    n = s.size
    if n == 0:
        raise ValueError("samples must be nonempty")
    if m < n:
        raise ValueError("horizon m must be >= the number of samples")
    _, counts = np.unique(s, return_counts=True)
    t = (m - n) / n
    mult, prev = np.unique(counts, return_counts=True)
    coeff = good_toulmin_coefficients(mult, t, cfg)
    return float(np.dot(prev, coeff))


def support_estimate(samples, k: int, epsilon: float) -> float:
    """Support size relative to k, for distributions whose positive
    probabilities all sit above 1/k (the caller's promise).

    Extrapolates coverage to the horizon m = ceil(k log(3/epsilon)), at
    which every promised symbol is all but surely covered, and clamps
    the ratio to [0, 1].
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must be in (0, 1)")
    if k < 1:
        raise ValueError("k must be >= 1")
    n = np.asarray(samples).size
    r = math.log(3.0 / epsilon)
    m = max(int(math.ceil(k * r)), n)
    cfg = EstimatorConfig(r=r, epsilon=epsilon)
    return min(max(support_coverage_estimate(samples, m, cfg) / k, 0.0), 1.0)


def median_boost(base, samples, blocks: int) -> float:
    """Median of per-block estimates over equal consecutive blocks
    (lower median for even counts)."""
    s = np.asarray(samples)
    if blocks < 1:
        raise ValueError("blocks must be >= 1")
    if blocks > s.size:
        raise ValueError("more blocks than samples")
    if s.size % blocks != 0:
        raise ValueError("sample length must divide into equal blocks")
    size = s.size // blocks
    ests = sorted(base(s[i * size:(i + 1) * size]) for i in range(blocks))
    return ests[(blocks - 1) // 2]
