"""Finite discrete distributions: construction, sampling, exact property values.

Symbols are dense integers ``0..k-1`` unless explicit ``support_labels``
are given; the properties computed here are all label-invariant.
Entropy is in nats (the CLI exposes a base-2 flag).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SUM_TOL = 1e-12

ENTROPY = "entropy"
SUPPORT_SIZE = "support_size"
SUPPORT_COVERAGE = "support_coverage"
DISTANCE_TO_UNIFORM = "distance_to_uniform"


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Probability vector over a finite alphabet.

    probs must be nonnegative and sum to one within 1e-12; the array is
    stored read-only so instances can be shared freely.
    """

    probs: np.ndarray
    support_labels: tuple[int, ...] | None = None

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probs must be a nonempty 1-d sequence")
        if np.any(p < 0):
            raise ValueError("probabilities must be nonnegative")
        if abs(float(p.sum()) - 1.0) > _SUM_TOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        if self.support_labels is not None and len(self.support_labels) != p.size:
            raise ValueError("support_labels length must match probs")
        p = p.copy()
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @property
    def dim(self) -> int:
        return int(self.probs.size)

    def support_size(self) -> int:
        """Number of strictly positive probabilities."""
        return int(np.count_nonzero(self.probs > 0))


@dataclass(frozen=True)
class PropertyKind:
    """Which symmetric property to evaluate.

    ``support_coverage`` carries its horizon m (how many fresh samples
    the coverage refers to); ``distance_to_uniform`` carries the size k
    of the reference alphabet.
    """

    kind: str
    m: int | None = None
    k: int | None = None

    def __post_init__(self):
        if self.kind not in (ENTROPY, SUPPORT_SIZE, SUPPORT_COVERAGE, DISTANCE_TO_UNIFORM):
            raise ValueError(f"unknown property kind {self.kind!r}")
        if self.kind == SUPPORT_COVERAGE and (self.m is None or self.m < 1):
            raise ValueError("support_coverage requires a positive horizon m")
        if self.kind == DISTANCE_TO_UNIFORM and (self.k is None or self.k < 1):
            raise ValueError("distance_to_uniform requires a positive alphabet size k")

    @classmethod
    def entropy(cls) -> "PropertyKind":
        return cls(ENTROPY)

    @classmethod
    def support_size(cls) -> "PropertyKind":
        return cls(SUPPORT_SIZE)

    @classmethod
    def support_coverage(cls, m: int) -> "PropertyKind":
        return cls(SUPPORT_COVERAGE, m=int(m))

    @classmethod
    def distance_to_uniform(cls, k: int) -> "PropertyKind":
        return cls(DISTANCE_TO_UNIFORM, k=int(k))


def make_uniform(k: int) -> DiscreteDistribution:
    """Uniform distribution over k symbols."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return DiscreteDistribution(np.full(k, 1.0 / k))


def make_zipf(k: int, s: float) -> DiscreteDistribution:
    """Power law p_i proportional to 1/i^s over ranks i = 1..k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if s < 0:
        raise ValueError("s must be >= 0")
    w = 1.0 / np.arange(1, k + 1, dtype=float) ** s
    return DiscreteDistribution(w / w.sum())


def make_two_step(k: int, ratio: float) -> DiscreteDistribution:
    """Two-level distribution: floor(k/2) heavy symbols, each ``ratio``
    times as probable as a light one (ratio=1 collapses to uniform)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if ratio <= 0:
        raise ValueError("ratio must be positive")
    heavy = k // 2
    w = np.ones(k)
    w[:heavy] = ratio
    return DiscreteDistribution(w / w.sum())


def parse_dist_spec(spec: str) -> DiscreteDistribution:
    """Parse CLI distribution specs: uniform:k, zipf:k:s, twostep:k:ratio."""
    parts = spec.strip().split(":")
    try:
        if parts[0] == "uniform" and len(parts) == 2:
            return make_uniform(int(parts[1]))
        if parts[0] == "zipf" and len(parts) == 3:
            return make_zipf(int(parts[1]), float(parts[2]))
        if parts[0] == "twostep" and len(parts) == 3:
            return make_two_step(int(parts[1]), float(parts[2]))
    except ValueError as exc:
        raise ValueError(f"bad distribution spec {spec!r}: {exc}") from exc
    raise ValueError(f"bad distribution spec {spec!r}; expected uniform:k, zipf:k:s or twostep:k:ratio")


def sample(dist: DiscreteDistribution, n: int, seed: int) -> np.ndarray:
    """n i.i.d. draws from dist; identical (dist, n, seed) give identical output."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    cum = np.cumsum(dist.probs)
    idx = np.searchsorted(cum, rng.random(n), side="right")
    idx = np.minimum(idx, dist.dim - 1).astype(np.int64)
    if dist.support_labels is not None:
        return np.asarray(dist.support_labels, dtype=np.int64)[idx]
    return idx


def entropy_nats(probs: np.ndarray) -> float:
    """Shannon entropy in nats with the 0 log 0 = 0 convention."""
    p = np.asarray(probs, dtype=float)
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def support_coverage_value(probs: np.ndarray, m: int) -> float:
    """Expected number of distinct symbols in m fresh draws."""
    p = np.asarray(probs, dtype=float)
    p = p[p > 0]
    return float((1.0 - (1.0 - p) ** m).sum())


def distance_to_uniform_value(probs: np.ndarray, k: int) -> float:
    """L1 distance to the uniform distribution over a k-symbol alphabet.

    The distribution is taken as embedded in the reference alphabet;
    alphabet symbols beyond its dimension carry probability zero.
    """
    p = np.asarray(probs, dtype=float)
    if p.size > k:
        raise ValueError("distribution has more symbols than the reference alphabet")
    return float(np.abs(p - 1.0 / k).sum() + (k - p.size) / k)


def true_property(dist: DiscreteDistribution, kind: PropertyKind) -> float:
    """Exact property value of a known distribution."""
    if kind.kind == ENTROPY:
        return entropy_nats(dist.probs)
    if kind.kind == SUPPORT_SIZE:
        return float(dist.support_size())
    if kind.kind == SUPPORT_COVERAGE:
        return support_coverage_value(dist.probs, kind.m)
    if kind.kind == DISTANCE_TO_UNIFORM:
        return distance_to_uniform_value(dist.probs, kind.k)
    raise ValueError(f"unknown property kind {kind.kind!r}")
