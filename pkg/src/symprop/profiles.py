"""Profiles: the multiset of symbol multiplicities of a sample.

The profile is a sufficient statistic for every symmetric property, and
profiles of length-n samples are exactly the integer partitions of n.
The probability that a distribution produces a sample with a given
profile has the closed form

    p(profile) = n! / prod_j mu_j!  *  m(p)

where the mu_j run over the multiplicity parts and m(p) sums, over all
assignments of the parts to distinct symbols, the product of each
symbol's probability raised to its assigned part (assignments that only
permute equal parts are counted once).  m(p) is evaluated exactly by
the kernel in ``symprop._kernels``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .distributions import DiscreteDistribution

MAX_ENUMERATION_N = 60
MAX_DP_STATES = 2_000_000


@dataclass(frozen=True)
class Profile:
    """Canonical profile: multiplicities sorted ascending, all >= 1."""

    multiplicities: tuple[int, ...]

    def __post_init__(self):
        if len(self.multiplicities) == 0:
            raise ValueError("profile must have at least one part")
        ms = tuple(sorted(int(m) for m in self.multiplicities))
        if ms[0] < 1:
            raise ValueError("multiplicities must be >= 1")
        object.__setattr__(self, "multiplicities", ms)

    @property
    def n(self) -> int:
        """Sample length: the sum of the multiplicities."""
        return sum(self.multiplicities)

    @property
    def num_parts(self) -> int:
        return len(self.multiplicities)

    def __str__(self) -> str:
        return ",".join(str(m) for m in self.multiplicities)

    @classmethod
    def parse(cls, text: str) -> "Profile":
        """Parse the comma-separated text form, e.g. ``1,1,2,2,5``."""
        try:
            parts = tuple(int(tok) for tok in text.split(","))
        except ValueError as exc:
            raise ValueError(f"bad profile {text!r}: {exc}") from exc
        return cls(parts)


@dataclass(frozen=True)
class Prevalence:
    """Counts of symbols by multiplicity: counts[mu] = number of symbols
    appearing exactly mu times."""

    counts: tuple[tuple[int, int], ...]

    def __post_init__(self):
        items = tuple(sorted((int(mu), int(c)) for mu, c in dict(self.counts).items()))
        for mu, c in items:
            if mu < 1 or c < 0:
                raise ValueError("prevalence keys must be >= 1 and counts >= 0")
        object.__setattr__(self, "counts", tuple((mu, c) for mu, c in items if c > 0))

    def as_dict(self) -> dict[int, int]:
        return dict(self.counts)

    @property
    def n(self) -> int:
        return sum(mu * c for mu, c in self.counts)

    def to_profile(self) -> Profile:
        parts = []
        for mu, c in self.counts:
            parts.extend([mu] * c)
        return Profile(tuple(parts))


def extract_profile(samples) -> Profile:
    """Profile of a sample sequence."""
    samples = list(samples)
    if not samples:
        raise ValueError("samples must be nonempty")
    return Profile(tuple(Counter(samples).values()))


def prevalence(profile: Profile) -> Prevalence:
    """Multiplicity histogram of a profile."""
    return Prevalence(tuple(Counter(profile.multiplicities).items()))


def enumerate_profiles(n: int) -> list[Profile]:
    """All profiles of length-n samples, i.e. the integer partitions of n.

    Guarded to n <= 60: the partition number grows like exp(3 sqrt(n)).
    """
    if not 1 <= n <= MAX_ENUMERATION_N:
        raise ValueError(f"n must be in 1..{MAX_ENUMERATION_N}")
    # ascending-composition partition generator
    out = []
    a = [0] * (n + 1)
    k = 1
    a[1] = n
    while k != 0:
        x = a[k - 1] + 1
        y = a[k] - 1
        k -= 1
        while x <= y:
            a[k] = x
            y -= x
            k += 1
        a[k] = x + y
        out.append(Profile(tuple(a[: k + 1])))
    return out


def _distinct_parts(profile: Profile):
    mu, cnt = np.unique(np.asarray(profile.multiplicities, dtype=np.int64), return_counts=True)
    states = int(np.prod(cnt + 1))
    if states > MAX_DP_STATES:
        raise ValueError("profile too rich for exact evaluation")
    return mu, cnt


def log_ordering_coefficient(profile: Profile) -> float:
    """log of n! / prod_j mu_j!, the number of sample orderings per
    assignment of parts to symbols."""
    lc = math.lgamma(profile.n + 1)
    for m in profile.multiplicities:
        lc -= math.lgamma(m + 1)
    return lc


def profile_log_probability_batch(probs_rows: np.ndarray, profile: Profile) -> np.ndarray:
    """Log profile probability for each probability row (rows of zeros
    padded to a common width are fine); -inf where impossible."""
    mu, cnt = _distinct_parts(profile)
    return log_ordering_coefficient(profile) + _kernels.msp_log_batch(probs_rows, mu, cnt)


def profile_log_probability(dist: DiscreteDistribution, profile: Profile) -> float:
    """Log of profile_probability, computed in log space throughout."""
    return float(profile_log_probability_batch(dist.probs[None, :], profile)[0])


def profile_probability(dist: DiscreteDistribution, profile: Profile) -> float:
    """Probability that a length-n sample from dist has this profile.

    Returns exactly 0.0 when the profile has more parts than dist has
    positive symbols.
    """
    lp = profile_log_probability(dist, profile)
    return 0.0 if lp == -math.inf else math.exp(lp)


def log_likelihood_gradient(probs_rows: np.ndarray, profile: Profile):
    """(log profile probability, gradient wrt probabilities) per row.

    The ordering coefficient is constant in p, so the gradient equals
    that of the monomial symmetric sum.
    """
    mu, cnt = _distinct_parts(profile)
    logm, grad = _kernels.msp_log_grad_batch(probs_rows, mu, cnt)
    return logm + log_ordering_coefficient(profile), grad
