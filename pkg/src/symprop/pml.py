"""Profile maximum likelihood: the distribution that maximizes the
probability of the observed profile.

Exact likelihood evaluation is only tractable at desk scale, so the
solver combines (a) batched projected-gradient ascent on the profile
log-likelihood with multistart over random interior points plus the
uniform and embedded-empirical starts, swept across candidate support
sizes, and (b) for tiny profiles, a full simplex grid sweep at 1/64
resolution that certifies the returned likelihood dominates every grid
point.  Reported beta values are ratios against the incumbent best,
never a global optimality claim beyond that certification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .distributions import DiscreteDistribution, PropertyKind, true_property
from .profiles import Profile, extract_profile, log_likelihood_gradient, profile_log_probability, profile_log_probability_batch

MAX_OPTIMIZE_N = 40
MAX_TINY_N = 10
MAX_TINY_SUPPORT = 12
GRID_RESOLUTION = 64

_ASCENT_TOL = 1e-10
_ASCENT_MAX_ITER = 500
_TIE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class PmlResult:
    """Best profile-likelihood distribution found, with its log-likelihood
    and the likelihood ratio against the best candidate seen (1 for the
    incumbent itself)."""

    dist: DiscreteDistribution
    log_likelihood: float
    beta_empirical: float
    support_size_searched: range


def project_rows_to_simplex(V: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row onto the probability simplex."""
    V = np.atleast_2d(np.asarray(V, dtype=float))
    B, m = V.shape
    U = -np.sort(-V, axis=1)
    css = np.cumsum(U, axis=1)
    j = np.arange(1, m + 1)
    cond = U + (1.0 - css) / j > 0
    rho = m - 1 - np.argmax(cond[:, ::-1], axis=1)
    lam = (1.0 - css[np.arange(B), rho]) / (rho + 1.0)
    return np.maximum(V + lam[:, None], 0.0)


def _ascend_batch(profile: Profile, starts: np.ndarray):
    """Monotone projected-gradient ascent on every row of ``starts``.

    Backtracking halves the step until the log-likelihood strictly
    increases; a row retires when no uphill step remains or the gain
    drops below the tolerance.  Returns (points, log-likelihoods).
    """
    P = project_rows_to_simplex(starts)
    B = P.shape[0]
    f, g = log_likelihood_gradient(P, profile)
    step = np.ones(B)
    active = np.isfinite(f)
    for _ in range(_ASCENT_MAX_ITER):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        pending = idx.copy()
        accepted = np.zeros(B, dtype=bool)
        while pending.size:
            cand = project_rows_to_simplex(P[pending] + step[pending, None] * g[pending])
            fc = profile_log_probability_batch(cand, profile)
            # gradients are recomputed below only for rows that moved
            ok = fc > f[pending]
            moved = pending[ok]
            P[moved] = cand[ok]
            delta = fc[ok] - f[moved]
            f[moved] = fc[ok]
            accepted[moved] = True
            active[moved[delta < _ASCENT_TOL]] = False
            step[moved] = np.minimum(step[moved] * 2.0, 1e3)
            stuck = pending[~ok]
            step[stuck] *= 0.5
            dead = stuck[step[stuck] < 1e-14]
            active[dead] = False
            pending = stuck[step[stuck] >= 1e-14]
        live = np.nonzero(active & accepted)[0]
        if live.size:
            _, g_live = log_likelihood_gradient(P[live], profile)
            g[live] = g_live
    return P, f


def _starts_for_support(profile: Profile, m: int, restarts: int, seed: int) -> np.ndarray:
    """Uniform + embedded-empirical starts, then Dirichlet(1) restarts.

    The first ``restarts`` random starts are identical no matter how
    many more are requested, so adding restarts never loses ground.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed & (2**63 - 1), m]))
    starts = np.empty((restarts + 2, m))
    starts[0] = 1.0 / m
    emp = np.zeros(m)
    desc = sorted(profile.multiplicities, reverse=True)
    emp[: len(desc)] = np.asarray(desc, dtype=float) / profile.n
    starts[1] = emp
    starts[2:] = rng.dirichlet(np.ones(m), size=restarts)
    return starts


def support_sweep(profile: Profile, supports, restarts: int = 50, seed: int = 0):
    """Best distribution per candidate support size.

    Returns a list of (support, DiscreteDistribution, log_likelihood)
    for each feasible support (at least as many symbols as the profile
    has parts), in increasing support order.
    """
    out = []
    for m in supports:
        if m < profile.num_parts:
            continue
        starts = _starts_for_support(profile, m, restarts, seed)
        P, f = _ascend_batch(profile, starts)
        best = int(np.argmax(f))
        probs = P[best] / P[best].sum()
        dist = DiscreteDistribution(probs)
        ll = profile_log_probability(dist, profile)
        out.append((m, dist, ll))
    return out


def uniform_support_scan(profile: Profile, supports) -> list[tuple[int, float]]:
    """Profile log-likelihood of the uniform distribution for each
    support size; a closed-form lower bound for the optimizer."""
    ms = [m for m in supports if m >= profile.num_parts]
    if not ms:
        return []
    width = max(ms)
    rows = np.zeros((len(ms), width))
    for i, m in enumerate(ms):
        rows[i, :m] = 1.0 / m
    lls = profile_log_probability_batch(rows, profile)
    return list(zip(ms, (float(v) for v in lls)))


def _pick_incumbent(candidates):
    """Smallest support wins ties (improvements below tolerance do not
    displace the incumbent)."""
    best = None
    for m, dist, ll in candidates:
        if not math.isfinite(ll):
            continue
        if best is None or ll > best[2] + _TIE_TOL:
            best = (m, dist, ll)
    return best


def pml_optimize(profile: Profile, support_range=None, restarts: int = 50,
                 seed: int = 0) -> PmlResult:
    """Approximate profile maximum likelihood over a support-size range.

    The default range runs from the number of profile parts to
    n + ceil(n/2): the maximizer can use more symbols than were observed
    but gains vanish beyond order n.
    """
    if profile.n > MAX_OPTIMIZE_N:
        raise ValueError(f"profile length {profile.n} exceeds exact-evaluation guard {MAX_OPTIMIZE_N}")
    if support_range is None:
        support_range = range(profile.num_parts, profile.n + math.ceil(profile.n / 2) + 1)
    supports = [m for m in support_range]
    if not supports:
        raise ValueError("support_range is empty")
    feasible = [m for m in supports if m >= profile.num_parts]
    if not feasible:
        raise ValueError("no support size can realize this profile (fewer symbols than parts)")
    candidates = support_sweep(profile, feasible, restarts=restarts, seed=seed)
    best = _pick_incumbent(candidates)
    if best is None:
        raise RuntimeError("no support size produced a positive likelihood")
    _, dist, ll = best
    return PmlResult(dist=dist, log_likelihood=ll, beta_empirical=1.0,
                     support_size_searched=range(min(supports), max(supports) + 1))


@lru_cache(maxsize=4)
def _certification_grid(max_support: int) -> np.ndarray:
    """All sorted probability vectors with entries in multiples of 1/64
    and at most ``max_support`` positive parts."""
    rows = []
    part: list[int] = []

    def rec(rem, mx, left):
        if rem == 0:
            rows.append(tuple(part))
            return
        if left == 0:
            return
        for v in range(min(rem, mx), 0, -1):
            part.append(v)
            rec(rem - v, v, left - 1)
            part.pop()

    rec(GRID_RESOLUTION, GRID_RESOLUTION, max_support)
    grid = np.zeros((len(rows), max_support))
    for i, r in enumerate(rows):
        grid[i, : len(r)] = r
    grid /= GRID_RESOLUTION
    return grid


def certify_against_grid(profile: Profile, dist: DiscreteDistribution,
                         log_likelihood: float, max_support: int):
    """Check an incumbent against the full 1/64-resolution simplex grid
    over all supports up to ``max_support``.

    If a grid point beats the incumbent, ascent restarts there, so the
    returned likelihood dominates every grid value.
    """
    grid = _certification_grid(max_support)
    grid_ll = profile_log_probability_batch(grid, profile)
    top = int(np.argmax(grid_ll))
    if grid_ll[top] > log_likelihood:
        P, _ = _ascend_batch(profile, grid[top][None, :])
        polished = DiscreteDistribution(P[0] / P[0].sum())
        pll = profile_log_probability(polished, profile)
        if pll > log_likelihood:
            dist, log_likelihood = polished, pll
    if log_likelihood < grid_ll[top] - 1e-12:
        raise RuntimeError("certification failed: grid point above returned likelihood")
    return dist, log_likelihood


def pml_exact_tiny(profile: Profile, max_support: int = MAX_TINY_SUPPORT,
                   restarts: int = 50, seed: int = 0) -> PmlResult:
    """Certified profile maximum likelihood for tiny profiles.

    Multistart ascent per support size (at least 50 restarts), then the
    simplex grid certification of ``certify_against_grid``.
    """
    if profile.n > MAX_TINY_N:
        raise ValueError(f"profile length {profile.n} exceeds tiny-solver guard {MAX_TINY_N}")
    if not 1 <= max_support <= MAX_TINY_SUPPORT:
        raise ValueError(f"max_support must be in 1..{MAX_TINY_SUPPORT}")
    if max_support < profile.num_parts:
        raise ValueError("no support size can realize this profile (fewer symbols than parts)")
    restarts = max(restarts, 50)
    candidates = support_sweep(profile, range(1, max_support + 1), restarts=restarts, seed=seed)
    _, dist, ll = _pick_incumbent(candidates)
    dist, ll = certify_against_grid(profile, dist, ll, max_support)
    return PmlResult(dist=dist, log_likelihood=ll, beta_empirical=1.0,
                     support_size_searched=range(1, max_support + 1))


def beta_certificate(candidate: DiscreteDistribution, profile: Profile,
                     reference: PmlResult) -> float:
    """Likelihood ratio of a candidate against the incumbent best.

    Values above 1 mean the reference was not optimal and the caller
    should promote the candidate; an impossible profile gives 0.
    """
    ll = profile_log_probability(candidate, profile)
    if ll == -math.inf:
        return 0.0
    return math.exp(ll - reference.log_likelihood)


def pml_plugin(samples, kind: PropertyKind, support_range=None,
               restarts: int = 50, seed: int = 0) -> float:
    """Plug-in estimate: the property of the profile-likelihood maximizer
    of the sample's profile."""
    result = pml_optimize(extract_profile(samples), support_range=support_range,
                          restarts=restarts, seed=seed)
    return true_property(result.dist, kind)
