"""Numpy implementation of the profile-likelihood kernels.

Both kernels evaluate the monomial symmetric sum

    m(p) = sum over ways of assigning the multiplicity parts to
           distinct symbols of  prod_x p(x)^(part assigned to x)

for a multiplicity multiset given as distinct values ``mu`` with
repetition counts ``counts``.  The sum runs over unordered assignments
(parts of equal value are interchangeable), so the profile probability
is ``n! / prod(parts!) * m(p)``.

Evaluation is a dynamic program over symbols: the state tracks how many
parts of each distinct value have been placed so far, and each symbol
either takes one part or none.  All quantities are nonnegative, so the
per-row running rescale keeps the recursion in range and the result is
returned in log space.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"


def _plan(mu, counts):
    """Precompute the DP state lattice for a multiplicity multiset.

    Returns (nstates, transitions, pair_lists) where transitions is a
    list of (state, part-class, predecessor-state) in descending state
    order and pair_lists[j] are the (prefix, suffix) state index pairs
    whose digit vectors sum to the full state minus one part of class j.
    """
    counts = np.asarray(counts, dtype=np.int64)
    d = len(counts)
    strides = np.ones(d, dtype=np.int64)
    for j in range(1, d):
        strides[j] = strides[j - 1] * (counts[j - 1] + 1)
    nstates = int(strides[-1] * (counts[-1] + 1))

    digits = np.zeros((nstates, d), dtype=np.int64)
    r = np.arange(nstates)
    for j in range(d):
        digits[:, j] = (r // strides[j]) % (counts[j] + 1)

    transitions = []
    for s in range(nstates - 1, -1, -1):
        for j in range(d):
            if digits[s, j] > 0:
                transitions.append((s, j, s - int(strides[j])))

    full = nstates - 1
    pair_lists = []
    for j in range(d):
        target = full - int(strides[j])
        td = digits[target]
        mask = np.all(digits <= td, axis=1)
        a_idx = np.nonzero(mask)[0]
        pair_lists.append((a_idx, target - a_idx))
    return nstates, transitions, pair_lists


def _forward(probs, mu, nstates, transitions, keep_prefix=False):
    """Run the DP over symbols; returns final scaled table and log scale.

    With ``keep_prefix`` the per-prefix tables and scales are returned
    for gradient assembly.
    """
    B, S = probs.shape
    F = np.zeros((B, nstates))
    F[:, 0] = 1.0
    logscale = np.zeros(B)
    prefixes = [(F.copy(), logscale.copy())] if keep_prefix else None
    mu_f = np.asarray(mu, dtype=float)
    for i in range(S):
        pw = probs[:, i, None] ** mu_f[None, :]
        for s, j, prev in transitions:
            F[:, s] += pw[:, j] * F[:, prev]
        mx = F.max(axis=1)
        alive = mx > 0
        F[alive] /= mx[alive, None]
        logscale[alive] += np.log(mx[alive])
        if keep_prefix:
            prefixes.append((F.copy(), logscale.copy()))
    return (F, logscale, prefixes) if keep_prefix else (F, logscale, None)


def msp_log_batch(probs, mu, counts):
    """Log of the monomial symmetric sum for each row of ``probs``.

    probs: (B, S) nonnegative, rows need not sum to one.
    Returns (B,) array; -inf where the sum is zero (more parts than
    positive symbols).
    """
    probs = np.atleast_2d(np.asarray(probs, dtype=float))
    nstates, transitions, _ = _plan(mu, counts)
    F, logscale, _ = _forward(probs, mu, nstates, transitions)
    final = F[:, -1]
    out = np.full(len(final), -np.inf)
    pos = final > 0
    out[pos] = np.log(final[pos]) + logscale[pos]
    return out


def msp_log_grad_batch(probs, mu, counts):
    """(log m, d log m / d p) for each row of ``probs``.

    Gradient rows are zero where the value is -inf.
    """
    probs = np.atleast_2d(np.asarray(probs, dtype=float))
    B, S = probs.shape
    mu = np.asarray(mu, dtype=np.int64)
    nstates, transitions, pair_lists = _plan(mu, counts)

    _, _, fwd = _forward(probs, mu, nstates, transitions, keep_prefix=True)
    _, _, bwd_r = _forward(probs[:, ::-1], mu, nstates, transitions, keep_prefix=True)

    Ffull, lsF = fwd[S]
    final = Ffull[:, -1]
    logm = np.full(B, -np.inf)
    pos = final > 0
    logm[pos] = np.log(final[pos]) + lsF[pos]

    grad = np.zeros((B, S))
    mu_f = mu.astype(float)
    for i in range(S):
        Fi, lsi = fwd[i]
        Bi, lsb = bwd_r[S - 1 - i]
        tot = np.zeros(B)
        for j in range(len(mu)):
            a_idx, b_idx = pair_lists[j]
            conv = np.einsum("ba,ba->b", Fi[:, a_idx], Bi[:, b_idx])
            tot += mu_f[j] * probs[:, i] ** (mu_f[j] - 1.0) * conv
        scale = np.zeros(B)
        scale[pos] = np.clip((lsi + lsb)[pos] - logm[pos], -745.0, 700.0)
        grad[:, i] = np.where(pos & (tot > 0), tot * np.exp(scale), 0.0)
    return logm, grad
