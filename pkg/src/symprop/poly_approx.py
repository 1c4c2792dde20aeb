"""Near-minimax polynomial approximation and unbiased polynomial estimation.

``best_poly_approx`` produces a near-best uniform approximation on an
interval by Chebyshev interpolation refined with Remez-style exchange
iterations.  ``falling_factorial_estimate`` turns such a polynomial into
an unbiased estimator of sum_i b_i p^i from a binomial count: the
falling-factorial moments satisfy E[(N)_i] = (n)_i p^i when
N ~ Binomial(n, p), so  sum_i b_i (N)_i / (n)_i  has expectation equal
to the polynomial evaluated at p (degree up to n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_DEGREE = 40


@dataclass(frozen=True)
class NegYLogY:
    """Target -y log y (0 at y = 0)."""

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        m = y > 0
        out[m] = -y[m] * np.log(y[m])
        return out


@dataclass(frozen=True)
class AbsShift:
    """Target |y - c|."""

    c: float

    def __call__(self, y):
        return np.abs(np.asarray(y, dtype=float) - self.c)


@dataclass(frozen=True)
class PolynomialApprox:
    """Monomial coefficients b_0..b_L in the original variable, with the
    fitted interval and the max deviation measured on a dense grid."""

    degree: int
    coeffs: tuple[float, ...]
    interval: tuple[float, float]
    sup_error: float

    def __post_init__(self):
        if len(self.coeffs) != self.degree + 1:
            raise ValueError("coeffs must have degree + 1 entries")
        if self.sup_error < 0:
            raise ValueError("sup_error must be nonnegative")

    def evaluate(self, y):
        return np.polynomial.polynomial.polyval(np.asarray(y, dtype=float), np.asarray(self.coeffs))


def _chebyshev_reference(L: int, lo: float, hi: float) -> np.ndarray:
    k = np.arange(L + 2)
    t = np.cos(np.pi * k / (L + 1))[::-1]
    return lo + (hi - lo) * (t + 1.0) / 2.0


def _alternating_extrema(err: np.ndarray) -> list[int]:
    """Indices of an alternating-sign chain of local error extrema,
    keeping the largest magnitude within each same-sign run."""
    idx = [0]
    for i in range(1, len(err) - 1):
        if (err[i] - err[i - 1]) * (err[i + 1] - err[i]) <= 0:
            idx.append(i)
    idx.append(len(err) - 1)
    chain: list[int] = []
    for i in idx:
        if chain and np.sign(err[i]) == np.sign(err[chain[-1]]):
            if abs(err[i]) > abs(err[chain[-1]]):
                chain[-1] = i
        else:
            chain.append(i)
    return chain


def best_poly_approx(target, interval: tuple[float, float], degree: int,
                     grid: int = 4000, max_iter: int = 60,
                     level_tol: float = 1e-3) -> PolynomialApprox:
    """Near-minimax degree-L polynomial for the target on [lo, hi].

    Chebyshev-node interpolation provides the starting reference; each
    exchange iteration solves for a levelled-error polynomial on the
    reference, then moves the reference to the observed error extrema.
    Iteration stops when the alternation heights agree within
    ``level_tol`` relative.  Coefficients are computed internally in the
    Chebyshev basis of the scaled variable and converted to monomials of
    the original variable at the end.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ValueError("interval must satisfy lo < hi")
    if not 0 <= degree <= MAX_DEGREE:
        raise ValueError(f"degree must be in 0..{MAX_DEGREE}")

    xs = np.linspace(lo, hi, grid)
    fx = target(xs)
    scale = max(float(np.abs(fx).max()), 1e-300)
    mid, half = (lo + hi) / 2.0, (hi - lo) / 2.0
    ref = _chebyshev_reference(degree, lo, hi)
    coef = np.zeros(degree + 1)
    err = fx.copy()

    for _ in range(max_iter):
        t_ref = (ref - mid) / half
        V = np.polynomial.chebyshev.chebvander(t_ref, degree)
        signs = ((-1.0) ** np.arange(degree + 2))[:, None]
        A = np.hstack([V, signs])
        try:
            sol = np.linalg.solve(A, target(ref))
        except np.linalg.LinAlgError:
            break
        coef = sol[:-1]
        err = fx - np.polynomial.chebyshev.chebval((xs - mid) / half, coef)
        chain = _alternating_extrema(err)
        while len(chain) > degree + 2:
            if abs(err[chain[0]]) < abs(err[chain[-1]]):
                chain.pop(0)
            else:
                chain.pop()
        if len(chain) < degree + 2:
            break
        ref = xs[chain]
        heights = np.abs(err[chain])
        if heights.max() < 1e-14 * scale:
            break
        if heights.max() - heights.min() <= level_tol * heights.max():
            break

    sup_error = float(np.abs(err).max())
    series = np.polynomial.chebyshev.Chebyshev(coef, domain=[lo, hi])
    mono = series.convert(kind=np.polynomial.polynomial.Polynomial)
    b = np.zeros(degree + 1)
    b[: len(mono.coef)] = mono.coef
    return PolynomialApprox(degree=degree, coeffs=tuple(float(v) for v in b),
                            interval=(lo, hi), sup_error=sup_error)


def falling_factorial_ratios(counts, n: int, degree: int) -> np.ndarray:
    """Table R[c, i] = (c)_i / (n)_i for each count c and i = 0..degree."""
    counts = np.asarray(counts, dtype=float)
    out = np.zeros((counts.size, degree + 1))
    out[:, 0] = 1.0
    ratio = np.ones_like(counts)
    for i in range(1, degree + 1):
        ratio = ratio * np.maximum(counts - i + 1, 0.0) / (n - i + 1)
        out[:, i] = ratio
    return out


def falling_factorial_estimate(approx: PolynomialApprox, count: int, n: int) -> float:
    """Unbiased estimate of the polynomial at the unknown success
    probability, from a Binomial(n, p) count.  b_0 enters as a constant."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= count <= n:
        raise ValueError("count must be in 0..n")
    ratios = falling_factorial_ratios(np.array([count]), n, approx.degree)[0]
    return float(np.dot(np.asarray(approx.coeffs), ratios))


def falling_factorial_table(approx: PolynomialApprox, n: int, max_count: int,
                            drop_constant: bool = False) -> np.ndarray:
    """Vectorized ``falling_factorial_estimate`` for counts 0..max_count."""
    coeffs = np.asarray(approx.coeffs, dtype=float).copy()
    if drop_constant:
        coeffs[0] = 0.0
    ratios = falling_factorial_ratios(np.arange(max_count + 1), n, approx.degree)
    return ratios @ coeffs
