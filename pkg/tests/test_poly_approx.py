"""Polynomial approximation quality and falling-factorial estimation."""

import numpy as np
import pytest
from scipy import stats

from symprop import AbsShift, NegYLogY, PolynomialApprox, best_poly_approx, falling_factorial_estimate
from symprop.poly_approx import falling_factorial_table


def exact_binomial_expectation(approx, n, p):
    """E[falling-factorial estimate] under Binomial(n, p), by summing all
    n+1 outcomes; independent of the estimator's own arithmetic."""
    total = 0.0
    for count in range(n + 1):
        total += stats.binom.pmf(count, n, p) * falling_factorial_estimate(approx, count, n)
    return total


def count_alternations(target, approx, within=0.01, grid=20001):
    lo, hi = approx.interval
    xs = np.linspace(lo, hi, grid)
    err = target(xs) - approx.evaluate(xs)
    floor = (1 - within) * approx.sup_error
    count, last = 0, 0
    for v in err:
        s = np.sign(v)
        if abs(v) >= floor and s != 0 and s != last:
            count += 1
            last = s
    return count


class TestBestPolyApprox:
    def test_abs_degree_one_is_constant_half(self):
        approx = best_poly_approx(AbsShift(0.0), (-1.0, 1.0), 1)
        assert approx.coeffs[0] == pytest.approx(0.5, abs=1e-9)
        assert approx.coeffs[1] == pytest.approx(0.0, abs=1e-9)
        assert approx.sup_error == pytest.approx(0.5, rel=1e-6)

    def test_rejects_degenerate_interval(self):
        with pytest.raises(ValueError):
            best_poly_approx(NegYLogY(), (0.3, 0.3), 3)
        with pytest.raises(ValueError):
            best_poly_approx(NegYLogY(), (0.5, 0.1), 3)

    def test_rejects_excessive_degree(self):
        with pytest.raises(ValueError):
            best_poly_approx(NegYLogY(), (0.0, 1.0), 41)

    def test_neg_y_log_y_quadratic_rate(self):
        # max deviation falls like 1/L^2; the scaled sequence stays bounded
        for L in (2, 4, 8, 16):
            approx = best_poly_approx(NegYLogY(), (0.0, 1.0), L)
            assert approx.sup_error * L * L <= 0.3

    def test_sup_error_is_honest(self):
        approx = best_poly_approx(NegYLogY(), (0.0, 0.5), 4)
        xs = np.linspace(0.0, 0.5, 3000)
        dev = np.abs(NegYLogY()(xs) - approx.evaluate(xs)).max()
        assert dev <= approx.sup_error * (1 + 1e-6)

    @pytest.mark.parametrize("L", [1, 2, 3, 4, 5])
    def test_equioscillation(self, L):
        target = AbsShift(0.0)
        approx = best_poly_approx(target, (-1.0, 1.0), L)
        assert count_alternations(target, approx) >= L + 2

    @pytest.mark.parametrize("L", [1, 2, 4, 6, 8])
    @pytest.mark.parametrize("c", [0.0, 0.3])
    def test_coefficient_magnitude(self, L, c):
        approx = best_poly_approx(AbsShift(c), (-1.0, 1.0), L)
        assert max(abs(b) for b in approx.coeffs) <= 2.0 ** (3 * L)

    def test_interval_scaling(self):
        # -y log y on [0, a] has minimax error a * (error on [0, 1])
        base = best_poly_approx(NegYLogY(), (0.0, 1.0), 5).sup_error
        scaled = best_poly_approx(NegYLogY(), (0.0, 0.25), 5).sup_error
        assert scaled == pytest.approx(0.25 * base, rel=2e-2)


class TestFallingFactorialEstimate:
    def test_linear_term_is_empirical_frequency(self):
        approx = PolynomialApprox(1, (0.0, 1.0), (0.0, 1.0), 0.0)
        for n, count in [(10, 0), (10, 3), (7, 7)]:
            assert falling_factorial_estimate(approx, count, n) == pytest.approx(count / n)

    def test_quadratic_expectation_by_enumeration(self):
        # all eight length-3 coin sequences: E[N(N-1)/6] = 1/4 = p^2
        approx = PolynomialApprox(2, (0.0, 0.0, 1.0), (0.0, 1.0), 0.0)
        total = 0.0
        for bits in range(8):
            count = bin(bits).count("1")
            total += (1 / 8) * falling_factorial_estimate(approx, count, 3)
        assert total == pytest.approx(0.25, rel=1e-12)

    def test_zero_count_gives_constant(self):
        approx = PolynomialApprox(3, (0.0, 0.4, -2.0, 5.0), (0.0, 1.0), 0.0)
        assert falling_factorial_estimate(approx, 0, 9) == 0.0
        shifted = PolynomialApprox(3, (1.25, 0.4, -2.0, 5.0), (0.0, 1.0), 0.0)
        assert falling_factorial_estimate(shifted, 0, 9) == 1.25

    def test_rejects_count_above_n(self):
        approx = PolynomialApprox(1, (0.0, 1.0), (0.0, 1.0), 0.0)
        with pytest.raises(ValueError):
            falling_factorial_estimate(approx, 5, 4)

    def test_unbiasedness_sampled(self):
        rng = np.random.default_rng(123)
        for _ in range(10):
            L = rng.integers(1, 7)
            n = rng.integers(L, 13)
            coeffs = tuple(rng.uniform(-3, 3, size=L + 1))
            approx = PolynomialApprox(int(L), coeffs, (0.0, 1.0), 0.0)
            p = rng.choice(np.arange(0.0, 1.01, 0.1))
            want = float(np.polynomial.polynomial.polyval(p, np.asarray(coeffs)))
            assert exact_binomial_expectation(approx, int(n), float(p)) == pytest.approx(want, abs=1e-10)

    def test_table_matches_scalar(self):
        approx = PolynomialApprox(3, (0.5, 1.0, -0.7, 0.2), (0.0, 1.0), 0.0)
        table = falling_factorial_table(approx, 12, 12)
        for count in range(13):
            assert table[count] == pytest.approx(falling_factorial_estimate(approx, count, 12), rel=1e-14)
        dropped = falling_factorial_table(approx, 12, 12, drop_constant=True)
        np.testing.assert_allclose(dropped, table - 0.5, rtol=1e-14)
