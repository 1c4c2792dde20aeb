"""Distribution constructors, sampling, and exact property values."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symprop import (DiscreteDistribution, PropertyKind, make_two_step, make_uniform,
                     make_zipf, parse_dist_spec, sample, true_property)
from symprop.distributions import distance_to_uniform_value, entropy_nats


class TestConstructors:
    def test_uniform(self):
        np.testing.assert_allclose(make_uniform(2).probs, [0.5, 0.5])
        np.testing.assert_allclose(make_uniform(5).probs, [0.2] * 5)
        np.testing.assert_allclose(make_uniform(1).probs, [1.0])

    def test_uniform_rejects_zero(self):
        with pytest.raises(ValueError):
            make_uniform(0)

    def test_zipf_hand_normalized(self):
        np.testing.assert_allclose(make_zipf(2, 1.0).probs, [2 / 3, 1 / 3], rtol=1e-15)
        np.testing.assert_allclose(make_zipf(3, 0.0).probs, make_uniform(3).probs)
        c = 1.0 / (1 + 1 / 4 + 1 / 9 + 1 / 16)
        np.testing.assert_allclose(make_zipf(4, 2.0).probs, [c, c / 4, c / 9, c / 16], rtol=1e-14)

    def test_two_step(self):
        d = make_two_step(4, 3.0)
        np.testing.assert_allclose(d.probs, [3 / 8, 3 / 8, 1 / 8, 1 / 8])
        np.testing.assert_allclose(make_two_step(6, 1.0).probs, make_uniform(6).probs)

    def test_validation(self):
        with pytest.raises(ValueError):
            DiscreteDistribution(np.array([0.7, 0.4]))
        with pytest.raises(ValueError):
            DiscreteDistribution(np.array([1.2, -0.2]))
        with pytest.raises(ValueError):
            DiscreteDistribution(np.array([]))

    def test_probs_are_read_only(self):
        d = make_uniform(3)
        with pytest.raises(ValueError):
            d.probs[0] = 0.9

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**31), k=st.integers(1, 30))
    def test_normalization_invariant(self, seed, k):
        probs = np.random.default_rng(seed).dirichlet(np.ones(k))
        d = DiscreteDistribution(probs)
        assert abs(d.probs.sum() - 1.0) <= 1e-12

    def test_parse_dist_spec(self):
        assert parse_dist_spec("uniform:7").dim == 7
        np.testing.assert_allclose(parse_dist_spec("zipf:2:1").probs, [2 / 3, 1 / 3])
        assert parse_dist_spec("twostep:10:4").dim == 10
        for bad in ("uniform", "zipf:3", "gauss:1", "uniform:x", ""):
            with pytest.raises(ValueError):
                parse_dist_spec(bad)


class TestSampling:
    def test_point_mass(self):
        d = make_uniform(1)
        assert list(sample(d, 12, seed=99)) == [0] * 12

    def test_law_of_large_numbers(self):
        s = sample(make_uniform(2), 100_000, seed=4)
        assert abs((s == 0).mean() - 0.5) < 0.01

    def test_determinism(self):
        d = make_zipf(50, 1.0)
        a = sample(d, 1000, seed=123)
        b = sample(d, 1000, seed=123)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, sample(d, 1000, seed=124))

    def test_zero_probability_symbols_never_drawn(self):
        d = DiscreteDistribution(np.array([0.5, 0.0, 0.5]))
        s = sample(d, 20_000, seed=8)
        assert not np.any(s == 1)

    def test_labels(self):
        d = DiscreteDistribution(np.array([1.0]), support_labels=(42,))
        assert list(sample(d, 3, seed=0)) == [42, 42, 42]

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            sample(make_uniform(2), 0, seed=1)


class TestTrueProperty:
    def test_uniform_entropy(self):
        for k in (1, 2, 10, 1000):
            assert true_property(make_uniform(k), PropertyKind.entropy()) == pytest.approx(math.log(k))

    def test_point_mass_distance_to_uniform(self):
        d = make_uniform(1)
        for k in (2, 10, 1000):
            got = true_property(d, PropertyKind.distance_to_uniform(k))
            assert got == pytest.approx(2 * (1 - 1 / k), rel=1e-14)

    def test_coverage_hand_value(self):
        got = true_property(make_uniform(2), PropertyKind.support_coverage(2))
        assert got == pytest.approx(1.5, rel=1e-15)

    def test_support_size_counts_positives(self):
        d = DiscreteDistribution(np.array([0.5, 0.0, 0.5]))
        assert true_property(d, PropertyKind.support_size()) == 2

    def test_coverage_rejects_zero_horizon(self):
        with pytest.raises(ValueError):
            PropertyKind.support_coverage(0)

    def test_dtu_rejects_small_alphabet(self):
        with pytest.raises(ValueError):
            distance_to_uniform_value(make_uniform(5).probs, 3)

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**31), k=st.integers(1, 25))
    def test_entropy_bounds(self, seed, k):
        d = DiscreteDistribution(np.random.default_rng(seed).dirichlet(np.ones(k)))
        h = true_property(d, PropertyKind.entropy())
        assert -1e-12 <= h <= math.log(d.support_size()) + 1e-12

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**31), k=st.integers(1, 15), m=st.integers(1, 30))
    def test_coverage_bounds_and_monotonicity(self, seed, k, m):
        d = DiscreteDistribution(np.random.default_rng(seed).dirichlet(np.ones(k)))
        s_m = true_property(d, PropertyKind.support_coverage(m))
        assert -1e-12 <= s_m <= min(m, d.support_size()) + 1e-12
        s_next = true_property(d, PropertyKind.support_coverage(m + 1))
        assert s_next >= s_m - 1e-12

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**31), k=st.integers(2, 20))
    def test_dtu_bounds(self, seed, k):
        probs = np.random.default_rng(seed).dirichlet(np.ones(k))
        v = distance_to_uniform_value(probs, k)
        assert -1e-12 <= v <= 2 * (1 - 1 / k) + 1e-12

    def test_entropy_extremes(self):
        assert entropy_nats(np.array([1.0])) == 0.0
        assert entropy_nats(np.array([0.5, 0.5])) == pytest.approx(math.log(2), rel=1e-15)
