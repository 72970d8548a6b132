"""Pointwise values and randomized properties of the scalar nonlinearities."""

import numpy as np
import pytest

from sparselms.proximal import l0_attractor, rza_attractor, shrink, za_attractor

N_CASES = 10_000


class TestShrinkValues:
    def test_positive_above_threshold(self):
        assert shrink(0.7, 0.5) == 0.7 - 0.5

    def test_dead_zone(self):
        assert shrink(-0.3, 0.5) == 0.0

    def test_negative_below_threshold(self):
        assert shrink(-1.2, 0.5) == -0.7

    def test_zero_threshold_is_identity(self):
        x = np.linspace(-5, 5, 101)
        np.testing.assert_array_equal(shrink(x, 0.0), x)

    def test_vector_componentwise(self):
        out = shrink(np.array([0.7, -0.3, -1.2]), 0.5)
        np.testing.assert_allclose(out, [0.2, 0.0, -0.7])

    def test_out_argument(self):
        a = np.array([1.0, -2.0, 0.1])
        buf = np.empty(3)
        res = shrink(a, 0.5, out=buf)
        assert res is buf
        np.testing.assert_array_equal(buf, shrink(a, 0.5))

    def test_negative_gamma_rejected(self):
        with pytest.raises(ValueError, match="gamma"):
            shrink(1.0, -0.1)

    def test_non_finite_rejected(self):
        for bad in (np.nan, np.inf, -np.inf):
            with pytest.raises(ValueError, match="non-finite"):
                shrink(bad, 0.5)
        with pytest.raises(ValueError, match="non-finite"):
            shrink(np.array([0.0, np.nan]), 0.5)


class TestShrinkProperties:
    """Randomized invariants, vectorized over >= 10**4 cases."""

    def setup_method(self):
        rng = np.random.default_rng(2024)
        self.a = rng.uniform(-10, 10, size=N_CASES)
        self.b = rng.uniform(-10, 10, size=N_CASES)
        self.gamma = rng.uniform(0, 3, size=N_CASES)

    def test_odd(self):
        np.testing.assert_array_equal(
            shrink(-self.a, 0.7), -shrink(self.a, 0.7)
        )

    def test_nonexpansive(self):
        for g in (0.0, 0.3, 1.5):
            lhs = np.abs(shrink(self.a, g) - shrink(self.b, g))
            assert np.all(lhs <= np.abs(self.a - self.b) + 1e-15)

    def test_magnitude_identity(self):
        # |shrink(a, g)| equals max(|a| - g, 0), not merely bounds it
        out = np.abs(shrink(self.a, 1.2))
        np.testing.assert_allclose(out, np.maximum(np.abs(self.a) - 1.2, 0.0))

    def test_zero_iff_dead_zone(self):
        out = shrink(self.a, 1.0)
        assert np.array_equal(out == 0.0, np.abs(self.a) <= 1.0)

    def test_scalar_matches_vector_path(self):
        for i in range(0, N_CASES, 97):
            a, g = float(self.a[i]), float(self.gamma[i])
            vec = shrink(np.array([a]), g)[0]
            assert shrink(a, g) == vec


class TestZaAttractor:
    def test_values(self):
        assert za_attractor(2.5) == -1.0
        assert za_attractor(0.0) == 0.0
        assert za_attractor(-0.01) == 1.0

    def test_odd_and_opposing(self):
        rng = np.random.default_rng(7)
        z = rng.uniform(-5, 5, size=N_CASES)
        h = za_attractor(z)
        np.testing.assert_array_equal(za_attractor(-z), -h)
        assert np.all(z * h <= 0.0)
        assert np.all(np.abs(h) <= 1.0)


class TestRzaAttractor:
    def test_values(self):
        assert rza_attractor(0.1, 10.0) == pytest.approx(-0.5)
        assert rza_attractor(0.0, 10.0) == 0.0
        assert rza_attractor(-1.0, 10.0) == pytest.approx(1.0 / 11.0)

    def test_requires_positive_eps(self):
        with pytest.raises(ValueError, match="eps"):
            rza_attractor(1.0, 0.0)

    def test_odd_bounded_opposing(self):
        rng = np.random.default_rng(8)
        z = rng.uniform(-20, 20, size=N_CASES)
        for eps in (0.1, 1.0, 10.0):
            h = rza_attractor(z, eps)
            np.testing.assert_allclose(rza_attractor(-z, eps), -h, rtol=0, atol=0)
            assert np.all(z * h <= 0.0)
            assert np.all(np.abs(h) <= 1.0)

    def test_magnitude_nonincreasing_in_abs_z(self):
        # away from the sign discontinuity at z=0
        z = np.linspace(1e-9, 50.0, N_CASES)
        mag = np.abs(rza_attractor(z, 3.0))
        assert np.all(np.diff(mag) <= 0.0)


class TestL0Attractor:
    def test_values(self):
        assert l0_attractor(0.1, 5.0) == pytest.approx(-2.5)
        assert l0_attractor(0.3, 5.0) == 0.0
        assert l0_attractor(-0.1, 5.0) == pytest.approx(2.5)
        assert l0_attractor(0.0, 5.0) == 0.0

    def test_requires_positive_alpha(self):
        with pytest.raises(ValueError, match="alpha"):
            l0_attractor(1.0, 0.0)

    def test_zero_outside_interval_and_at_boundary(self):
        for alpha in (0.5, 3.0, 7.0):
            edge = 1.0 / alpha
            assert l0_attractor(edge, alpha) == 0.0
            assert l0_attractor(-edge, alpha) == 0.0
            z = np.linspace(edge, 10 * edge, N_CASES)
            assert np.all(l0_attractor(z, alpha) == 0.0)

    def test_odd_and_opposing(self):
        rng = np.random.default_rng(9)
        z = rng.uniform(-2, 2, size=N_CASES)
        for alpha in (0.9, 5.0):
            h = l0_attractor(z, alpha)
            np.testing.assert_array_equal(l0_attractor(-z, alpha), -h)
            assert np.all(z * h <= 1e-18)

    def test_continuity_near_boundary(self):
        alpha = 5.0
        inside = np.nextafter(1.0 / alpha, 0.0)
        assert abs(l0_attractor(inside, alpha)) < 1e-12
