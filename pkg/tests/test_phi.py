import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracrd.phi import TAYLOR_RADIUS, _direct, _taylor, phi_eval

def phi_mp(j, z):
    # enough digits to survive the cancellation in e^z - partial sum for tiny |z|
    with mpmath.workdps(120):
        z = mpmath.mpf(z)
        if z == 0:
            return float(1 / mpmath.factorial(j))
        partial = sum(z**k / mpmath.factorial(k) for k in range(j))
        return float((mpmath.exp(z) - partial) / z**j)


Z_GRID = [-1e-12, -1e-8, -1e-4, -0.1, -0.5, -0.999, -1.0, -1.001, -2.0, -7.5, -30.0, -1e3, -1e6]


class TestAgainstHighPrecision:
    @pytest.mark.parametrize("j", [1, 2, 3])
    @pytest.mark.parametrize("z", Z_GRID)
    def test_relative_error(self, j, z):
        assert phi_eval(j, z) == pytest.approx(phi_mp(j, z), rel=1e-13)

    @pytest.mark.parametrize("j", [1, 2, 3])
    def test_vectorised_matches_scalar(self, j):
        zs = np.array(Z_GRID)
        np.testing.assert_array_equal(phi_eval(j, zs), [phi_eval(j, z) for z in Z_GRID])


class TestValues:
    @pytest.mark.parametrize("j,expected", [(1, 1.0), (2, 0.5), (3, 1 / 6)])
    def test_at_zero(self, j, expected):
        assert phi_eval(j, 0.0) == expected

    def test_phi1_minus_one(self):
        assert phi_eval(1, -1.0) == pytest.approx(1 - math.exp(-1), rel=1e-15)
        assert phi_eval(1, -1.0) == pytest.approx(0.6321205588285577, abs=1e-15)

    @pytest.mark.parametrize("j", [1, 2, 3])
    def test_large_negative_limit(self, j):
        # phi_j(z) ~ -1/((j-1)! z) as z -> -inf
        z = -1e8
        assert phi_eval(j, z) == pytest.approx(-1 / (math.factorial(j - 1) * z), rel=1e-7)

    def test_scalar_returns_float(self):
        assert isinstance(phi_eval(2, -0.3), float)

    def test_shape_preserved(self):
        out = phi_eval(1, np.zeros((3, 4)))
        assert out.shape == (3, 4)


class TestBranches:
    @pytest.mark.parametrize("j", [1, 2, 3])
    def test_continuity_at_radius(self, j):
        z = np.array([-TAYLOR_RADIUS])
        assert abs(_taylor(j, z)[0] - _direct(j, z)[0]) <= 1e-13 * _direct(j, z)[0]

    @pytest.mark.parametrize("j", [1, 2, 3])
    def test_no_jump_across_radius(self, j):
        eps = 1e-12
        inside, outside = phi_eval(j, -TAYLOR_RADIUS + eps), phi_eval(j, -TAYLOR_RADIUS - eps)
        # the slope is below 1/2 on [-1, 0], so a jump-free pair differs by < 2 eps
        assert abs(inside - outside) < 2 * eps


class TestProperties:
    @settings(max_examples=200, deadline=None)
    @given(st.floats(-1e6, -1e-3))
    def test_recurrence(self, z):
        for j in (1, 2):
            lhs = phi_eval(j + 1, z)
            rhs = (phi_eval(j, z) - 1 / math.factorial(j)) / z
            assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-15)

    @pytest.mark.parametrize("j", [1, 2])
    def test_recurrence_log_grid(self, j):
        # away from z = 0 the recurrence itself is well conditioned
        z = -np.logspace(-2, 6, 400)
        np.testing.assert_allclose(phi_eval(j + 1, z), (phi_eval(j, z) - 1 / math.factorial(j)) / z, rtol=1e-10)

    @pytest.mark.parametrize("j", [1, 2, 3])
    def test_positive_and_increasing(self, j):
        z = -np.logspace(6, -8, 600)
        p = phi_eval(j, z)
        assert (p > 0).all()
        assert (np.diff(p) >= 0).all()
        assert p.max() <= 1 / math.factorial(j)


class TestErrors:
    def test_rejects_index(self):
        with pytest.raises(ValueError, match="index"):
            phi_eval(4, -1.0)

    def test_rejects_positive(self):
        with pytest.raises(ValueError, match="z <= 0"):
            phi_eval(1, np.array([-1.0, 0.5]))

    @pytest.mark.parametrize("bad", [math.nan, -math.inf])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(ValueError, match="non-finite"):
            phi_eval(1, bad)
