import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracrd.grid import Field, Grid2D, Space, dst1, eigenvalues, first_eigenfunction
from fracrd.operator import FractionalDiffusion, inner, lift_to_homogeneous, unlift


def field(grid, values, space=Space.PHYSICAL):
    return Field(grid, np.asarray(values, dtype=np.float64), space)


def random_field(grid, seed, low=-1.0, high=1.0):
    return field(grid, np.random.default_rng(seed).uniform(low, high, grid.shape))


class TestConstruction:
    @pytest.mark.parametrize("alpha", [0.0, -0.2, 1.5])
    def test_rejects_alpha(self, alpha):
        with pytest.raises(ValueError, match="alpha"):
            FractionalDiffusion(Grid2D.square(1.0, 4), alpha)

    def test_rejects_negative_r(self):
        with pytest.raises(ValueError):
            FractionalDiffusion(Grid2D.square(1.0, 4), 0.5, r=-1.0)

    def test_rejects_non_finite_g(self):
        with pytest.raises(ValueError):
            FractionalDiffusion(Grid2D.square(1.0, 4), 0.5, g=math.inf)

    def test_symbol_is_eigenvalue_power(self):
        g = Grid2D(1.0, 2.0, 6, 5)
        op = FractionalDiffusion(g, 0.3, r=2.5)
        np.testing.assert_allclose(op.symbol, eigenvalues(g) ** 0.3, rtol=1e-15)
        np.testing.assert_allclose(op.multipliers, 2.5 * eigenvalues(g) ** 0.3, rtol=1e-15)

    def test_symbol_read_only(self):
        op = FractionalDiffusion(Grid2D.square(1.0, 4), 0.5)
        with pytest.raises(ValueError):
            op.symbol[0, 0] = 0.0


class TestApply:
    def test_first_mode_eigenvalue(self):
        g = Grid2D.square(2.0, 32)
        op = FractionalDiffusion(g, 0.75)
        phi = first_eigenfunction(g)
        out = op.apply(phi).values
        np.testing.assert_allclose(out, (math.pi**2 / 2) ** 0.75 * phi.values, rtol=1e-12, atol=1e-12)

    def test_alpha_one_matches_discrete_laplacian_on_mode(self):
        # the symbol is the continuous eigenvalue, so a pure mode sees exactly k^2 pi^2 terms
        g = Grid2D.square(1.0, 16)
        op = FractionalDiffusion(g, 1.0)
        i = np.arange(1, 17)[:, None]
        j = np.arange(1, 17)[None, :]
        m = np.sin(3 * np.pi * i / 17) * np.sin(2 * np.pi * j / 17)
        np.testing.assert_allclose(op.apply(field(g, m)).values, 13 * np.pi**2 * m, atol=1e-11)

    def test_spectral_input_stays_spectral(self):
        g = Grid2D.square(1.0, 4)
        op = FractionalDiffusion(g, 0.5)
        out = op.apply(field(g, np.ones(g.shape), Space.SPECTRAL))
        assert out.space is Space.SPECTRAL
        np.testing.assert_allclose(out.values, op.symbol)

    def test_scaled_apply(self):
        g = Grid2D.square(1.0, 8)
        op = FractionalDiffusion(g, 0.6, r=0.01)
        f = random_field(g, 0)
        np.testing.assert_allclose(op.scaled_apply(f).values, 0.01 * op.apply(f).values, rtol=1e-12, atol=1e-15)

    def test_rejects_non_finite(self):
        g = Grid2D.square(1.0, 4)
        v = np.ones(g.shape)
        v[0, 0] = np.inf
        with pytest.raises(ValueError):
            FractionalDiffusion(g, 0.5).apply(Field(g, v, Space.SPECTRAL))


class TestSemigroup:
    def test_first_mode_decay_mpmath(self):
        g = Grid2D.square(2.0, 32)
        op = FractionalDiffusion(g, 0.75)
        phi = first_eigenfunction(g)
        expected = float(mpmath.exp(-mpmath.mpf("5e-3") * (mpmath.pi**2 / 2) ** mpmath.mpf("0.75")))
        out = op.semigroup_apply(5e-3, phi).values
        np.testing.assert_allclose(out, expected * phi.values, rtol=1e-12)

    def test_time_zero_is_identity_copy(self):
        g = Grid2D.square(1.0, 5)
        f = random_field(g, 1)
        out = FractionalDiffusion(g, 0.5).semigroup_apply(0.0, f)
        np.testing.assert_array_equal(out.values, f.values)
        assert out.values is not f.values

    def test_rejects_negative_time(self):
        g = Grid2D.square(1.0, 4)
        with pytest.raises(ValueError):
            FractionalDiffusion(g, 0.5).semigroup_apply(-1.0, random_field(g, 0))

    def test_decay_factors_cached(self):
        op = FractionalDiffusion(Grid2D.square(1.0, 4), 0.5)
        assert op.decay_factors(0.1) is op.decay_factors(0.1)


grids = st.builds(lambda n, m, L: Grid2D(L, 1.0, n, m),
                  st.integers(2, 20), st.integers(2, 20), st.floats(0.5, 4.0))
alphas = st.floats(0.05, 1.0)
seeds = st.integers(0, 2**32 - 1)


class TestOperatorProperties:
    @settings(max_examples=30, deadline=None)
    @given(grids, alphas, seeds)
    def test_self_adjoint(self, g, alpha, seed):
        op = FractionalDiffusion(g, alpha)
        f, h = random_field(g, seed), random_field(g, seed + 1)
        lhs, rhs = inner(op.apply(f), h), inner(f, op.apply(h))
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(grids, alphas, seeds)
    def test_coercive_lower_bound(self, g, alpha, seed):
        op = FractionalDiffusion(g, alpha)
        f = random_field(g, seed)
        assert inner(op.apply(f), f) >= op.lambda1_alpha * inner(f, f) * (1 - 1e-12)

    @settings(max_examples=30, deadline=None)
    @given(grids, st.floats(0.05, 0.5), st.floats(0.05, 0.5), seeds)
    def test_exponents_compose(self, g, a, b, seed):
        f = random_field(g, seed)
        two = FractionalDiffusion(g, a).apply(FractionalDiffusion(g, b).apply(f)).values
        one = FractionalDiffusion(g, a + b).apply(f).values
        np.testing.assert_allclose(two, one, rtol=1e-9, atol=1e-9 * np.abs(one).max())

    @settings(max_examples=30, deadline=None)
    @given(grids, alphas, st.floats(0.0, 1.0), st.floats(0.0, 1.0), seeds)
    def test_semigroup_law(self, g, alpha, s, t, seed):
        op = FractionalDiffusion(g, alpha)
        f = random_field(g, seed)
        two = op.semigroup_apply(t, op.semigroup_apply(s, f)).values
        one = op.semigroup_apply(s + t, f).values
        np.testing.assert_allclose(two, one, atol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(grids, alphas, st.floats(0.0, 2.0), seeds)
    def test_l2_contraction(self, g, alpha, t, seed):
        op = FractionalDiffusion(g, alpha)
        f = random_field(g, seed)
        out = op.semigroup_apply(t, f)
        bound = math.exp(-t * op.lambda1_alpha) * math.sqrt(inner(f, f))
        assert math.sqrt(inner(out, out)) <= bound * (1 + 1e-12) + 1e-15

    @settings(max_examples=30, deadline=None)
    @given(st.integers(4, 32), alphas, st.sampled_from([1e-3, 1e-2, 1e-1, 1.0]), seeds)
    def test_positivity_on_small_grids(self, n, alpha, t, seed):
        g = Grid2D.square(1.0, n)
        f = random_field(g, seed, 0.0, 1.0)
        out = FractionalDiffusion(g, alpha).semigroup_apply(t, f).values
        assert out.min() >= -1e-12 * out.max()

    @settings(max_examples=20, deadline=None)
    @given(grids, alphas, seeds)
    def test_comparison(self, g, alpha, seed):
        # f <= h pointwise should give S f <= S h up to roundoff
        op = FractionalDiffusion(g, alpha)
        f = random_field(g, seed)
        h = field(g, f.values + np.random.default_rng(seed).uniform(0, 1, g.shape))
        diff = op.semigroup_apply(0.05, h).values - op.semigroup_apply(0.05, f).values
        assert diff.min() >= -1e-12


class TestLifting:
    def test_shift(self):
        g = Grid2D.square(1.0, 3)
        u = field(g, np.full(g.shape, 1.5))
        w = lift_to_homogeneous(u, 1.0)
        np.testing.assert_allclose(w.values, 0.5)

    @settings(max_examples=20, deadline=None)
    @given(seeds, st.floats(-10, 10))
    def test_roundtrip(self, seed, gval):
        g = Grid2D.square(1.0, 6)
        u = random_field(g, seed)
        back = unlift(lift_to_homogeneous(u, gval), gval).values
        np.testing.assert_allclose(back, u.values, atol=1e-14 * (1 + abs(gval)))

    def test_rejects_spectral(self):
        g = Grid2D.square(1.0, 3)
        s = field(g, np.zeros(g.shape), Space.SPECTRAL)
        with pytest.raises(ValueError):
            lift_to_homogeneous(s, 1.0)
        with pytest.raises(ValueError):
            unlift(s, 1.0)


class TestInner:
    def test_matches_midpoint_sum(self):
        g = Grid2D(1.0, 2.0, 7, 9)
        f, h = random_field(g, 4), random_field(g, 5)
        assert inner(f, h) == pytest.approx((f.values * h.values).sum() * g.cell_area, rel=1e-12)

    def test_accepts_spectral(self):
        g = Grid2D.square(1.0, 5)
        f = random_field(g, 6)
        fs = field(g, dst1(f.values), Space.SPECTRAL)
        assert inner(fs, f) == pytest.approx(inner(f, f), rel=1e-13)

    def test_rejects_mixed_grids(self):
        with pytest.raises(ValueError):
            inner(random_field(Grid2D.square(1.0, 4), 0), random_field(Grid2D.square(2.0, 4), 0))
