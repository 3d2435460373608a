"""Tests for the periodic spectral toolbox.

Oracle strategy: single trigonometric modes have closed-form derivatives,
norms, and brackets, so every operator is checked against those exact
values; structural identities (antisymmetry, tangency, zero divergence,
zero box integral) are checked on generic smooth fields.
"""

import numpy as np
import pytest

from emhd25.spectral import (
    Field,
    Grid,
    dealias,
    derivative,
    divergence,
    gradient_perp,
    laplacian,
    poisson_bracket,
    sobolev_norm,
    sobolev_norm_vector,
)


@pytest.fixture(scope="module")
def g64():
    return Grid(n=64, L=1.0)


def _mode(grid, jx, jy, phase=0.0):
    """Real plane wave cos(k.(x,y) + phase) with k = (jx, jy) * pi / L."""
    X, Y = grid.meshes()
    kx = jx * np.pi / grid.L
    ky = jy * np.pi / grid.L
    return Field.from_values(grid, np.cos(kx * X + ky * Y + phase) + 0.0 * (X + Y))


def _smooth_random(grid, seed, scale=1.0):
    """Band-limited random field with zero mean."""
    rng = np.random.default_rng(seed)
    X, Y = grid.meshes()
    vals = np.zeros((grid.n, grid.n))
    for _ in range(6):
        jx, jy = rng.integers(-4, 5, size=2)
        if jx == 0 and jy == 0:
            continue
        amp = rng.normal()
        vals = vals + amp * np.cos(jx * np.pi * X / grid.L + jy * np.pi * Y / grid.L
                                   + rng.uniform(0, 2 * np.pi))
    return Field.from_values(grid, scale * vals)


class TestGridValidation:
    def test_power_of_two_required(self):
        with pytest.raises(ValueError, match="power of two"):
            Grid(n=100, L=1.0)

    def test_minimum_size(self):
        with pytest.raises(ValueError):
            Grid(n=8, L=1.0)

    def test_positive_box(self):
        with pytest.raises(ValueError):
            Grid(n=64, L=0.0)
        with pytest.raises(ValueError):
            Grid(n=64, L=-2.0)

    def test_dx_and_area(self, g64):
        assert g64.dx == pytest.approx(2.0 / 64, rel=1e-15)
        assert g64.dx**2 * g64.n**2 == pytest.approx(4.0, rel=1e-13)

    def test_cell_measure_turns_coefficient_sums_into_integrals(self, g64):
        f = _smooth_random(g64, 20)
        physical = np.sum(f.values**2) * g64.dx**2
        spectral = np.sum(np.abs(f.coefficients) ** 2) * g64.cell_measure
        assert spectral == pytest.approx(physical, rel=1e-12)

    def test_polar_meshes_match_cartesian(self, g64):
        X, Y = g64.meshes()
        R, TH = g64.polar_meshes()
        assert np.allclose(R, np.hypot(X + 0.0 * Y, Y + 0.0 * X), atol=1e-15)
        assert np.allclose(R * np.cos(TH), X + 0.0 * Y, atol=1e-14)


class TestRoundTrip:
    def test_values_to_coefficients_and_back(self, g64):
        rng = np.random.default_rng(7)
        vals = rng.normal(size=(64, 64))
        f = Field.from_values(g64, vals)
        back = Field.from_coefficients(g64, f.coefficients)
        assert np.max(np.abs(back.values - vals)) <= 1e-12 * np.max(np.abs(vals))

    def test_grid_shape_enforced(self, g64):
        with pytest.raises(ValueError, match="shape"):
            Field.from_values(g64, np.zeros((64, 32)))

    def test_field_arithmetic(self, g64):
        f = _smooth_random(g64, 1)
        h = _smooth_random(g64, 2)
        assert np.allclose((f + h).values, f.values + h.values, atol=1e-14)
        assert np.allclose((f - h).values, f.values - h.values, atol=1e-14)
        assert np.allclose((2.5 * f).values, 2.5 * f.values, atol=1e-14)


class TestDerivatives:
    def test_single_mode_x_derivative(self, g64):
        k0 = 2 * np.pi / g64.L * 1.0  # j = 2 mode
        X, Y = g64.meshes()
        f = Field.from_values(g64, np.sin(k0 * X) + 0.0 * Y)
        dfx = derivative(f, 1, 0)
        exact = k0 * np.cos(k0 * X) + 0.0 * Y
        assert np.max(np.abs(dfx.values - exact)) <= 1e-12 * k0

    def test_mixed_derivative(self, g64):
        X, Y = g64.meshes()
        kx, ky = np.pi / g64.L, 2 * np.pi / g64.L
        f = Field.from_values(g64, np.sin(kx * X) * np.cos(ky * Y))
        dxy = derivative(f, 1, 1)
        exact = -kx * ky * np.cos(kx * X) * np.sin(ky * Y)
        assert np.max(np.abs(dxy.values - exact)) <= 1e-11 * kx * ky

    def test_laplacian_single_mode(self, g64):
        f = _mode(g64, 3, 1)
        k2 = (3**2 + 1**2) * (np.pi / g64.L) ** 2
        assert np.max(np.abs(laplacian(f).values + k2 * f.values)) <= 1e-11 * k2

    def test_gradient_perp_is_tangent_to_level_sets(self, g64):
        f = _smooth_random(g64, 3)
        gp = gradient_perp(f)
        gx = derivative(f, 1, 0)
        gy = derivative(f, 0, 1)
        dot = gp.x.values * gx.values + gp.y.values * gy.values
        scale = np.max(gx.values**2 + gy.values**2)
        assert np.max(np.abs(dot)) <= 1e-13 * scale

    def test_gradient_perp_is_divergence_free(self, g64):
        f = _smooth_random(g64, 4)
        div = divergence(gradient_perp(f))
        scale = np.max(np.abs(f.values))
        assert np.max(np.abs(div.values)) <= 1e-10 * scale


class TestDealias:
    def test_kills_modes_beyond_cutoff(self, g64):
        # j = 28 of 32 exceeds the two-thirds cutoff
        f = _mode(g64, 28, 0)
        assert np.max(np.abs(dealias(f).values)) <= 1e-13

    def test_preserves_low_modes(self, g64):
        f = _mode(g64, 3, 2)
        assert np.max(np.abs(dealias(f).values - f.values)) <= 1e-13

    def test_idempotent(self, g64):
        f = _smooth_random(g64, 5)
        once = dealias(f)
        twice = dealias(once)
        assert np.array_equal(once.coefficients, twice.coefficients)


class TestPoissonBracket:
    def test_antisymmetry(self, g64):
        f = _smooth_random(g64, 6)
        h = _smooth_random(g64, 7)
        fg = poisson_bracket(f, h)
        gf = poisson_bracket(h, f)
        scale = np.max(np.abs(fg.values)) + 1e-300
        assert np.max(np.abs(fg.values + gf.values)) <= 1e-12 * scale

    def test_single_mode_pair_against_closed_form(self, g64):
        X, Y = g64.meshes()
        k0 = np.pi / g64.L
        f = Field.from_values(g64, np.sin(k0 * X) + 0.0 * Y)
        h = Field.from_values(g64, np.sin(k0 * Y) + 0.0 * X)
        br = poisson_bracket(f, h)
        exact = k0**2 * np.cos(k0 * X) * np.cos(k0 * Y)
        assert np.max(np.abs(br.values - exact)) <= 1e-10 * k0**2

    def test_box_integral_vanishes(self, g64):
        f = _smooth_random(g64, 8)
        h = _smooth_random(g64, 9)
        br = poisson_bracket(f, h)
        integral = np.sum(br.values) * g64.dx**2
        scale = np.max(np.abs(br.values)) + 1e-300
        assert abs(integral) <= 1e-12 * scale

    def test_radial_pair_bracket_vanishes(self, radial_pair):
        br = poisson_bracket(radial_pair.a, radial_pair.b)
        assert np.max(np.abs(br.values)) <= 1e-10

    def test_self_bracket_vanishes(self, g64):
        f = _smooth_random(g64, 10)
        br = poisson_bracket(f, f)
        scale = np.max(np.abs(f.values)) ** 2 + 1e-300
        assert np.max(np.abs(br.values)) <= 1e-11 * scale


class TestSobolevNorms:
    def test_single_mode_l2(self, g64):
        # cos(k.x) has L2 norm sqrt(area / 2)
        f = _mode(g64, 2, 0)
        area = (2 * g64.L) ** 2
        assert sobolev_norm(f, 0.0, homogeneous=False) \
            == pytest.approx(np.sqrt(area / 2), rel=1e-12)

    def test_single_mode_homogeneous_scaling(self, g64):
        f = _mode(g64, 3, 4)
        k = 5 * np.pi / g64.L  # |k| of the (3, 4) mode
        l2 = sobolev_norm(f, 0.0, homogeneous=True)
        for s in (-1.0, 0.5, 2.0, 3.5):
            assert sobolev_norm(f, s, homogeneous=True) \
                == pytest.approx(k**s * l2, rel=1e-11)

    def test_single_mode_inhomogeneous_scaling(self, g64):
        f = _mode(g64, 3, 4)
        k = 5 * np.pi / g64.L
        l2 = sobolev_norm(f, 0.0, homogeneous=False)
        for s in (1.0, 2.5):
            assert sobolev_norm(f, s, homogeneous=False) \
                == pytest.approx((1 + k**2) ** (s / 2) * l2, rel=1e-11)

    def test_parseval_quadrature_vs_multiplier(self, g64):
        f = _smooth_random(g64, 11)
        quad = np.sqrt(np.sum(f.values**2) * g64.dx**2)
        assert sobolev_norm(f, 0.0, homogeneous=False) == pytest.approx(quad, rel=1e-10)

    def test_monotone_in_s_when_energy_sits_above_one(self, g64):
        f = _mode(g64, 2, 1) + _mode(g64, 4, 3)
        norms = [sobolev_norm(f, s, homogeneous=True) for s in (0.0, 1.0, 2.0, 3.0)]
        assert all(n1 < n2 for n1, n2 in zip(norms, norms[1:]))

    def test_negative_order_requires_mean_free(self, g64):
        X, Y = g64.meshes()
        f = Field.from_values(g64, 1.0 + np.cos(np.pi * X / g64.L) + 0.0 * Y)
        with pytest.raises(ValueError, match="mean-free"):
            sobolev_norm(f, -1.0, homogeneous=True)

    def test_zero_order_flavors_agree(self, g64):
        f = _smooth_random(g64, 12)
        assert sobolev_norm(f, 0.0, homogeneous=True) \
            == pytest.approx(sobolev_norm(f, 0.0, homogeneous=False), rel=1e-12)

    def test_vector_norm_is_component_hypot(self, g64):
        f = _smooth_random(g64, 13)
        vf = gradient_perp(f)
        expect = np.hypot(sobolev_norm(vf.x, 1.5, homogeneous=False),
                          sobolev_norm(vf.y, 1.5, homogeneous=False))
        assert sobolev_norm_vector(vf, 1.5, homogeneous=False) \
            == pytest.approx(expect, rel=1e-12)
