import logging
import math

import numpy as np
import pytest

from gffv import (BoxIndicator, ConfigurationError, Field, build_grid,
                  coarsen, normalize_mass, project_initial_data, total_mass)

# exact mass of the standard Gaussian over [-6, 6] (erf(6/sqrt(2)))
GAUSS_MASS_BOX6 = 0.99999999802682470992


def std_normal(x):
    return np.exp(-np.asarray(x) ** 2 / 2.0) / math.sqrt(2.0 * math.pi)


class TestBuildGrid:
    def test_paper_1d_spacing(self):
        g = build_grid((-6.0, 6.0), 600)
        assert g.dx == pytest.approx(0.02, abs=1e-15)

    def test_tiny_grid_centers(self):
        g = build_grid((0.0, 1.0), 2)
        assert g.dx == 0.5
        assert np.allclose(g.centers, [0.25, 0.75])

    def test_2d_spacing(self):
        g = build_grid(((-4.0, 4.0), (-4.0, 4.0)), (80, 80))
        assert g.dx == pytest.approx(0.1) and g.dy == pytest.approx(0.1)
        assert g.cell_volume == pytest.approx(0.01)

    @pytest.mark.parametrize("bounds,n", [((1.0, 0.0), 4), ((0.0, 1.0), 1),
                                          ((0.0, 0.0), 8)])
    def test_invalid(self, bounds, n):
        with pytest.raises(ConfigurationError):
            build_grid(bounds, n)

    def test_centers_formula(self):
        g = build_grid((-1.0, 3.0), 8)
        assert np.allclose(g.centers, -1.0 + (np.arange(8) + 0.5) * 0.5)


class TestProjection:
    def test_box_indicator_exact_overlap(self):
        g = build_grid((-4.0, 4.0), 8)
        f = project_initial_data(g, BoxIndicator((-2.0, 2.0)))
        assert np.array_equal(f.values, [0, 0, 1, 1, 1, 1, 0, 0])

    def test_box_partial_overlap(self):
        g = build_grid((0.0, 1.0), 4)
        f = project_initial_data(g, BoxIndicator((0.125, 0.5), height=2.0))
        assert np.allclose(f.values, [1.0, 2.0, 0.0, 0.0])

    def test_constant_exact(self):
        g = build_grid((-3.0, 5.0), 17)
        f = project_initial_data(g, lambda x: np.full_like(x, 0.7))
        assert np.all(f.values == 0.7)

    def test_gaussian_mass_matches_quadrature_oracle(self):
        g = build_grid((-6.0, 6.0), 600)
        f = project_initial_data(g, std_normal)
        assert total_mass(f) == pytest.approx(GAUSS_MASS_BOX6, abs=1e-6)

    def test_negative_values_clamped_with_warning(self, caplog):
        g = build_grid((-1.0, 1.0), 10)
        with caplog.at_level(logging.WARNING, logger="gffv"):
            f = project_initial_data(g, lambda x: np.sin(8 * x))
        assert np.all(f.values >= 0.0)
        assert any("clamped" in r.message for r in caplog.records)

    def test_2d_box(self):
        g = build_grid(((-4.0, 4.0), (-4.0, 4.0)), (8, 8))
        f = project_initial_data(g, BoxIndicator(((-3.0, 3.0), (-3.0, 3.0)),
                                                 height=0.25))
        assert total_mass(f) == pytest.approx(0.25 * 36.0, rel=1e-14)

    def test_2d_gaussian_mass(self):
        g = build_grid(((-6.0, 6.0), (-6.0, 6.0)), (120, 120))
        f = project_initial_data(
            g, lambda x, y: std_normal(x) * std_normal(y))
        assert total_mass(f) == pytest.approx(GAUSS_MASS_BOX6 ** 2, abs=1e-6)

    def test_mass_second_order_under_refinement(self):
        # smooth density with noticeable quadrature error on coarse cells
        dens = lambda x: np.exp(np.sin(3.0 * x)) + 0.5
        exact = None
        errs = []
        for n in (8, 16, 32):
            g = build_grid((-1.0, 1.0), n)
            errs.append(total_mass(project_initial_data(g, dens)))
        fine = total_mass(project_initial_data(build_grid((-1.0, 1.0), 512),
                                               dens))
        errs = [abs(e - fine) for e in errs]
        assert errs[1] < errs[0] / 4.0 and errs[2] < errs[1] / 4.0


class TestMass:
    def test_ones(self):
        g = build_grid((0.0, 1.0), 13)
        assert total_mass(Field(g, np.ones(13))) == pytest.approx(1.0)

    def test_box_mass(self):
        g = build_grid((-4.0, 4.0), 8)
        f = project_initial_data(g, BoxIndicator((-2.0, 2.0)))
        assert total_mass(f) == pytest.approx(4.0)

    def test_linearity(self, rng):
        g = build_grid((0.0, 2.0), 50)
        a = rng.random(50)
        b = rng.random(50)
        lhs = total_mass(Field(g, 2.0 * a + 3.0 * b))
        rhs = 2.0 * total_mass(Field(g, a)) + 3.0 * total_mass(Field(g, b))
        assert lhs == pytest.approx(rhs, rel=1e-13)

    def test_normalize(self):
        g = build_grid((0.0, 1.0), 10)
        f = normalize_mass(Field(g, np.full(10, 0.3)), 2.5)
        assert total_mass(f) == pytest.approx(2.5, rel=1e-15)

    def test_normalize_zero_mass_errors(self):
        g = build_grid((0.0, 1.0), 10)
        with pytest.raises(ConfigurationError):
            normalize_mass(Field(g, np.zeros(10)), 1.0)


class TestCoarsen:
    def test_1d_block_means(self):
        g = build_grid((0.0, 1.0), 8)
        f = Field(g, np.arange(8.0))
        c = coarsen(f, 2)
        assert np.allclose(c.values, [0.5, 2.5, 4.5, 6.5])
        assert total_mass(c) == pytest.approx(total_mass(f), rel=1e-15)

    def test_2d_block_means(self, rng):
        g = build_grid(((0.0, 1.0), (0.0, 1.0)), (8, 8))
        f = Field(g, rng.random((8, 8)))
        c = coarsen(f, 4)
        assert c.values.shape == (2, 2)
        assert total_mass(c) == pytest.approx(total_mass(f), rel=1e-14)

    def test_bad_factor(self):
        g = build_grid((0.0, 1.0), 9)
        with pytest.raises(ConfigurationError):
            coarsen(Field(g, np.ones(9)), 2)


def test_field_shape_mismatch():
    g = build_grid((0.0, 1.0), 4)
    with pytest.raises(ConfigurationError):
        Field(g, np.ones(5))
