"""Crank-Nicolson oracle for the 1D transmission problem."""

import math

import numpy as np
import pytest

from transmc import Grid1D, cn_solve, flux_jump, richardson_value
from transmc.reference1d import truncation_half_width


def indicator(x):
    return (x > 0).astype(float)


def erf_transmission(a_plus, a_minus, t, x):
    """Closed-form u(t, x) for piecewise-constant a and indicator data.

    Similarity solution A + B erf(x / sqrt(4 a_pm t)) per side with
    continuity of u and of a u' at zero.
    """
    A = math.sqrt(a_plus) / (math.sqrt(a_plus) + math.sqrt(a_minus))
    if x >= 0:
        return A + (1 - A) * math.erf(x / math.sqrt(4 * a_plus * t))
    return A + A * math.erf(x / math.sqrt(4 * a_minus * t))


class TestConstantCoefficient:
    def test_indicator_symmetry_value(self):
        g = Grid1D(8.0, 1024, 0.25 / 1024)
        sol = cn_solve((0.5, 0.5), indicator, 0.25, g)
        assert sol(0.0) == pytest.approx(0.5, abs=1e-6)

    def test_quadratic_data_exact_growth(self):
        g = Grid1D(8.0, 1024, 0.25 / 1024)
        sol = cn_solve((0.5, 0.5), lambda x: x * x, 0.25, g)
        assert sol(0.0) == pytest.approx(0.25, abs=1e-6)
        assert sol(0.5) == pytest.approx(0.5, abs=1e-6)

    def test_heat_kernel_value(self):
        g = Grid1D(8.0, 4096, 0.25 / 4096)
        sol = cn_solve((0.5, 0.5), indicator, 0.25, g)
        exact = 0.5 * (1 + math.erf(0.1 / math.sqrt(4 * 0.5 * 0.25)))
        assert sol(0.1) == pytest.approx(exact, abs=2e-6)


class TestTransmission:
    def test_matches_similarity_solution(self):
        value, agreement = richardson_value((2.0, 1.0), indicator, 1.0, 0.1,
                                            cells=4096, a_max=2.0)
        assert agreement <= 1e-6
        assert value == pytest.approx(erf_transmission(2.0, 1.0, 1.0, 0.1), abs=1e-6)

    def test_boundary_truncation_is_negligible(self):
        half = truncation_half_width(1.0, 2.0, 0.1)
        a = cn_solve((2.0, 1.0), indicator, 1.0, Grid1D(half, 2048, 1.0 / 2048))(0.1)
        b = cn_solve((2.0, 1.0), indicator, 1.0, Grid1D(2 * half, 4096, 1.0 / 2048))(0.1)
        assert abs(a - b) < 1e-8

    def test_maximum_principle_and_positivity(self):
        g = Grid1D(10.0, 2048, 1.0 / 2048)
        sol = cn_solve((2.0, 1.0), indicator, 1.0, g)
        assert np.min(sol.values) >= -1e-12
        assert np.max(sol.values) <= 1.0 + 1e-12

    def test_self_convergence_second_order(self):
        half = truncation_half_width(1.0, 2.0, 0.1)
        sols = [
            cn_solve((2.0, 1.0), indicator, 1.0, Grid1D(half, m, 1.0 / m))
            for m in (512, 1024, 2048)
        ]
        # Compare on the common (coarsest) nodes.
        x = sols[0].grid.x
        d1 = np.max(np.abs(sols[0].values - sols[1](x)))
        d2 = np.max(np.abs(sols[1](x) - sols[2](x)))
        assert 3.5 <= d1 / d2 <= 4.5


class TestFluxJump:
    def test_continuous_coefficient_small_jump(self):
        g = Grid1D(8.0, 2048, 0.25 / 2048)
        sol = cn_solve((0.5, 0.5), lambda x: np.tanh(x), 0.25, g)
        assert abs(flux_jump(sol)) <= 1e-10

    def test_constant_solution_exact_zero(self):
        g = Grid1D(8.0, 512, 0.25 / 512)
        sol = cn_solve((2.0, 1.0), lambda x: np.ones_like(x), 0.25, g)
        assert flux_jump(sol) == 0.0

    def test_second_order_decay_across_resolutions(self):
        half = truncation_half_width(1.0, 2.0, 0.0)
        jumps = [
            abs(flux_jump(cn_solve((2.0, 1.0), indicator, 1.0, Grid1D(half, m, 1.0 / m))))
            for m in (1024, 2048)
        ]
        assert jumps[0] / jumps[1] >= 3.5


class TestValidation:
    def test_grid_requires_even_cells(self):
        with pytest.raises(ValueError):
            Grid1D(8.0, 1023, 1e-3)

    def test_dt_must_divide_horizon(self):
        with pytest.raises(ValueError):
            cn_solve((1.0, 1.0), indicator, 1.0, Grid1D(8.0, 64, 0.3))
