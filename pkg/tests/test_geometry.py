"""Geometry: side classification, oblique projections, crossing map."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transmc import (
    ConormalField,
    LevelSetInterface,
    NotInTube,
    PlanarInterface,
    Side,
    TangentField,
    algebraic_distance,
    crossing_correction,
    paper_example_2d,
    piecewise_constant_1d,
    project_oblique,
)

FIELD = paper_example_2d()
IFACE = FIELD.interface
GAMMA_PLUS = ConormalField(FIELD, +1)
GAMMA_MINUS = ConormalField(FIELD, -1)


class TestSide:
    def test_benchmark_examples(self):
        assert IFACE.side((0.0, 0.5)) is Side.PLUS
        assert IFACE.side((0.0, -0.5)) is Side.MINUS
        assert IFACE.side((1.0, 0.0)) is Side.ON

    def test_signed_distance_is_exact_for_hyperplane(self):
        rng = np.random.default_rng(0)
        pts = rng.uniform(-3, 3, size=(1000, 2))
        np.testing.assert_allclose(IFACE.signed_normal_distance(pts), pts[:, 1], rtol=0, atol=0)

    @given(
        x=st.floats(-50, 50), y=st.floats(-50, 50),
        nx=st.floats(-2, 2), ny=st.floats(0.1, 2), b=st.floats(-5, 5),
    )
    @settings(max_examples=200, deadline=None)
    def test_side_sign_matches_normal_coordinate(self, x, y, nx, ny, b):
        iface = PlanarInterface(normal=(nx, ny), offset=b)
        fnu = iface.signed_normal_distance((x, y))
        code = int(iface.side_code(np.array([[x, y]]))[0])
        if fnu > 1e-13 * (1 + abs(x) + abs(y)):
            assert code == 1
        elif fnu < -1e-13 * (1 + abs(x) + abs(y)):
            assert code == -1

    def test_normal_is_unit_and_points_to_plus(self):
        iface = PlanarInterface(normal=(3.0, 4.0), offset=1.0)
        n = iface.unit_normal((0.2, 0.2))
        assert np.isclose(np.linalg.norm(n), 1.0)
        probe = np.array([0.2, 0.2]) + 0.1 * n
        assert iface.signed_normal_distance(probe) > iface.signed_normal_distance((0.2, 0.2))


class TestProjectOblique:
    def test_benchmark_crossing_point(self):
        # gamma_plus on the interface is the constant (2, 2.5).
        foot = project_oblique(IFACE, (0.1, -0.05), GAMMA_PLUS)
        assert foot.factor == pytest.approx(-0.02, abs=1e-15)
        np.testing.assert_allclose(foot.foot, [0.14, 0.0], atol=1e-15)
        assert foot.field_tag == "gamma_plus"

    def test_on_interface_gives_zero_factor(self):
        foot = project_oblique(IFACE, (0.7, 0.0), GAMMA_PLUS)
        assert foot.factor == 0.0
        np.testing.assert_allclose(foot.foot, [0.7, 0.0], atol=0)

    def test_one_dimensional_scalar_field(self):
        field1 = piecewise_constant_1d(2.0, 1.0)
        foot = project_oblique(field1.interface, np.array([-0.06]), ConormalField(field1, +1))
        assert foot.factor == pytest.approx(-0.03, abs=1e-15)
        assert foot.foot[0] == pytest.approx(0.0, abs=1e-15)

    def test_reconstruction_residual_planar(self):
        # 1e5 random points in the (infinite) tube, both co-normal fields.
        rng = np.random.default_rng(42)
        pts = rng.uniform(-1, 1, size=(100_000, 2))
        for g in (GAMMA_PLUS, GAMMA_MINUS):
            res = project_oblique(IFACE, pts, g)
            recon = res.foot + res.factor[:, None] * np.asarray(g(res.foot))
            err = np.sqrt(np.sum((pts - recon) ** 2, axis=1))
            assert np.all(err <= 1e-12 * (1 + np.sqrt(np.sum(pts * pts, axis=1))))

    def test_sign_convention_from_opposite_side(self):
        # Projecting minus-side points along gamma_plus gives F <= 0 and
        # vice versa.
        rng = np.random.default_rng(7)
        below = np.column_stack([rng.uniform(-1, 1, 5000), rng.uniform(-1, -1e-9, 5000)])
        above = np.column_stack([rng.uniform(-1, 1, 5000), rng.uniform(1e-9, 1, 5000)])
        assert np.all(project_oblique(IFACE, below, GAMMA_PLUS).factor <= 0)
        assert np.all(project_oblique(IFACE, above, GAMMA_MINUS).factor <= 0)

    def test_tangent_field_rejected(self):
        def tangent(y):
            out = np.zeros_like(y)
            out[:, 0] = 1.0
            return out

        with pytest.raises(TangentField):
            project_oblique(IFACE, (0.1, -0.05), tangent)

    def test_unit_normal_field_gives_signed_distance(self):
        res = algebraic_distance(IFACE, (0.3, -0.4), IFACE.unit_normal)
        assert res == pytest.approx(-0.4, abs=1e-15)


class TestAlgebraicDistance:
    def test_benchmark_value(self):
        val = algebraic_distance(IFACE, (0.1, -0.05), GAMMA_PLUS)
        assert val == pytest.approx(-0.02 * np.sqrt(2**2 + 2.5**2), abs=1e-14)

    def test_zero_on_interface(self):
        assert algebraic_distance(IFACE, (0.2, 0.0), GAMMA_PLUS) == 0.0

    def test_equivalent_to_distance_within_constant(self):
        rng = np.random.default_rng(3)
        pts = np.column_stack([rng.uniform(-1, 1, 2000), rng.uniform(-0.9, -1e-6, 2000)])
        dist = np.abs(IFACE.signed_normal_distance(pts))
        alg = np.abs(algebraic_distance(IFACE, pts, GAMMA_PLUS))
        ratio = alg / dist
        c1 = 2 * FIELD.Lam / FIELD.lam
        assert np.all(ratio <= c1) and np.all(ratio >= 1 / c1)


class TestCrossingCorrection:
    def test_benchmark_example(self):
        xbar = crossing_correction(IFACE, (0.1, -0.05), GAMMA_PLUS, GAMMA_MINUS)
        np.testing.assert_allclose(
            xbar, [0.14 - 0.02 * np.sqrt(3.0) / 8.0, -0.0225], rtol=0, atol=1e-15
        )
        # Planar distance rescaling: d(xbar)/d(xhat) = <nu,a_minus nu>/<nu,a_plus nu>.
        assert abs(xbar[1]) / 0.05 == pytest.approx((9 / 8) / 2.5, rel=1e-12)

    def test_identity_for_continuous_coefficient(self):
        cont = piecewise_constant_1d(1.7, 1.7)
        x = np.array([-0.04])
        out = crossing_correction(cont.interface, x, ConormalField(cont, +1), ConormalField(cont, -1))
        assert out[0] == pytest.approx(-0.04, abs=1e-12)

    def test_one_dimensional_ratio(self):
        field1 = piecewise_constant_1d(2.0, 1.0)
        # Crossing from the minus side: xhat > 0, project along gamma_minus.
        xhat = np.array([0.18284271])
        out = crossing_correction(
            field1.interface, xhat, ConormalField(field1, -1), ConormalField(field1, +1)
        )
        assert out[0] == pytest.approx(2.0 * 0.18284271, rel=1e-12)

    def test_side_preserved_on_synthetic_crossings(self):
        rng = np.random.default_rng(11)
        m = 100_000
        below = np.column_stack([rng.uniform(-1, 1, m), rng.uniform(-0.5, -1e-12, m)])
        out = crossing_correction(IFACE, below, GAMMA_PLUS, GAMMA_MINUS)
        assert np.all(out[:, 1] < 0)
        above = np.column_stack([rng.uniform(-1, 1, m), rng.uniform(1e-12, 0.5, m)])
        out = crossing_correction(IFACE, above, GAMMA_MINUS, GAMMA_PLUS)
        assert np.all(out[:, 1] > 0)

    def test_distance_ratio_within_ellipticity_bounds(self):
        rng = np.random.default_rng(12)
        m = 20_000
        below = np.column_stack([rng.uniform(-1, 1, m), rng.uniform(-0.5, -1e-9, m)])
        out = crossing_correction(IFACE, below, GAMMA_PLUS, GAMMA_MINUS)
        ratio = np.abs(out[:, 1]) / np.abs(below[:, 1])
        lo = FIELD.lam / (2 * FIELD.Lam)
        hi = 2 * FIELD.Lam / FIELD.lam
        assert np.all(ratio >= lo) and np.all(ratio <= hi)


class TestLevelSet:
    """Circle interface phi = x^2 + y^2 - 1 (Plus region outside)."""

    @staticmethod
    def _circle():
        return LevelSetInterface(
            phi=lambda p: np.sum(p * p, axis=-1) - 1.0,
            grad=lambda p: 2.0 * p,
            dim=2,
            tube_radius=0.35,
        )

    def test_signed_distance_and_side(self):
        iface = self._circle()
        assert iface.signed_normal_distance((1.2, 0.0)) == pytest.approx(0.2, abs=1e-10)
        assert iface.signed_normal_distance((0.0, 0.8)) == pytest.approx(-0.2, abs=1e-10)
        assert iface.side((1.5, 0.0)) is Side.PLUS
        assert iface.side((0.3, 0.0)) is Side.MINUS

    def test_oblique_projection_residual(self):
        iface = self._circle()

        def skew_field(y):
            # Transversal but not normal: normal plus a tangential part.
            n = y / np.sqrt(np.sum(y * y, axis=-1))[:, None]
            t = np.column_stack([-n[:, 1], n[:, 0]])
            return n + 0.4 * t

        rng = np.random.default_rng(5)
        angles = rng.uniform(0, 2 * np.pi, 500)
        radii = rng.uniform(0.75, 1.25, 500)
        pts = np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])
        res = iface.project_oblique(pts, skew_field)
        on_gamma = np.abs(np.sum(res.foot * res.foot, axis=1) - 1.0)
        assert np.max(on_gamma) <= 1e-9
        recon = res.foot + res.factor[:, None] * skew_field(res.foot)
        assert np.max(np.sqrt(np.sum((pts - recon) ** 2, axis=1))) <= 1e-9

    def test_not_in_tube(self):
        iface = self._circle()
        with pytest.raises(NotInTube):
            iface.project_oblique((2.0, 0.0), lambda y: y)
