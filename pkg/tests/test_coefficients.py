"""Coefficient branches, Cholesky factors, drifts, co-normals, blends."""

import dataclasses
import math

import numpy as np
import pytest

from transmc import (
    CoefficientField,
    ConormalField,
    NotPositiveDefinite,
    PlanarInterface,
    build_preset,
    chol_spd_lower,
    constant_field,
    paper_example_2d,
    piecewise_constant_1d,
    regularize,
)

FIELD = paper_example_2d()
SQ3 = math.sqrt(3.0)


def disc_points(rng, m, r_max=1.0):
    ang = rng.uniform(0, 2 * np.pi, m)
    rad = r_max * np.sqrt(rng.uniform(0, 1, m))
    return np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])


class TestEvaluate:
    def test_plus_branch_at_origin(self):
        np.testing.assert_allclose(FIELD.evaluate((0.0, 0.0)), [[2.5, 2.0], [2.0, 2.5]], atol=0)

    def test_minus_branch_value(self):
        got = FIELD.evaluate((0.0, -0.1))
        want = [[1.28, SQ3 / 8], [SQ3 / 8, 1.03]]
        np.testing.assert_allclose(got, want, rtol=1e-15)

    def test_constant_identity_field(self):
        f = constant_field(2, 1.0)
        rng = np.random.default_rng(0)
        pts = rng.normal(size=(100, 2))
        np.testing.assert_array_equal(f.evaluate(pts), np.broadcast_to(np.eye(2), (100, 2, 2)))

    def test_on_interface_uses_plus_branch(self):
        np.testing.assert_allclose(FIELD.evaluate((0.3, 0.0)), [[2.5, 2.0], [2.0, 2.5]], atol=0)

    def test_branches_symmetric(self):
        rng = np.random.default_rng(1)
        pts = disc_points(rng, 1000)
        for fn in (FIELD.a_plus, FIELD.a_minus):
            mats = fn(pts)
            np.testing.assert_allclose(mats, np.swapaxes(mats, -1, -2), rtol=1e-14)


class TestCholesky:
    def test_benchmark_factor_at_origin(self):
        sig = FIELD.sigma((0.0, 0.0))
        want = [[np.sqrt(5.0), 0.0], [4.0 / np.sqrt(5.0), np.sqrt(1.8)]]
        np.testing.assert_allclose(sig, want, rtol=1e-15)
        np.testing.assert_allclose(sig, [[2.2360680, 0.0], [1.7888544, 1.3416408]], atol=5e-8)

    def test_half_identity_gives_identity(self):
        f = constant_field(2, 0.5)
        np.testing.assert_allclose(f.sigma((0.3, 0.2)), np.eye(2), atol=0)

    def test_round_trip_both_branches(self):
        rng = np.random.default_rng(2)
        for y_range in [(1e-9, 1.0), (-1.0, -1e-9)]:
            pts = np.column_stack([rng.uniform(-1, 1, 10_000), rng.uniform(*y_range, 10_000)])
            sig = FIELD.sigma(pts)
            a2 = 2.0 * FIELD.evaluate(pts)
            resid = np.linalg.norm(sig @ np.swapaxes(sig, -1, -2) - a2, axis=(1, 2))
            assert np.all(resid <= 1e-12 * np.linalg.norm(a2, axis=(1, 2)))

    def test_generic_fallback_matches_analytic(self):
        bare = dataclasses.replace(FIELD, sigma_plus=None, sigma_minus=None)
        rng = np.random.default_rng(3)
        pts = disc_points(rng, 500)
        np.testing.assert_allclose(bare.sigma(pts), FIELD.sigma(pts), rtol=1e-12, atol=1e-14)

    def test_not_positive_definite_raises(self):
        with pytest.raises(NotPositiveDefinite):
            chol_spd_lower(np.array([[[1.0, 2.0], [2.0, 1.0]]]))


class TestDrift:
    def test_benchmark_values(self):
        np.testing.assert_array_equal(FIELD.drift((0.2, 0.4)), [0.0, 0.25])
        np.testing.assert_array_equal(FIELD.drift((0.2, -0.4)), [0.0, 0.95])

    def test_constant_field_zero_drift(self):
        np.testing.assert_array_equal(constant_field(2, 2.0).drift((0.5, -0.5)), [0.0, 0.0])

    def test_fd_fallback_matches_analytic(self):
        bare = dataclasses.replace(FIELD, da_plus=None, da_minus=None)
        rng = np.random.default_rng(4)
        pts = disc_points(rng, 200)
        np.testing.assert_allclose(bare.drift(pts), FIELD.drift(pts), atol=1e-9)

    def test_fd_richardson_second_order(self):
        # Branch entries affine in x2 make FD exact, so use a curved field.
        def a_sin(x):
            out = np.empty((x.shape[0], 2, 2))
            c = 1.5 + 0.2 * np.sin(x[:, 1])
            out[:, 0, 0] = c
            out[:, 1, 1] = c
            out[:, 0, 1] = 0.1
            out[:, 1, 0] = 0.1
            return out

        field = CoefficientField(
            interface=PlanarInterface(normal=(0.0, 1.0)),
            a_plus=a_sin, a_minus=a_sin, lam=1.0, Lam=2.0,
        )
        pts = np.array([[0.3, 0.7], [-0.2, 1.4], [0.0, -0.6]])
        exact = np.zeros((3, 2))
        exact[:, 1] = 0.2 * np.cos(pts[:, 1])
        errs = []
        for delta in (1e-3, 5e-4):
            fd = np.zeros((3, 2))
            for i in range(2):
                shift = np.zeros_like(pts)
                shift[:, i] = delta
                fd += (a_sin(pts + shift)[:, i, :] - a_sin(pts - shift)[:, i, :]) / (2 * delta)
            errs.append(np.max(np.abs(fd - exact)))
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.2)


class TestConormals:
    def test_benchmark_values(self):
        np.testing.assert_allclose(FIELD.conormal_plus((0.7, 0.0)), [2.0, 2.5], atol=0)
        np.testing.assert_allclose(FIELD.conormal_minus((0.14, 0.0)), [-SQ3 / 8, -9 / 8], rtol=1e-15)

    def test_identity_coefficient(self):
        f = constant_field(2, 1.0)
        np.testing.assert_allclose(f.conormal_plus((0.5, 0.0)), [0.0, 1.0], atol=0)
        np.testing.assert_allclose(f.conormal_minus((0.5, 0.0)), [0.0, -1.0], atol=0)

    def test_transversality_bound_on_interface_sample(self):
        xs = np.linspace(-1, 1, 1000)
        pts = np.column_stack([xs, np.zeros_like(xs)])
        nu = FIELD.interface.unit_normal(pts)
        gp = FIELD.conormal_plus(pts)
        gm = FIELD.conormal_minus(pts)
        assert np.all(np.sum(gp * nu, axis=1) >= FIELD.lam)
        assert np.all(np.sum(gm * nu, axis=1) <= -FIELD.lam)

    def test_conormal_field_tags(self):
        assert ConormalField(FIELD, +1).tag == "gamma_plus"
        assert ConormalField(FIELD, -1).tag == "gamma_minus"


class TestRegularized:
    def test_matches_raw_field_outside_band(self):
        reg = regularize(FIELD, 0.1)
        pts = np.array([[0.3, 0.2], [-0.5, -0.11], [0.0, 0.8]])
        np.testing.assert_array_equal(reg.evaluate(pts), FIELD.evaluate(pts))

    def test_band_edges_exact_and_continuous(self):
        eps = 0.1
        reg = regularize(FIELD, eps)
        xs = np.linspace(-0.9, 0.9, 1000)
        top = np.column_stack([xs, np.full_like(xs, eps)])
        np.testing.assert_array_equal(reg.evaluate(top), FIELD.a_plus(top))
        bottom = np.column_stack([xs, np.full_like(xs, -eps)])
        np.testing.assert_allclose(reg.evaluate(bottom), FIELD.a_minus(bottom), atol=1e-15)
        # Entry (1,2) at the lower edge equals the minus branch value sqrt(3)/8.
        assert reg.evaluate((0.2, -eps))[0, 1] == pytest.approx(SQ3 / 8, abs=1e-15)
        for sign in (+1.0, -1.0):
            inner = np.column_stack([xs, np.full_like(xs, sign * eps * (1 - 1e-10))])
            outer = np.column_stack([xs, np.full_like(xs, sign * eps)])
            assert np.max(np.abs(reg.evaluate(inner) - reg.evaluate(outer))) <= 1e-9

    def test_reproduces_printed_band_matrix(self):
        # The generic normal-coordinate blend must reproduce the benchmark's
        # printed band matrix entrywise.
        rng = np.random.default_rng(6)
        for _ in range(1000):
            eps = rng.uniform(0.02, 0.3)
            x2 = rng.uniform(-eps, eps)
            x1 = rng.uniform(-1, 1)
            got = regularize(FIELD, eps).evaluate((x1, x2))
            a11 = 0.5 * (31 / 8 - 0.7 * eps + x2 * (9 / (8 * eps) + 1.2))
            a12 = 0.5 * (SQ3 / 8 + 2 + x2 * (2 / eps - SQ3 / (8 * eps)))
            a22 = 0.5 * (29 / 8 - 0.7 * eps + x2 * (11 / (8 * eps) + 1.2))
            np.testing.assert_allclose(got, [[a11, a12], [a12, a22]], rtol=1e-12, atol=1e-12)

    def test_band_ellipticity(self):
        eps = 0.1
        reg = regularize(FIELD, eps)
        rng = np.random.default_rng(7)
        pts = np.column_stack([rng.uniform(-1, 1, 10_000), rng.uniform(-eps, eps, 10_000)])
        eigs = np.linalg.eigvalsh(reg.evaluate(pts))
        assert np.min(eigs) >= FIELD.lam * (1 - 1e-9)

    def test_band_drift_analytic_formula(self):
        eps = 0.1
        reg = regularize(FIELD, eps)
        rng = np.random.default_rng(8)
        pts = np.column_stack([rng.uniform(-1, 1, 200), rng.uniform(-eps, eps, 200)])
        want = np.empty((200, 2))
        want[:, 0] = 1 / eps - SQ3 / (16 * eps)
        want[:, 1] = 11 / (16 * eps) + 0.6
        np.testing.assert_allclose(reg.drift(pts), want, rtol=1e-12)

    def test_band_drift_fd_agrees(self):
        eps = 0.1
        fd_field = dataclasses.replace(FIELD, normal_variation_only=False)
        reg_fd = regularize(fd_field, eps)
        reg = regularize(FIELD, eps)
        pts = np.array([[0.3, 0.05], [-0.2, -0.07], [0.6, 0.0]])
        np.testing.assert_allclose(reg_fd.drift(pts), reg.drift(pts), rtol=1e-6)

    def test_sigma_round_trip_in_band(self):
        eps = 0.07
        reg = regularize(FIELD, eps)
        rng = np.random.default_rng(9)
        pts = np.column_stack([rng.uniform(-1, 1, 2000), rng.uniform(-eps, eps, 2000)])
        sig = reg.sigma(pts)
        np.testing.assert_allclose(
            sig @ np.swapaxes(sig, -1, -2), 2 * reg.evaluate(pts), rtol=1e-12, atol=1e-13
        )

    def test_continuous_coefficient_unchanged(self):
        f = constant_field(2, 0.5)
        reg = regularize(f, 0.2)
        rng = np.random.default_rng(10)
        pts = rng.uniform(-1, 1, size=(500, 2))
        np.testing.assert_array_equal(reg.evaluate(pts), f.evaluate(pts))
        np.testing.assert_array_equal(reg.sigma(pts), f.sigma(pts))
        np.testing.assert_array_equal(reg.drift(pts), f.drift(pts))


class TestValidation:
    def test_declared_bounds_hold_on_disc(self):
        rng = np.random.default_rng(11)
        FIELD.validate_ellipticity(disc_points(rng, 5000))

    def test_overdeclared_lambda_rejected(self):
        rng = np.random.default_rng(12)
        bad = dataclasses.replace(FIELD, lam=1.0)
        with pytest.raises(NotPositiveDefinite):
            bad.validate_ellipticity(disc_points(rng, 5000))

    def test_presets_by_name(self):
        assert build_preset("paper-example-2d").name == "paper-example-2d"
        assert build_preset("piecewise-constant-1d", {"a_plus": 3.0}).Lam == 3.0
        assert build_preset("constant", {"dim": 1, "value": 0.5}).dim == 1
        with pytest.raises(ValueError):
            build_preset("nope")

    def test_piecewise_constant_continuity_flag(self):
        assert piecewise_constant_1d(2.0, 2.0).continuous
        assert not piecewise_constant_1d(2.0, 1.0).continuous
