"""Piecewise-smooth diffusion coefficients and the fields derived from them.

A coefficient field bundles the two matrix branches of a(x) (the values on
the Plus and Minus side of the interface), optional analytic Cholesky
factors sigma with sigma sigma^T = 2a and analytic column-divergence
drifts, and the declared uniform ellipticity bounds lambda <= spec(a) and
max |a_ij| <= Lambda.  Branch evaluators are global smooth formulas (the
restriction of a to either side extends smoothly), so evaluating a branch
slightly past the interface is well defined; which branch applies at a
point is decided by the interface side with On folded into Plus.

A regularized field replaces the jump by an affine interpolation along the
normal coordinate between the two branch values at the edges of a band of
half-width eps.  It is the coefficient the baseline (non-corrected) Euler
scheme runs on.

Presets
-------
``paper-example-2d``     the 2D benchmark problem (planar interface x2 = 0,
                         rotated variable-coefficient branches),
``piecewise-constant-1d``  scalar a = a_plus on x > 0, a_minus on x < 0,
``constant``             a = value * I, continuous (sanity preset).

Everything here is immutable after construction, picklable, and safe to
share across worker processes; evaluators accept (m, d) batches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NotPositiveDefinite
from .geometry import Interface, PlanarInterface, _as_points

# Central finite-difference step for drifts, scaled per point.
FD_STEP = 1e-5

_SQRT3_4 = math.sqrt(3.0) / 4.0


def chol_spd_lower(mats):
    """Lower Cholesky factors of a batch (..., d, d) of SPD matrices.

    Closed form for d <= 2, LAPACK otherwise.  Raises NotPositiveDefinite
    when a pivot is non-positive (an ellipticity violation).
    """
    mats = np.asarray(mats, dtype=np.float64)
    d = mats.shape[-1]
    if d == 1:
        if np.any(mats <= 0.0):
            raise NotPositiveDefinite("1x1 coefficient is not positive")
        return np.sqrt(mats)
    if d == 2:
        p = mats[..., 0, 0]
        q = mats[..., 1, 0]
        s = mats[..., 1, 1] - q * q / p
        if np.any(p <= 0.0) or np.any(s <= 0.0):
            raise NotPositiveDefinite("2x2 coefficient is not positive definite")
        out = np.zeros_like(mats)
        sp = np.sqrt(p)
        out[..., 0, 0] = sp
        out[..., 1, 0] = q / sp
        out[..., 1, 1] = np.sqrt(s)
        return out
    try:
        return np.linalg.cholesky(mats)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc


def _labels_from(interface, pts, side):
    """Side labels as +-1 int8, On folded into Plus."""
    if side is None:
        code = interface.side_code(pts)
    else:
        code = np.asarray(side, dtype=np.int8)
        if code.ndim == 0:
            code = np.full(pts.shape[0], int(code), dtype=np.int8)
    return np.where(code >= 0, np.int8(1), np.int8(-1))


@dataclass(frozen=True)
class CoefficientField:
    """The discontinuous matrix field a(x) with its derived quantities.

    ``a_plus``/``a_minus`` map point batches (m, d) to symmetric matrices
    (m, d, d).  ``sigma_plus``/``sigma_minus`` (optional) are analytic
    lower-triangular factors of 2a; ``da_plus``/``da_minus`` (optional)
    analytic drifts with component j = sum_i d_i a_ij.  Missing factors and
    drifts fall back to a Cholesky of 2a and central finite differences of
    the branch, respectively.

    ``normal_variation_only`` declares that branch entries vary only along
    the interface normal (true for all presets); the regularized field uses
    it to take an analytic in-band drift.
    """

    interface: Interface
    a_plus: Callable
    a_minus: Callable
    lam: float
    Lam: float
    da_plus: Callable | None = None
    da_minus: Callable | None = None
    sigma_plus: Callable | None = None
    sigma_minus: Callable | None = None
    continuous: bool = False
    normal_variation_only: bool = False
    name: str = ""

    @property
    def dim(self) -> int:
        return self.interface.dim

    # -- branch dispatch ---------------------------------------------------

    def _dispatch(self, pts, labels, fn_plus, fn_minus, suffix):
        if isinstance(fn_plus, _ConstantBranch) and isinstance(fn_minus, _ConstantBranch):
            sel = (labels > 0).reshape((-1,) + (1,) * len(suffix))
            return np.where(sel, fn_plus.values(), fn_minus.values())
        plus = labels > 0
        if plus.all():
            return np.asarray(fn_plus(pts), dtype=np.float64)
        if not plus.any():
            return np.asarray(fn_minus(pts), dtype=np.float64)
        out = np.empty((pts.shape[0], *suffix))
        out[plus] = fn_plus(pts[plus])
        out[~plus] = fn_minus(pts[~plus])
        return out

    def evaluate(self, x, side=None):
        """a(x), branch chosen by the side labels (On uses the Plus branch)."""
        pts, single = _as_points(x, self.dim)
        labels = _labels_from(self.interface, pts, side)
        out = self._dispatch(pts, labels, self.a_plus, self.a_minus, (self.dim, self.dim))
        return out[0] if single else out

    def sigma(self, x, side=None):
        """Lower-triangular sigma with sigma sigma^T = 2 a(x)."""
        pts, single = _as_points(x, self.dim)
        labels = _labels_from(self.interface, pts, side)
        if self.sigma_plus is not None and self.sigma_minus is not None:
            out = self._dispatch(pts, labels, self.sigma_plus, self.sigma_minus, (self.dim, self.dim))
        else:
            out = chol_spd_lower(2.0 * self._dispatch(pts, labels, self.a_plus, self.a_minus, (self.dim, self.dim)))
        return out[0] if single else out

    def _fd_drift(self, pts, branch_fn):
        d = self.dim
        delta = FD_STEP * (1.0 + np.sqrt(np.sum(pts * pts, axis=-1)))
        out = np.zeros((pts.shape[0], d))
        for i in range(d):
            shift = np.zeros_like(pts)
            shift[:, i] = delta
            hi = np.asarray(branch_fn(pts + shift), dtype=np.float64)
            lo = np.asarray(branch_fn(pts - shift), dtype=np.float64)
            out += (hi[:, i, :] - lo[:, i, :]) / (2.0 * delta)[:, None]
        return out

    def drift(self, x, side=None):
        """Column-divergence drift, component j = sum_i d_i a_ij(x).

        Analytic when the preset supplies it, else central differences of
        the branch evaluator (the branch formula is smooth, so differencing
        across the interface position is still one-sided in the branch).
        """
        pts, single = _as_points(x, self.dim)
        labels = _labels_from(self.interface, pts, side)
        if self.da_plus is not None and self.da_minus is not None:
            out = self._dispatch(pts, labels, self.da_plus, self.da_minus, (self.dim,))
        else:
            plus = labels > 0
            out = np.empty((pts.shape[0], self.dim))
            if plus.any():
                out[plus] = self._fd_drift(pts[plus], self.a_plus)
            if (~plus).any():
                out[~plus] = self._fd_drift(pts[~plus], self.a_minus)
        return out[0] if single else out

    # -- co-normal fields ----------------------------------------------------

    def conormal_plus(self, y):
        """gamma_plus = a_plus nu at the surface point nearest to y."""
        pts, single = _as_points(y, self.dim)
        s = self.interface.closest_point(pts)
        nu = self.interface.unit_normal(s)
        out = np.einsum("mij,mj->mi", np.asarray(self.a_plus(s), dtype=np.float64), nu)
        return out[0] if single else out

    def conormal_minus(self, y):
        """gamma_minus = -a_minus nu at the surface point nearest to y."""
        pts, single = _as_points(y, self.dim)
        s = self.interface.closest_point(pts)
        nu = self.interface.unit_normal(s)
        out = -np.einsum("mij,mj->mi", np.asarray(self.a_minus(s), dtype=np.float64), nu)
        return out[0] if single else out

    # -- validation ----------------------------------------------------------

    def validate_ellipticity(self, points, *, sym_rtol=1e-14, eig_slack=1e-9):
        """Check symmetry, declared lambda and Lambda on a sample of points.

        The declared bounds are a user statement; sampling can refute but
        not certify them.  Raises NotPositiveDefinite on violation.
        """
        pts, _ = _as_points(points, self.dim)
        for tag, fn in (("plus", self.a_plus), ("minus", self.a_minus)):
            mats = np.asarray(fn(pts), dtype=np.float64)
            asym = np.max(np.abs(mats - np.swapaxes(mats, -1, -2)))
            scale = np.max(np.abs(mats))
            if asym > sym_rtol * max(scale, 1.0):
                raise NotPositiveDefinite(f"a_{tag} asymmetric by {asym:.3g}")
            eigs = np.linalg.eigvalsh(mats)
            if np.min(eigs) < self.lam * (1.0 - eig_slack):
                raise NotPositiveDefinite(
                    f"a_{tag} eigenvalue {np.min(eigs):.6g} below declared lambda {self.lam:g}"
                )
            if np.max(np.abs(mats)) > self.Lam * (1.0 + 1e-12):
                raise NotPositiveDefinite(
                    f"a_{tag} entry {np.max(np.abs(mats)):.6g} above declared Lambda {self.Lam:g}"
                )


@dataclass(frozen=True)
class ConormalField:
    """Co-normal field gamma_plus (which=+1) or gamma_minus (which=-1).

    Callable on surface-point batches; the projection machinery records its
    ``tag`` for diagnostics.
    """

    field: CoefficientField
    which: int

    @property
    def tag(self) -> str:
        return "gamma_plus" if self.which > 0 else "gamma_minus"

    def __call__(self, y):
        if self.which > 0:
            return self.field.conormal_plus(y)
        return self.field.conormal_minus(y)


@dataclass(frozen=True)
class RegularizedField:
    """Coefficient smoothed in a band of half-width eps around the interface.

    Inside the band the matrix is the affine interpolation, along the
    normal coordinate, between the Minus branch at the lower band edge and
    the Plus branch at the upper band edge:

        a_eps(x) = (1 - t) a_minus(x - (F + eps) nu) + t a_plus(x + (eps - F) nu),
        t = (F + eps) / (2 eps),   F = signed normal coordinate of x.

    Outside the band a_eps = a.  The blend is symmetric and uniformly
    elliptic (convex combination) and matches both branches continuously at
    the band edges.
    """

    base: CoefficientField
    eps: float

    def __post_init__(self):
        if not self.eps > 0.0:
            raise ValueError("regularization half-width eps must be positive")

    @property
    def interface(self) -> Interface:
        return self.base.interface

    @property
    def dim(self) -> int:
        return self.base.dim

    def _band_parts(self, pts, fnu):
        iface = self.interface
        nu = iface.unit_normal(iface.closest_point(pts))
        lo = pts - (fnu + self.eps)[:, None] * nu
        hi = pts + (self.eps - fnu)[:, None] * nu
        t = (fnu + self.eps) / (2.0 * self.eps)
        return lo, hi, t, nu

    def evaluate(self, x):
        pts, single = _as_points(x, self.dim)
        fnu = self.interface.signed_normal_distance(pts)
        inband = np.abs(fnu) <= self.eps
        out = np.empty((pts.shape[0], self.dim, self.dim))
        if not inband.all():
            mask = ~inband
            labels = np.where(fnu[mask] > 0.0, np.int8(1), np.int8(-1))
            out[mask] = self.base._dispatch(
                pts[mask], labels, self.base.a_plus, self.base.a_minus, (self.dim, self.dim)
            )
        if inband.any():
            sub = pts[inband]
            lo, hi, t, _ = self._band_parts(sub, fnu[inband])
            am = np.asarray(self.base.a_minus(lo), dtype=np.float64)
            ap = np.asarray(self.base.a_plus(hi), dtype=np.float64)
            w = t[:, None, None]
            out[inband] = (1.0 - w) * am + w * ap
        return out[0] if single else out

    def sigma(self, x):
        """Lower Cholesky factor of 2 a_eps (analytic branch factors reused
        outside the band when the base field has them)."""
        pts, single = _as_points(x, self.dim)
        fnu = self.interface.signed_normal_distance(pts)
        inband = np.abs(fnu) <= self.eps
        out = np.empty((pts.shape[0], self.dim, self.dim))
        if not inband.all():
            mask = ~inband
            labels = np.where(fnu[mask] > 0.0, np.int8(1), np.int8(-1))
            if self.base.sigma_plus is not None and self.base.sigma_minus is not None:
                out[mask] = self.base._dispatch(
                    pts[mask], labels, self.base.sigma_plus, self.base.sigma_minus, (self.dim, self.dim)
                )
            else:
                out[mask] = chol_spd_lower(
                    2.0
                    * self.base._dispatch(
                        pts[mask], labels, self.base.a_plus, self.base.a_minus, (self.dim, self.dim)
                    )
                )
        if inband.any():
            sub = pts[inband]
            lo, hi, t, _ = self._band_parts(sub, fnu[inband])
            am = np.asarray(self.base.a_minus(lo), dtype=np.float64)
            ap = np.asarray(self.base.a_plus(hi), dtype=np.float64)
            w = t[:, None, None]
            out[inband] = chol_spd_lower(2.0 * ((1.0 - w) * am + w * ap))
        return out[0] if single else out

    def drift(self, x):
        """Column divergence of the blended matrix.

        When branch entries vary only along the normal, the tangential
        derivatives of the blend cancel and the in-band drift reduces to
        (a_plus(hi) - a_minus(lo)) nu / (2 eps); otherwise central finite
        differences of the blend are used.
        """
        pts, single = _as_points(x, self.dim)
        fnu = self.interface.signed_normal_distance(pts)
        inband = np.abs(fnu) <= self.eps
        out = np.empty((pts.shape[0], self.dim))
        if not inband.all():
            mask = ~inband
            labels = np.where(fnu[mask] > 0.0, np.int8(1), np.int8(-1))
            out[mask] = self.base.drift(pts[mask], side=labels)
        if inband.any():
            sub = pts[inband]
            if self.base.normal_variation_only:
                lo, hi, t, nu = self._band_parts(sub, fnu[inband])
                am = np.asarray(self.base.a_minus(lo), dtype=np.float64)
                ap = np.asarray(self.base.a_plus(hi), dtype=np.float64)
                out[inband] = np.einsum("mij,mj->mi", ap - am, nu) / (2.0 * self.eps)
            else:
                out[inband] = self._fd_blend_drift(sub)
        return out[0] if single else out

    def _fd_blend_drift(self, pts):
        d = self.dim
        delta = FD_STEP * (1.0 + np.sqrt(np.sum(pts * pts, axis=-1)))
        out = np.zeros((pts.shape[0], d))
        for i in range(d):
            shift = np.zeros_like(pts)
            shift[:, i] = delta
            hi = self.evaluate(pts + shift)
            lo = self.evaluate(pts - shift)
            out += (hi[:, i, :] - lo[:, i, :]) / (2.0 * delta)[:, None]
        return out


def regularize(field: CoefficientField, eps: float) -> RegularizedField:
    """Smooth ``field`` in a band of half-width ``eps`` around the interface."""
    return RegularizedField(base=field, eps=float(eps))


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------


def _paper_a_plus(x):
    x2 = x[:, 1]
    out = np.empty((x.shape[0], 2, 2))
    diag = 0.5 * (5.0 + 0.5 * x2)
    out[:, 0, 0] = diag
    out[:, 1, 1] = diag
    out[:, 0, 1] = 2.0
    out[:, 1, 0] = 2.0
    return out


def _paper_a_minus(x):
    x2 = x[:, 1]
    out = np.empty((x.shape[0], 2, 2))
    out[:, 0, 0] = 0.5 * (2.75 + 1.9 * x2)
    out[:, 1, 1] = 0.5 * (2.25 + 1.9 * x2)
    out[:, 0, 1] = 0.5 * _SQRT3_4
    out[:, 1, 0] = 0.5 * _SQRT3_4
    return out


def _paper_sigma_plus(x):
    # Cholesky of 2 a_plus: [[sqrt(p), 0], [4/sqrt(p), sqrt(p - 16/p)]],
    # p = 5 + 0.5 x2.
    p = 5.0 + 0.5 * x[:, 1]
    sp = np.sqrt(p)
    out = np.zeros((x.shape[0], 2, 2))
    out[:, 0, 0] = sp
    out[:, 1, 0] = 4.0 / sp
    out[:, 1, 1] = np.sqrt(p - 16.0 / p)
    return out


def _paper_sigma_minus(x):
    # Cholesky of 2 a_minus: p = 11/4 + 1.9 x2, off-diagonal sqrt(3)/4,
    # r = 9/4 + 1.9 x2.
    x2 = x[:, 1]
    p = 2.75 + 1.9 * x2
    r = 2.25 + 1.9 * x2
    sp = np.sqrt(p)
    out = np.zeros((x.shape[0], 2, 2))
    out[:, 0, 0] = sp
    out[:, 1, 0] = _SQRT3_4 / sp
    out[:, 1, 1] = np.sqrt(r - _SQRT3_4 * _SQRT3_4 / p)
    return out


def _paper_da_plus(x):
    out = np.zeros((x.shape[0], 2))
    out[:, 1] = 0.25
    return out


def _paper_da_minus(x):
    out = np.zeros((x.shape[0], 2))
    out[:, 1] = 0.95
    return out


class _ConstantBranch:
    """Marker base for branch evaluators with point-independent values
    (lets the side dispatch collapse to a single where)."""

    def values(self):
        raise NotImplementedError


@dataclass(frozen=True)
class _ConstantMatrix(_ConstantBranch):
    """Branch evaluator returning a fixed matrix (read-only broadcast)."""

    matrix: tuple

    def values(self):
        return np.asarray(self.matrix, dtype=np.float64)

    def __call__(self, x):
        mat = self.values()
        return np.broadcast_to(mat, (x.shape[0], *mat.shape))


@dataclass(frozen=True)
class _ConstantVector(_ConstantBranch):
    vector: tuple

    def values(self):
        return np.asarray(self.vector, dtype=np.float64)

    def __call__(self, x):
        vec = self.values()
        return np.broadcast_to(vec, (x.shape[0], vec.shape[0]))


def paper_example_2d() -> CoefficientField:
    """The 2D benchmark coefficient: planar interface x2 = 0.

    Branches are rotations of diagonal matrices with entries affine in x2;
    analytic Cholesky factors and drifts (0, 0.25) / (0, 0.95).  The Minus
    branch degenerates at x2 = -2/1.9 ~ -1.0526, so the declared bounds
    lambda = 0.05, Lambda = 4.75 are the exact extrema over the closed unit
    disc; keep paths inside it (or use small horizons) for valid runs.
    """
    return CoefficientField(
        interface=PlanarInterface(normal=(0.0, 1.0), offset=0.0),
        a_plus=_paper_a_plus,
        a_minus=_paper_a_minus,
        da_plus=_paper_da_plus,
        da_minus=_paper_da_minus,
        sigma_plus=_paper_sigma_plus,
        sigma_minus=_paper_sigma_minus,
        lam=0.05,
        Lam=4.75,
        normal_variation_only=True,
        name="paper-example-2d",
    )


def piecewise_constant_1d(a_plus: float = 2.0, a_minus: float = 1.0) -> CoefficientField:
    """Scalar coefficient a_plus on x > 0, a_minus on x < 0, zero drift."""
    if a_plus <= 0 or a_minus <= 0:
        raise ValueError("both branch values must be positive")
    return CoefficientField(
        interface=PlanarInterface(normal=(1.0,), offset=0.0),
        a_plus=_ConstantMatrix(((a_plus,),)),
        a_minus=_ConstantMatrix(((a_minus,),)),
        da_plus=_ConstantVector((0.0,)),
        da_minus=_ConstantVector((0.0,)),
        sigma_plus=_ConstantMatrix(((math.sqrt(2.0 * a_plus),),)),
        sigma_minus=_ConstantMatrix(((math.sqrt(2.0 * a_minus),),)),
        lam=min(a_plus, a_minus),
        Lam=max(a_plus, a_minus),
        continuous=(a_plus == a_minus),
        normal_variation_only=True,
        name="piecewise-constant-1d",
    )


def constant_field(dim: int = 2, value: float = 0.5) -> CoefficientField:
    """Continuous sanity preset a = value * I (both branches identical)."""
    if value <= 0:
        raise ValueError("value must be positive")
    eye = tuple(tuple(value if i == j else 0.0 for j in range(dim)) for i in range(dim))
    sig = tuple(tuple(math.sqrt(2.0 * value) if i == j else 0.0 for j in range(dim)) for i in range(dim))
    normal = tuple(0.0 for _ in range(dim - 1)) + (1.0,)
    return CoefficientField(
        interface=PlanarInterface(normal=normal, offset=0.0),
        a_plus=_ConstantMatrix(eye),
        a_minus=_ConstantMatrix(eye),
        da_plus=_ConstantVector(tuple(0.0 for _ in range(dim))),
        da_minus=_ConstantVector(tuple(0.0 for _ in range(dim))),
        sigma_plus=_ConstantMatrix(sig),
        sigma_minus=_ConstantMatrix(sig),
        lam=value,
        Lam=value,
        continuous=True,
        normal_variation_only=True,
        name="constant",
    )


def build_preset(name: str, params: dict | None = None) -> CoefficientField:
    """Construct a named preset; ``params`` forwards preset keyword options."""
    params = dict(params or {})
    if name == "paper-example-2d":
        if params:
            raise ValueError("paper-example-2d takes no parameters")
        return paper_example_2d()
    if name == "piecewise-constant-1d":
        return piecewise_constant_1d(**params)
    if name == "constant":
        return constant_field(**params)
    raise ValueError(f"unknown preset {name!r}")


PRESETS = ("paper-example-2d", "piecewise-constant-1d", "constant")
