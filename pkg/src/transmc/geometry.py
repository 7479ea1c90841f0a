"""Interface geometry: side classification, oblique projections, crossing map.

The diffusion coefficient jumps across a smooth hypersurface that splits
R^d into an upper region (Plus, where the signed normal coordinate is
positive) and a lower region (Minus).  The path corrections need three
geometric primitives:

* the signed normal coordinate F_nu of a point (positive on the Plus side,
  equal to the signed distance for a hyperplane),
* the oblique projection of a point x along a transversal vector field g,
  written  x = s + F * g(s)  with foot s on the surface and scalar factor F,
* the crossing map  x -> s - F * g_out(s)  that replaces the penetration
  along the incoming field by the mirrored displacement along the outgoing
  field.

For a hyperplane the projection is closed-form and valid globally.  For a
level-set surface it is solved by a damped Newton iteration and is only
trusted within a declared tube radius; evaluating it outside the tube is a
hard error rather than an arbitrary value.

All operations accept a single point of shape (d,) or a batch of shape
(m, d) and are pure functions; interface objects are immutable and safe to
share across worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Callable

import numpy as np

from .errors import NoConvergence, NotInTube, TangentField

# Relative tolerance of the on-surface test for hyperplanes: the exact test
# <n,x> = b is meaningful only to floating precision.
PLANAR_ON_TOL = 1e-14

# Default residual tolerance and iteration budget of the projection solves.
DEFAULT_TOL_PROJ = 1e-10
DEFAULT_MAX_ITER = 50

# A projection field g is rejected as tangent when |<nu, g>| falls below
# this threshold; uniformly elliptic co-normal fields satisfy
# |<nu, g>| >= lambda, so any healthy setup clears it by many orders.
MIN_TRANSVERSAL = 1e-12


class Side(IntEnum):
    """Side label of a point relative to the interface."""

    PLUS = 1
    ON = 0
    MINUS = -1


@dataclass(frozen=True)
class ObliqueFoot:
    """Solution (s, F) of x = s + F * g(s) for a transversal field g.

    ``foot`` has the same leading shape as the projected points, ``factor``
    is the scalar F per point (negative when the point sits on the opposite
    side of the field's natural domain), and ``field_tag`` records which
    vector field was used.
    """

    foot: np.ndarray
    factor: np.ndarray | float
    field_tag: str = ""


def _as_points(x, dim):
    """Return (points as (m, d) float array, had_single_point)."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        if arr.shape[0] != dim:
            raise ValueError(f"point has dimension {arr.shape[0]}, expected {dim}")
        return arr[None, :], True
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise ValueError(f"points must have shape (m, {dim}), got {arr.shape}")
    return arr, False


def _field_tag(g) -> str:
    return getattr(g, "tag", getattr(g, "__name__", "field"))


class Interface:
    """Common machinery for a smooth interface splitting R^d in two.

    Concrete interfaces provide the signed normal coordinate, the unit
    normal (pointing into the Plus region), the on-surface tolerance and the
    tube radius within which oblique projections are defined.
    """

    dim: int
    tube_radius: float

    # -- primitives supplied by concrete classes --------------------------

    def signed_normal_distance(self, x):
        """Signed normal coordinate F_nu; positive in the Plus region."""
        raise NotImplementedError

    def unit_normal(self, y):
        """Unit normal at points on (or near) the surface, pointing to Plus."""
        raise NotImplementedError

    def closest_point(self, x):
        """Normal projection of x onto the surface."""
        raise NotImplementedError

    def _on_tolerance(self, pts):
        """Per-point width of the 'on the surface' band."""
        raise NotImplementedError

    # -- classification ----------------------------------------------------

    def side_code(self, x):
        """Vectorized side labels: +1 (Plus), -1 (Minus), 0 (On)."""
        pts, single = _as_points(x, self.dim)
        fnu = self.signed_normal_distance(pts)
        code = np.where(fnu > 0.0, 1, -1).astype(np.int8)
        code[np.abs(fnu) <= self._on_tolerance(pts)] = 0
        return code[0] if single else code

    def side(self, x) -> Side:
        """Side of a single point, with the geometric on-surface tolerance."""
        return Side(int(self.side_code(np.asarray(x, dtype=np.float64))))

    def is_in_tube(self, x):
        pts, single = _as_points(x, self.dim)
        ok = np.abs(self.signed_normal_distance(pts)) <= self.tube_radius
        return bool(ok[0]) if single else ok

    # -- projections ---------------------------------------------------------

    def project_oblique(self, x, g, *, tol=DEFAULT_TOL_PROJ, max_iter=DEFAULT_MAX_ITER) -> ObliqueFoot:
        """Solve x = s + F * g(s) with s on the surface.

        ``g`` maps surface points (m, d) to vectors (m, d); a ``tag``
        attribute, if present, is recorded on the result.  Raises NotInTube
        outside the tube radius, TangentField when g is numerically tangent
        at the foot, NoConvergence when the iterative solve stalls.
        """
        raise NotImplementedError

    def algebraic_distance(self, x, g, **kw):
        """Normalized factor F * |g(s)|: the algebraic distance along g."""
        res = self.project_oblique(x, g, **kw)
        gs = np.asarray(g(np.atleast_2d(res.foot)), dtype=np.float64)
        norm = np.sqrt(np.sum(gs * gs, axis=-1))
        out = res.factor * (norm[0] if np.isscalar(res.factor) or np.ndim(res.factor) == 0 else norm)
        return out

    def _check_transversal(self, denom, gs):
        if np.any(np.abs(denom) < MIN_TRANSVERSAL):
            raise TangentField(
                "projection field is tangent to the interface "
                f"(|<nu, g>| < {MIN_TRANSVERSAL:g})"
            )


@dataclass(frozen=True)
class PlanarInterface(Interface):
    """Hyperplane {x : <n, x> = b}, Plus region {<n, x> > b}.

    The signed normal coordinate is exact and the oblique projections are
    global (tube radius +inf) with a closed form: F = F_nu(x) / <n, g(s)>,
    the foot solved by fixed point when g varies along the surface (exact in
    one pass when g is constant along its own transversal).
    """

    normal: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=np.float64).reshape(-1)
        norm = float(np.sqrt(n @ n))
        if norm == 0.0:
            raise ValueError("normal vector must be nonzero")
        object.__setattr__(self, "normal", n / norm)
        object.__setattr__(self, "offset", float(self.offset) / norm)

    @property
    def dim(self):
        return self.normal.shape[0]

    @property
    def tube_radius(self):
        return np.inf

    def signed_normal_distance(self, x):
        pts, single = _as_points(x, self.dim)
        fnu = pts @ self.normal - self.offset
        return float(fnu[0]) if single else fnu

    def unit_normal(self, y):
        pts, single = _as_points(y, self.dim)
        n = np.broadcast_to(self.normal, pts.shape)
        return n[0] if single else n.copy()

    def closest_point(self, x):
        pts, single = _as_points(x, self.dim)
        fnu = pts @ self.normal - self.offset
        s = pts - fnu[:, None] * self.normal
        return s[0] if single else s

    def _on_tolerance(self, pts):
        return PLANAR_ON_TOL * (1.0 + np.sqrt(np.sum(pts * pts, axis=-1)))

    def project_oblique(self, x, g, *, tol=DEFAULT_TOL_PROJ, max_iter=DEFAULT_MAX_ITER) -> ObliqueFoot:
        pts, single = _as_points(x, self.dim)
        n = self.normal
        fnu = pts @ n - self.offset
        # Initial foot: normal projection (always on the hyperplane).
        s = pts - fnu[:, None] * n
        factor = np.zeros_like(fnu)
        scale = 1.0 + np.sqrt(np.sum(pts * pts, axis=-1))
        gs = np.asarray(g(s), dtype=np.float64)
        for _ in range(max_iter):
            denom = gs @ n
            self._check_transversal(denom, gs)
            factor = fnu / denom
            s = pts - factor[:, None] * gs
            # The candidate foot satisfies <n, s> = b up to roundoff; the
            # reconstruction residual with g re-evaluated at it decides
            # convergence (and feeds the next pass when g varies along the
            # surface; exact after one pass when g is constant there).
            gs = np.asarray(g(s), dtype=np.float64)
            resid = np.sqrt(np.sum((pts - s - factor[:, None] * gs) ** 2, axis=-1))
            if np.all(resid <= tol * scale):
                break
        else:
            raise NoConvergence(f"oblique projection did not converge in {max_iter} iterations")
        if single:
            return ObliqueFoot(s[0], float(factor[0]), _field_tag(g))
        return ObliqueFoot(s, factor, _field_tag(g))


@dataclass(frozen=True)
class LevelSetInterface(Interface):
    """Interface {phi = 0} with Plus region {phi > 0}.

    ``grad`` is the analytic gradient of phi.  ``tube_radius`` bounds the
    region where the oblique projections are defined; the constructor of a
    problem declares it (the underlying existence result is not
    quantitative).  Projections outside the tube raise NotInTube.
    """

    phi: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    dim: int
    tube_radius: float
    tol_on: float = 1e-12

    def _closest_point(self, pts, max_iter=DEFAULT_MAX_ITER):
        """First-order projection iteration s <- s - phi(s) grad/|grad|^2.

        Lands on the surface near the normal foot; the residual tangential
        offset is O(dist^2 * curvature), which is why the level-set normal
        coordinate is only sign-exact, not distance-exact.
        """
        s = pts.copy()
        scale = 1.0 + np.sqrt(np.sum(pts * pts, axis=-1))
        for _ in range(max_iter):
            val = np.asarray(self.phi(s), dtype=np.float64)
            gr = np.asarray(self.grad(s), dtype=np.float64)
            g2 = np.sum(gr * gr, axis=-1)
            step = (val / g2)[:, None] * gr
            s = s - step
            if np.all(np.sum(step * step, axis=-1) <= (1e-14 * scale) ** 2):
                break
        return s

    def signed_normal_distance(self, x):
        pts, single = _as_points(x, self.dim)
        s = self._closest_point(pts)
        dist = np.sqrt(np.sum((pts - s) ** 2, axis=-1))
        sign = np.where(np.asarray(self.phi(pts)) >= 0.0, 1.0, -1.0)
        fnu = sign * dist
        return float(fnu[0]) if single else fnu

    def unit_normal(self, y):
        pts, single = _as_points(y, self.dim)
        gr = np.asarray(self.grad(pts), dtype=np.float64)
        gr = gr / np.sqrt(np.sum(gr * gr, axis=-1))[:, None]
        return gr[0] if single else gr

    def closest_point(self, x):
        pts, single = _as_points(x, self.dim)
        s = self._closest_point(pts)
        return s[0] if single else s

    def _on_tolerance(self, pts):
        return np.full(pts.shape[0], self.tol_on)

    def project_oblique(self, x, g, *, tol=DEFAULT_TOL_PROJ, max_iter=DEFAULT_MAX_ITER) -> ObliqueFoot:
        pts, single = _as_points(x, self.dim)
        fnu = self.signed_normal_distance(pts)
        if np.any(np.abs(np.atleast_1d(fnu)) > self.tube_radius):
            raise NotInTube(
                f"point at normal distance {np.max(np.abs(fnu)):.3g} exceeds tube radius {self.tube_radius:g}"
            )
        # Damped Newton on (s, F) for the system
        #   s + F g(s) - x = 0,  phi(s) = 0,
        # with the tangential Jacobian of g dropped: the dropped block is
        # O(|F| Lip(g)) and vanishes at the solution, so the iteration
        # contracts inside the tube where the solution is unique.
        s = self._closest_point(pts)
        gs = np.asarray(g(s), dtype=np.float64)
        nu = self.unit_normal(s)
        denom = np.sum(nu * gs, axis=-1)
        self._check_transversal(denom, gs)
        factor = np.atleast_1d(fnu) / denom
        scale = 1.0 + np.sqrt(np.sum(pts * pts, axis=-1))

        def residual(s, factor, gs):
            r1 = s + factor[:, None] * gs - pts
            r2 = np.asarray(self.phi(s), dtype=np.float64)
            return np.sqrt(np.sum(r1 * r1, axis=-1) + r2 * r2), r1, r2

        res, r1, r2 = residual(s, factor, gs)
        for _ in range(max_iter):
            if np.all(res <= tol * scale):
                break
            gr = np.asarray(self.grad(s), dtype=np.float64)
            gdotg = np.sum(gr * gs, axis=-1)
            self._check_transversal(gdotg / np.sqrt(np.sum(gr * gr, axis=-1)), gs)
            # Solve  delta_s + dF g = -r1,  <grad, delta_s> = -r2  by block
            # elimination: dF = (r2 - <grad, r1>) / <grad, g>.
            dfac = (r2 - np.sum(gr * r1, axis=-1)) / gdotg
            ds = -r1 - dfac[:, None] * gs
            alpha = np.ones_like(factor)
            for _ in range(8):
                s_try = s + alpha[:, None] * ds
                f_try = factor + alpha * dfac
                g_try = np.asarray(g(s_try), dtype=np.float64)
                res_try, r1_try, r2_try = residual(s_try, f_try, g_try)
                worse = res_try > res
                if not np.any(worse):
                    break
                alpha = np.where(worse, alpha * 0.5, alpha)
            s, factor, gs, res, r1, r2 = s_try, f_try, g_try, res_try, r1_try, r2_try
        if not np.all(res <= tol * scale):
            raise NoConvergence(f"oblique projection did not converge in {max_iter} iterations")
        if single:
            return ObliqueFoot(s[0], float(factor[0]), _field_tag(g))
        return ObliqueFoot(s, factor, _field_tag(g))


def side(interface: Interface, x) -> Side:
    """Side of a point; points within the geometric tolerance are On."""
    return interface.side(x)


def project_oblique(interface: Interface, x, g, **kw) -> ObliqueFoot:
    """Oblique projection x = s + F g(s); see Interface.project_oblique."""
    return interface.project_oblique(x, g, **kw)


def algebraic_distance(interface: Interface, x, g, **kw):
    """Algebraic distance F * |g(s)| of x to the surface along g."""
    return interface.algebraic_distance(x, g, **kw)


def crossing_correction(interface: Interface, xhat, g_in, g_out, **kw):
    """Map a point that crossed the surface: x -> s - F * g_out(s).

    (s, F) is the oblique projection of ``xhat`` along ``g_in``.  The map
    rescales the penetration depth along the outgoing co-normal field and
    never flips the side of the point.  With identical fields up to sign
    (continuous coefficient, g_out = -g_in) it is the identity.
    """
    res = interface.project_oblique(xhat, g_in, **kw)
    foot = np.atleast_2d(res.foot)
    factor = np.atleast_1d(res.factor)
    gout = np.asarray(g_out(foot), dtype=np.float64)
    corrected = foot - factor[:, None] * gout
    if np.ndim(res.factor) == 0:
        return corrected[0]
    return corrected
