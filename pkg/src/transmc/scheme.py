"""One-step transition kernels for the path schemes.

Three kernels share the same state layout:

* the transformed Euler step: a standard Euler increment with the branch
  coefficients of the current side, followed, whenever the increment lands
  on the other side of the interface, by the crossing correction
  x -> s - F * gamma_out(s) that mirrors the oblique penetration from the
  incoming co-normal field to the outgoing one;
* the regularized baseline step: plain Euler on the band-smoothed
  coefficient, with no correction ever applied;
* the 1D phi-transform oracle step for piecewise-constant scalar
  coefficients: the state is mapped through the piecewise-linear bijection
  phi(y) = (a_minus 1_{y>0} + a_plus 1_{y<0}) y, advanced with the constant
  per-sign volatility, and mapped back.  For shared Brownian increments it
  reproduces the transformed scheme exactly, which makes it a pathwise
  oracle.

States carry a side label with On folded into Plus; an Euler increment that
lands exactly on the interface counts as "no crossing" and the new label is
Plus.  All kernels are pure and deterministic given (state, h, dW): they
are driven identically from any number of worker processes.  The array
variants (`step_transformed`, `step_regularized`) advance a whole batch of
paths and are the hot path of the Monte Carlo driver; the singular wrappers
mirror them one state at a time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coefficients import CoefficientField, ConormalField, RegularizedField
from .errors import NotInTube
from .geometry import Interface, Side, _as_points, crossing_correction


@dataclass(frozen=True)
class SchemeState:
    """Current position(s) and side label(s) of one path or a path batch.

    ``side`` is +1/-1 (Side for a single state, int8 array for a batch);
    it always equals the side of ``position`` with On folded into Plus.
    """

    position: np.ndarray
    side: np.ndarray | Side
    k: int = 0

    @classmethod
    def at(cls, position, interface: Interface, k: int = 0) -> "SchemeState":
        """State at ``position`` with the side label derived from geometry."""
        pts, single = _as_points(np.asarray(position, dtype=np.float64), interface.dim)
        code = interface.side_code(pts)
        labels = np.where(code >= 0, np.int8(1), np.int8(-1))
        if single:
            return cls(position=pts[0], side=Side(int(labels[0])), k=k)
        return cls(position=pts, side=labels, k=k)


@dataclass(frozen=True)
class StepPlan:
    """Step size h and the Brownian increment dW ~ N(0, h I) per coordinate.

    The increment is supplied by the caller; the kernels are deterministic
    functions of it.
    """

    h: float
    dw: np.ndarray

    def __post_init__(self):
        if not self.h > 0.0:
            raise ValueError("step size h must be positive")
        object.__setattr__(self, "dw", np.asarray(self.dw, dtype=np.float64))


def _fold(code):
    """Side labels with On folded into Plus."""
    return np.where(code >= 0, np.int8(1), np.int8(-1))


def step_euler(pos, side, dw, h, field: CoefficientField, sigma=None, drift=None):
    """Standard Euler increment x + sigma(x) dW + da(x) h on a batch.

    ``sigma``/``drift`` may be passed in when the caller already evaluated
    them at ``pos`` (the Monte Carlo driver shares them with its exit test);
    they are otherwise evaluated under the current side's branch.
    """
    if sigma is None:
        sigma = field.sigma(pos, side)
    if drift is None:
        drift = field.drift(pos, side)
    return pos + (sigma @ dw[..., None])[..., 0] + drift * h


def step_transformed(pos, side, dw, h, field: CoefficientField, interface: Interface | None = None,
                     sigma=None, drift=None):
    """Advance a batch one transformed-Euler step.

    Returns ``(new_pos, new_side, corrections, crossings, bad)`` where
    ``corrections`` counts applied crossing corrections, ``crossings``
    counts realized side-label changes, and ``bad`` is a boolean mask of
    paths whose crossing overshoot left the projection tube (always all
    False for planar interfaces); such paths are left at the raw Euler
    position and must be discarded by the caller.
    """
    iface = interface if interface is not None else field.interface
    xhat = step_euler(pos, side, dw, h, field, sigma=sigma, drift=drift)
    code = iface.side_code(xhat)
    new_side = _fold(code)
    crossed = (code != 0) & (code != side)
    corrections = 0
    bad = None
    if crossed.any():
        idx = np.nonzero(crossed)[0]
        sub = xhat[idx]
        if not math.isinf(iface.tube_radius):
            fnu = np.abs(np.atleast_1d(iface.signed_normal_distance(sub)))
            intube = fnu <= iface.tube_radius
            if not intube.all():
                bad = np.zeros(pos.shape[0], dtype=bool)
                bad[idx[~intube]] = True
                idx = idx[intube]
                sub = sub[intube]
        if idx.size:
            from_plus = side[idx] > 0
            g_plus = ConormalField(field, +1)
            g_minus = ConormalField(field, -1)
            corrected = np.empty_like(sub)
            if from_plus.any():
                corrected[from_plus] = crossing_correction(iface, sub[from_plus], g_plus, g_minus)
            if (~from_plus).any():
                corrected[~from_plus] = crossing_correction(iface, sub[~from_plus], g_minus, g_plus)
            xhat[idx] = corrected
            new_side[idx] = _fold(iface.side_code(corrected))
            corrections = int(idx.size)
    crossings = int(np.count_nonzero(new_side != side))
    return xhat, new_side, corrections, crossings, bad


def step_regularized(pos, dw, h, regfield: RegularizedField, sigma=None, drift=None):
    """Plain Euler step on the smoothed coefficient; never corrected."""
    if sigma is None:
        sigma = regfield.sigma(pos)
    if drift is None:
        drift = regfield.drift(pos)
    return pos + (sigma @ dw[..., None])[..., 0] + drift * h


def euler_increment(state: SchemeState, plan: StepPlan, field: CoefficientField):
    """Euler increment of a single state (or batch), without correction."""
    pts, single = _as_points(state.position, field.dim)
    side = np.asarray(state.side, dtype=np.int8).reshape(-1 if not single else 1)
    if side.shape[0] == 1 and pts.shape[0] > 1:
        side = np.full(pts.shape[0], side[0], dtype=np.int8)
    dw = np.atleast_2d(plan.dw)
    out = step_euler(pts, side, dw, plan.h, field)
    return out[0] if single else out


def transformed_step(state: SchemeState, plan: StepPlan, field: CoefficientField,
                     interface: Interface | None = None) -> SchemeState:
    """One transformed-Euler transition of a state.

    A crossing overshoot outside the projection tube is fatal for the path
    and raises NotInTube (planar interfaces have an infinite tube).
    """
    iface = interface if interface is not None else field.interface
    pts, single = _as_points(state.position, field.dim)
    side = np.atleast_1d(np.asarray(state.side, dtype=np.int8))
    dw = np.atleast_2d(plan.dw)
    new_pos, new_side, _, _, bad = step_transformed(pts, side, dw, plan.h, field, iface)
    if bad is not None and bad.any():
        raise NotInTube("crossing overshoot left the projection tube")
    if single:
        return SchemeState(position=new_pos[0], side=Side(int(new_side[0])), k=state.k + 1)
    return SchemeState(position=new_pos, side=new_side, k=state.k + 1)


def regularized_step(state: SchemeState, plan: StepPlan, regfield: RegularizedField) -> SchemeState:
    """One baseline Euler transition on the regularized coefficient."""
    pts, single = _as_points(state.position, regfield.dim)
    dw = np.atleast_2d(plan.dw)
    new_pos = step_regularized(pts, dw, plan.h, regfield)
    code = regfield.interface.side_code(new_pos)
    new_side = _fold(code)
    if single:
        return SchemeState(position=new_pos[0], side=Side(int(new_side[0])), k=state.k + 1)
    return SchemeState(position=new_pos, side=new_side, k=state.k + 1)


def phi_map(x, a_plus: float, a_minus: float):
    """The piecewise-linear bijection phi(y) = (a_- 1_{y>=0} + a_+ 1_{y<0}) y.

    The y = 0 point belongs to the upper branch, mirroring the On -> Plus
    convention of the transformed scheme (phi(0) = 0 either way).
    """
    x = np.asarray(x, dtype=np.float64)
    return np.where(x >= 0.0, a_minus * x, a_plus * x)


def phi_inverse(y, a_plus: float, a_minus: float):
    """Inverse of phi_map (sign is preserved, so branches do not mix)."""
    y = np.asarray(y, dtype=np.float64)
    return np.where(y >= 0.0, y / a_minus, y / a_plus)


def _phi_step(y, dw, a_plus: float, a_minus: float):
    sig_plus = math.sqrt(2.0 * a_plus)
    sig_minus = math.sqrt(2.0 * a_minus)
    coef = np.where(y >= 0.0, a_minus * sig_plus, a_plus * sig_minus)
    y_next = y + coef * dw
    return y_next, phi_inverse(y_next, a_plus, a_minus)


def phi_transform_step(y, plan: StepPlan, a_plus: float, a_minus: float):
    """One step of the 1D oracle scheme for piecewise-constant coefficients.

    ``y`` is the transformed state; returns ``(y_next, x_next)`` with
    x_next = phi^{-1}(y_next) the untransformed path position.  Zero drift
    and sigma_pm = sqrt(2 a_pm) are built in; states at y = 0 use the upper
    branch (see phi_map).
    """
    y = np.asarray(y, dtype=np.float64)
    dw = np.asarray(plan.dw, dtype=np.float64).reshape(y.shape)
    return _phi_step(y, dw, a_plus, a_minus)
