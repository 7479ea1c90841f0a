"""Deterministic 1D oracle for d_t u = (a u')' with a jump of a at zero.

A Crank-Nicolson finite-difference solver on a uniform grid that contains
zero as a node.  The divergence-form flux is discretized with face
coefficients equal to the harmonic mean of the one-sided cell values, which
enforces continuity of the co-normal flux a u' across the jump at the
discrete level (no explicit interface unknowns).  Second order in space and
time; used as the reference value for the weak-convergence acceptance runs
of the stochastic schemes.

The oracle is independent of the path schemes: it never touches the
geometry or scheme modules.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import UnstableConfig


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on [-L, L] with 2L/M spacing; M must be even so that the
    coefficient jump at zero sits exactly on a node."""

    half_width: float
    cells: int
    dt: float

    def __post_init__(self):
        if self.cells % 2 != 0 or self.cells < 4:
            raise ValueError("cells must be even and >= 4 so that 0 is a node")
        if not (self.half_width > 0 and self.dt > 0):
            raise ValueError("half_width and dt must be positive")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.cells

    @property
    def x(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.cells + 1)


def _branch_callables(a_1d):
    """Normalize the coefficient argument to two vectorized callables.

    Accepts a pair (a_plus, a_minus) of numbers or callables, or a 1D
    CoefficientField-like object exposing ``a_plus``/``a_minus`` branch
    evaluators on (m, 1) points.
    """
    if isinstance(a_1d, tuple) and len(a_1d) == 2:
        plus, minus = a_1d
    else:
        field = a_1d

        def plus(x, _f=field):
            return np.asarray(_f.a_plus(np.asarray(x, dtype=np.float64)[:, None]))[:, 0, 0]

        def minus(x, _f=field):
            return np.asarray(_f.a_minus(np.asarray(x, dtype=np.float64)[:, None]))[:, 0, 0]

        return plus, minus

    def wrap(branch):
        if callable(branch):
            return lambda x: np.asarray(branch(np.asarray(x, dtype=np.float64)), dtype=np.float64)
        value = float(branch)
        return lambda x: np.full(np.asarray(x).shape, value)

    return wrap(plus), wrap(minus)


@dataclass(frozen=True)
class Solution1D:
    """Grid solution at the final time, evaluated by linear interpolation."""

    grid: Grid1D
    values: np.ndarray
    a_plus0: float
    a_minus0: float

    def __call__(self, x):
        return np.interp(x, self.grid.x, self.values)


def _face_coefficients(grid: Grid1D, a_plus, a_minus):
    """Harmonic means of the one-sided endpoint values of each cell.

    Every cell lies entirely in one branch (zero is a node), so both
    endpoint values are taken from that branch.
    """
    x = grid.x
    mid = 0.5 * (x[:-1] + x[1:])
    left = np.where(mid > 0, a_plus(x[:-1]), a_minus(x[:-1]))
    right = np.where(mid > 0, a_plus(x[1:]), a_minus(x[1:]))
    if np.any(left <= 0) or np.any(right <= 0):
        raise UnstableConfig("coefficient is not positive on the grid")
    return 2.0 * left * right / (left + right)


def cn_solve(a_1d, u0, T: float, grid: Grid1D) -> Solution1D:
    """Crank-Nicolson solution of d_t u = (a u')' at time T.

    ``u0`` is a vectorized initial condition; boundary values are held at
    u0(+-L) (Dirichlet), so the half width must dominate the diffusion range
    sqrt(2 max(a) T) comfortably - validated elsewhere by grid doubling.
    """
    a_plus, a_minus = _branch_callables(a_1d)
    n_steps = int(round(T / grid.dt))
    if n_steps < 1 or abs(n_steps * grid.dt - T) > 1e-9 * max(T, 1.0):
        raise ValueError("grid.dt must divide T")
    x = grid.x
    dx2 = grid.dx * grid.dx
    face = _face_coefficients(grid, a_plus, a_minus)
    u = np.asarray(u0(x), dtype=np.float64).copy()
    # Initial data may jump at the interface node (e.g. an indicator);
    # nodal sampling there would lose one order.  The node represents the
    # cell straddling zero, so take the average of the one-sided limits
    # (sampled at the half-cell midpoints: exact for a jump, O(dx^2) for
    # smooth data, hence harmless).
    i0 = grid.cells // 2
    half = 0.5 * grid.dx
    u[i0] = 0.5 * float(
        np.asarray(u0(np.array([-half])), dtype=np.float64)[0]
        + np.asarray(u0(np.array([half])), dtype=np.float64)[0]
    )

    # Interior tridiagonal action of A: (A u)_i =
    #   (face_i (u_{i+1}-u_i) - face_{i-1} (u_i - u_{i-1})) / dx^2.
    r = 0.5 * grid.dt
    lower = face[:-1] / dx2
    upper = face[1:] / dx2
    diag = -(face[1:] + face[:-1]) / dx2

    m = x.shape[0]
    ab = np.zeros((3, m))
    ab[1, 0] = 1.0
    ab[1, -1] = 1.0
    ab[1, 1:-1] = 1.0 - r * diag
    ab[0, 2:] = -r * upper  # superdiagonal entries A[i, i+1], stored at column i+1
    ab[2, :-2] = -r * lower  # subdiagonal entries A[i, i-1], stored at column i-1
    ab[0, 1] = 0.0
    ab[2, -2] = 0.0

    rhs = np.empty_like(u)
    for _ in range(n_steps):
        rhs[0] = u[0]
        rhs[-1] = u[-1]
        rhs[1:-1] = u[1:-1] + r * (upper * u[2:] + diag * u[1:-1] + lower * u[:-2])
        u = solve_banded((1, 1), ab, rhs, check_finite=False)
        if not np.all(np.isfinite(u)):
            raise UnstableConfig("Crank-Nicolson solve produced non-finite values")
    return Solution1D(grid=grid, values=u, a_plus0=float(a_plus(np.zeros(1))[0]),
                      a_minus0=float(a_minus(np.zeros(1))[0]))


def flux_jump(solution: Solution1D) -> float:
    """Discrete co-normal flux mismatch a_+ u'(0+) - a_- u'(0-).

    One-sided second-order differences at the interface node; decays at
    O(dx^2) for the transmission solution.
    """
    u = solution.values
    i0 = solution.grid.cells // 2
    dx = solution.grid.dx
    d_plus = (-3.0 * u[i0] + 4.0 * u[i0 + 1] - u[i0 + 2]) / (2.0 * dx)
    d_minus = (3.0 * u[i0] - 4.0 * u[i0 - 1] + u[i0 - 2]) / (2.0 * dx)
    return solution.a_plus0 * d_plus - solution.a_minus0 * d_minus


def truncation_half_width(T: float, a_max: float, x0: float = 0.0) -> float:
    """Half width 10 sqrt(2 a_max T) + |x0|: Gaussian tails below 1e-8."""
    return 10.0 * np.sqrt(2.0 * a_max * T) + abs(x0)


def richardson_value(a_1d, u0, T: float, x: float, *, cells: int = 4096,
                     a_max: float | None = None, agree_tol: float = 1e-6):
    """Reference value u(T, x) from two resolutions (cells and 2*cells).

    Solves on the truncated domain at both resolutions (dt scaled with dx)
    and returns ``(value, agreement)`` where ``value`` is the fine solution
    at x and ``agreement`` the coarse/fine difference there.  Raises
    UnstableConfig when the resolutions disagree beyond ``agree_tol`` -
    the value would not be trustworthy as an oracle.
    """
    a_plus, a_minus = _branch_callables(a_1d)
    if a_max is None:
        probe = np.linspace(-1.0, 1.0, 64)
        a_max = float(max(np.max(a_plus(probe)), np.max(a_minus(probe))))
    half = truncation_half_width(T, a_max, x)
    coarse = cn_solve((a_plus, a_minus), u0, T, Grid1D(half, cells, T / cells))(x)
    fine = cn_solve((a_plus, a_minus), u0, T, Grid1D(half, 2 * cells, T / (2 * cells)))(x)
    agreement = abs(float(fine) - float(coarse))
    if agreement > agree_tol:
        raise UnstableConfig(
            f"reference solution not grid-converged: resolutions differ by {agreement:.3g}"
        )
    return float(fine), agreement
