"""Monte Carlo estimators over independent scheme paths.

Estimates u(T, x0) = E[u0(X_T)] (whole space), E[u0(X_T) 1_{T <= tau}]
(parabolic killed at the exit of a bounded domain) and E[f(X_tau)]
(elliptic exit problem), plus the near-interface occupation statistic

    S(h) = h * sum_{i=0}^{n-1} E[exp(-c d^2(X_{t_i}, Gamma) / h)],

whose O(sqrt(h)) decay is the quantitative signature of the scheme's
interface corrections, and an empirical weak-convergence study against a
supplied reference value.

Reproducibility contract
------------------------
Path j of start point p consumes only its own counter-based substream
(numpy Philox keyed by (seed, p * 2^32 + j)) and exactly d normals per
step, so every increment is a pure function of (seed, point, path, step).
Paths are processed in fixed-size chunks (``RunConfig.chunk_size``); chunk
statistics are merged in chunk order with pairwise/compensated updates.
Results are therefore bitwise identical for any worker count; the chunk
size is part of the configuration.

Exit problems test, at every grid time including t = 0, whether the
position left the boundary-shifted domain

    { x : dist(x, boundary) > shift_const * |sigma(x)^T n(x)| * sqrt(h) },

the standard continuity correction for discretely monitored exits.  The
elliptic payoff is evaluated at the radial projection of the exiting
position onto the boundary.
"""

from __future__ import annotations

import dataclasses
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .coefficients import CoefficientField, regularize
from .errors import ConfigError, InsufficientResolution, UnstableConfig
from .scheme import _phi_step, phi_map, step_euler, step_regularized, step_transformed

logger = logging.getLogger(__name__)

# Continuity correction constant of the half-space boundary shift.
DEFAULT_SHIFT_CONST = 0.5826

# Upper bound on elements per drawn normal block (paths * steps * dim).
_BLOCK_TARGET = 4_000_000

SCHEMES = ("transformed", "regularized", "oracle1d")


# ---------------------------------------------------------------------------
# Payoffs (module level so they pickle by reference into worker processes)
# ---------------------------------------------------------------------------


def indicator_positive(x):
    """1 on the Plus side of the first coordinate, 0 elsewhere."""
    return (x[:, 0] > 0.0).astype(np.float64)


def squared_norm(x):
    return np.sum(x * x, axis=-1)


def boundary_sin_cos(x):
    """Boundary data sin(3 x1) + cos(4 x2) of the 2D elliptic benchmark."""
    return np.sin(3.0 * x[:, 0]) + np.cos(4.0 * x[:, 1])


def bump_initial(x):
    """Initial condition 10 (1 - |x|^2) of the 2D parabolic benchmark."""
    return 10.0 * (1.0 - np.sum(x * x, axis=-1))


@dataclass(frozen=True)
class ConstantPayoff:
    value: float

    def __call__(self, x):
        return np.full(x.shape[0], self.value)


PAYOFFS = {
    "indicator-positive": indicator_positive,
    "squared-norm": squared_norm,
    "paper-boundary": boundary_sin_cos,
    "paper-initial": bump_initial,
}


# ---------------------------------------------------------------------------
# Domains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnitDisc:
    """Open disc domain (the benchmark uses radius 1)."""

    radius: float = 1.0

    def contains(self, x):
        return np.sum(x * x, axis=-1) < self.radius * self.radius

    def distance_to_boundary(self, x):
        return self.radius - np.sqrt(np.sum(x * x, axis=-1))

    def outward_normal(self, x):
        norm = np.sqrt(np.sum(x * x, axis=-1))
        safe = np.where(norm > 0.0, norm, 1.0)[:, None]
        out = x / safe
        # The center has no preferred direction; any unit vector serves the
        # boundary-shift test there (the shift is negligible against the
        # full radius).
        out[norm == 0.0, 0] = 1.0
        return out

    def project_to_boundary(self, x):
        return x * (self.radius / np.sqrt(np.sum(x * x, axis=-1)))[:, None]


# ---------------------------------------------------------------------------
# Configuration and results
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """A complete, picklable description of one Monte Carlo run.

    Time stepping: parabolic runs give T together with exactly one of n
    (step count) or h (step size dividing T); elliptic runs (no T) give h
    directly.  For the regularized scheme the band half-width defaults to
    h^(1/4) unless ``epsilon`` overrides it.
    """

    field: CoefficientField
    N: int
    points: tuple
    seed: int = 0
    T: float | None = None
    n: int | None = None
    h: float | None = None
    scheme: str = "transformed"
    domain: UnitDisc | None = None
    epsilon: float | None = None
    shift_const: float = DEFAULT_SHIFT_CONST
    step_cap_time: float = 50.0
    chunk_size: int = 16384
    workers: int = 1

    def __post_init__(self):
        if self.N < 1:
            raise ConfigError("N must be >= 1")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        pts = tuple(tuple(float(c) for c in p) for p in self.points)
        if not pts:
            raise ConfigError("at least one start point is required")
        for p in pts:
            if len(p) != self.field.dim:
                raise ConfigError(f"start point {p} does not match dimension {self.field.dim}")
        object.__setattr__(self, "points", pts)
        if not (0 <= self.seed < 2**64):
            raise ConfigError("seed must fit in 64 bits")
        if self.T is None:
            if self.h is None or self.n is not None:
                raise ConfigError("elliptic runs (no T) need h and no n")
            if self.h <= 0:
                raise ConfigError("h must be positive")
        else:
            if self.T <= 0:
                raise ConfigError("T must be positive")
            if (self.n is None) == (self.h is None):
                raise ConfigError("give exactly one of n or h")
            if self.n is not None and self.n < 1:
                raise ConfigError("n must be >= 1")
            if self.h is not None:
                ratio = self.T / self.h
                if abs(ratio - round(ratio)) > 1e-9 * max(ratio, 1.0) or round(ratio) < 1:
                    raise ConfigError("h must divide T")
        if self.epsilon is not None and self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")
        if self.chunk_size < 1 or self.workers < 1:
            raise ConfigError("chunk_size and workers must be >= 1")

    @property
    def step_size(self) -> float:
        if self.h is not None:
            return self.h
        return self.T / self.n

    @property
    def n_steps(self) -> int | None:
        if self.T is None:
            return None
        if self.n is not None:
            return self.n
        return int(round(self.T / self.h))

    @property
    def epsilon_value(self) -> float:
        if self.epsilon is not None:
            return self.epsilon
        return self.step_size ** 0.25


@dataclass
class EstimatorResult:
    """Monte Carlo estimate with its bookkeeping counters."""

    mean: float
    stderr: float
    n_paths: int
    crossings: int
    corrections: int
    excluded: int
    seconds: float

    @property
    def excluded_fraction(self) -> float:
        return self.excluded / self.n_paths if self.n_paths else 0.0


# ---------------------------------------------------------------------------
# Chunk engine
# ---------------------------------------------------------------------------


@dataclass
class _Welford:
    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def absorb(self, values):
        n = int(values.size)
        if n == 0:
            return
        mean = float(np.mean(values))
        m2 = float(np.sum((values - mean) ** 2))
        self.merge(_Welford(n, mean, m2))

    def merge(self, other: "_Welford"):
        if other.count == 0:
            return
        if self.count == 0:
            self.count, self.mean, self.m2 = other.count, other.mean, other.m2
            return
        total = self.count + other.count
        delta = other.mean - self.mean
        self.mean += delta * other.count / total
        self.m2 += other.m2 + delta * delta * self.count * other.count / total
        self.count = total

    @property
    def stderr(self) -> float:
        if self.count < 2:
            return 0.0
        return math.sqrt(self.m2 / (self.count - 1)) / math.sqrt(self.count)


@dataclass
class _ChunkStats:
    payoff: _Welford
    occupation: _Welford | None
    crossings: int = 0
    corrections: int = 0
    excluded: int = 0

    def merge(self, other: "_ChunkStats"):
        self.payoff.merge(other.payoff)
        if self.occupation is not None and other.occupation is not None:
            self.occupation.merge(other.occupation)
        self.crossings += other.crossings
        self.corrections += other.corrections
        self.excluded += other.excluded


@dataclass(frozen=True)
class _ChunkTask:
    config: RunConfig
    point_index: int
    start: int
    size: int
    mode: str  # "terminal" | "killed" | "exit"
    payoff: object
    c_occupation: float | None = None
    disable_corrections: bool = False


def _stream_key(seed: int, point_index: int, path_index: int):
    return np.array([seed, (point_index << 32) + path_index], dtype=np.uint64)


class _PathStreams:
    """Per-path Philox substreams sharing one bit-generator core.

    Path j draws from Philox(counter=0, key=(seed, point<<32 + start + j)),
    exactly as if it owned a private generator (state is swapped in and out
    around each draw, which avoids one entropy-pulling construction per
    path).  Streams are pure functions of (seed, point, path) and of the
    number of values drawn so far, independent of block sizes, chunk
    boundaries and worker counts.
    """

    def __init__(self, seed: int, point_index: int, start: int, size: int):
        self._bitgen = np.random.Philox(counter=0, key=_stream_key(seed, point_index, start))
        self._gen = np.random.Generator(self._bitgen)
        self._seed = seed
        self._hi = point_index << 32
        self._start = start
        self._states = [None] * size

    def normals(self, j: int, shape):
        state = self._states[j]
        if state is None:
            self._bitgen.state = {
                "bit_generator": "Philox",
                "state": {
                    "counter": np.zeros(4, dtype=np.uint64),
                    "key": np.array([self._seed, self._hi + self._start + j], dtype=np.uint64),
                },
                "buffer": np.zeros(4, dtype=np.uint64),
                "buffer_pos": 4,
                "has_uint32": 0,
                "uinteger": 0,
            }
        else:
            self._bitgen.state = state
        out = self._gen.standard_normal(shape)
        self._states[j] = self._bitgen.state
        return out


def _fold(code):
    return np.where(code >= 0, np.int8(1), np.int8(-1))


def _run_chunk(task: _ChunkTask) -> _ChunkStats:
    cfg = task.config
    field = cfg.field
    iface = field.interface
    d = field.dim
    h = cfg.step_size
    sqrth = math.sqrt(h)
    size = task.size
    point = np.asarray(cfg.points[task.point_index], dtype=np.float64)

    regfield = None
    if cfg.scheme == "regularized":
        regfield = regularize(field, cfg.epsilon_value)
    if cfg.scheme == "oracle1d":
        if d != 1 or task.mode != "terminal":
            raise ConfigError("the oracle1d scheme supports 1D whole-space runs only")
        a_plus0 = float(np.asarray(field.a_plus(np.zeros((1, 1))))[0, 0, 0])
        a_minus0 = float(np.asarray(field.a_minus(np.zeros((1, 1))))[0, 0, 0])

    streams = _PathStreams(cfg.seed, task.point_index, task.start, size)

    pos = np.tile(point, (size, 1))
    side = _fold(iface.side_code(pos))
    if cfg.scheme == "oracle1d":
        y_state = phi_map(pos[:, 0], a_plus0, a_minus0)

    payoff_vals = np.full(size, np.nan)
    excluded = np.zeros(size, dtype=bool)
    occ = np.zeros(size) if task.c_occupation is not None else None

    cap = cfg.n_steps if task.mode != "exit" else max(1, math.ceil(cfg.step_cap_time / h))
    ids = np.arange(size)
    crossings = 0
    corrections = 0
    step_idx = 0

    def kill(mask_local, positions):
        """Record termination for the alive paths flagged by mask_local."""
        gone = ids[mask_local]
        if task.mode == "exit":
            exit_pos = cfg.domain.project_to_boundary(positions[mask_local])
            payoff_vals[gone] = task.payoff(exit_pos)
        else:
            payoff_vals[gone] = 0.0

    while ids.size and step_idx < cap:
        block = max(1, min(2048, _BLOCK_TARGET // max(ids.size * d, 1), cap - step_idx))
        z = np.empty((ids.size, block, d))
        for row, j in enumerate(ids):
            z[row] = streams.normals(j, (block, d))
        rows = np.arange(ids.size)
        for t in range(block):
            # Exit test at the current grid time (t_0 included).  Points
            # already past the boundary are killed before any coefficient
            # evaluation (the branch formulas need not extend far outside).
            if cfg.domain is not None:
                dist = cfg.domain.distance_to_boundary(pos)
                hard_out = dist <= 0.0
                if hard_out.any():
                    kill(hard_out, pos)
                    keep = ~hard_out
                    ids, rows, pos, side, dist = ids[keep], rows[keep], pos[keep], side[keep], dist[keep]
                if ids.size == 0:
                    break
            if regfield is not None:
                sigma = regfield.sigma(pos)
                drift = regfield.drift(pos)
            elif cfg.scheme == "transformed":
                sigma = field.sigma(pos, side)
                drift = field.drift(pos, side)
            else:
                sigma = drift = None
            if cfg.domain is not None:
                nhat = cfg.domain.outward_normal(pos)
                w = np.einsum("mji,mj->mi", sigma, nhat)
                shift = cfg.shift_const * sqrth * np.sqrt(np.sum(w * w, axis=-1))
                out = dist <= shift
                if out.any():
                    kill(out, pos)
                    keep = ~out
                    ids, rows, pos, side = ids[keep], rows[keep], pos[keep], side[keep]
                    sigma, drift = sigma[keep], drift[keep]
                if ids.size == 0:
                    break
            if occ is not None:
                fnu = np.atleast_1d(iface.signed_normal_distance(pos))
                occ[ids] += np.exp(-(task.c_occupation / h) * fnu * fnu)
            dw = z[rows, t, :] * sqrth
            if cfg.scheme == "oracle1d":
                ysub = y_state[ids]
                ysub, xsub = _phi_step(ysub, dw[:, 0], a_plus0, a_minus0)
                y_state[ids] = ysub
                new_side = np.where(xsub >= 0.0, np.int8(1), np.int8(-1))
                crossings += int(np.count_nonzero(new_side != side))
                pos = xsub[:, None]
                side = new_side
            elif cfg.scheme == "regularized" or task.disable_corrections:
                if regfield is not None:
                    pos = step_regularized(pos, dw, h, regfield, sigma=sigma, drift=drift)
                else:
                    pos = step_euler(pos, side, dw, h, field, sigma=sigma, drift=drift)
                new_side = _fold(iface.side_code(pos))
                crossings += int(np.count_nonzero(new_side != side))
                side = new_side
            else:
                pos, side, ncorr, ncross, bad = step_transformed(
                    pos, side, dw, h, field, iface, sigma=sigma, drift=drift
                )
                corrections += ncorr
                crossings += ncross
                if bad is not None and bad.any():
                    excluded[ids[bad]] = True
                    keep = ~bad
                    ids, rows, pos, side = ids[keep], rows[keep], pos[keep], side[keep]
                    if ids.size == 0:
                        break
            step_idx += 1
        if ids.size == 0:
            break

    if task.mode == "exit":
        if ids.size:
            # Step cap reached with paths still inside: excluded, counted.
            excluded[ids] = True
    else:
        # Parabolic: the final grid time is also exit-tested (killed mode).
        if cfg.domain is not None and ids.size:
            dist = cfg.domain.distance_to_boundary(pos)
            hard_out = dist <= 0.0
            safe = ~hard_out
            out = hard_out.copy()
            if safe.any():
                if regfield is not None:
                    sigma = regfield.sigma(pos[safe])
                else:
                    sigma = field.sigma(pos[safe], side[safe])
                nhat = cfg.domain.outward_normal(pos[safe])
                w = np.einsum("mji,mj->mi", sigma, nhat)
                shift = cfg.shift_const * sqrth * np.sqrt(np.sum(w * w, axis=-1))
                out[safe] = dist[safe] <= shift
            if out.any():
                kill(out, pos)
                keep = ~out
                ids, pos = ids[keep], pos[keep]
        if ids.size:
            payoff_vals[ids] = task.payoff(pos)

    included = ~excluded
    vals = payoff_vals[included]
    if not np.all(np.isfinite(vals)):
        raise UnstableConfig(
            "non-finite payoff values: the coefficient field was evaluated outside "
            "its validity region (see the preset documentation)"
        )
    stats = _ChunkStats(payoff=_Welford(), occupation=_Welford() if occ is not None else None)
    stats.payoff.absorb(vals)
    if occ is not None:
        stats.occupation.absorb(h * occ[included])
    stats.crossings = crossings
    stats.corrections = corrections
    stats.excluded = int(np.count_nonzero(excluded))
    return stats


# ---------------------------------------------------------------------------
# Drivers
# ---------------------------------------------------------------------------


def _tasks_for_point(config, point_index, mode, payoff, c_occ, disable_corrections):
    for start in range(0, config.N, config.chunk_size):
        size = min(config.chunk_size, config.N - start)
        yield _ChunkTask(config, point_index, start, size, mode, payoff, c_occ, disable_corrections)


def _run_point(config, point_index, mode, payoff, c_occ=None, disable_corrections=False):
    t0 = time.perf_counter()
    tasks = list(_tasks_for_point(config, point_index, mode, payoff, c_occ, disable_corrections))
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(_run_chunk, tasks))
    else:
        parts = [_run_chunk(t) for t in tasks]
    total = parts[0]
    for part in parts[1:]:
        total.merge(part)
    seconds = time.perf_counter() - t0
    result = EstimatorResult(
        mean=total.payoff.mean,
        stderr=total.payoff.stderr,
        n_paths=config.N,
        crossings=total.crossings,
        corrections=total.corrections,
        excluded=total.excluded,
        seconds=seconds,
    )
    return result, total.occupation


def _mode_for(config: RunConfig) -> str:
    if config.T is None:
        if config.domain is None:
            raise ConfigError("elliptic runs need a bounded domain")
        return "exit"
    return "terminal" if config.domain is None else "killed"


def estimate_parabolic(config: RunConfig, payoff) -> list[EstimatorResult]:
    """E[u0(X_T)] on the whole space, one result per start point."""
    if config.domain is not None:
        raise ConfigError("estimate_parabolic is the whole-space estimator; drop the domain")
    if config.T is None:
        raise ConfigError("parabolic runs need a horizon T")
    return [_run_point(config, i, "terminal", payoff)[0] for i in range(len(config.points))]


def estimate_parabolic_bounded(config: RunConfig, payoff) -> list[EstimatorResult]:
    """E[u0(X_T) 1_{T <= tau}] with tau the exit of the shifted domain."""
    if config.domain is None or config.T is None:
        raise ConfigError("bounded parabolic runs need a domain and a horizon T")
    return [_run_point(config, i, "killed", payoff)[0] for i in range(len(config.points))]


def estimate_elliptic_exit(config: RunConfig, boundary_payoff) -> list[EstimatorResult]:
    """E[f(X_tau)] with f evaluated at the radial boundary projection."""
    if config.domain is None:
        raise ConfigError("exit runs need a bounded domain")
    if config.T is not None:
        raise ConfigError("exit runs take no horizon; give h directly")
    return [_run_point(config, i, "exit", boundary_payoff)[0] for i in range(len(config.points))]


def run_estimator(config: RunConfig, payoff) -> list[EstimatorResult]:
    """Dispatch to the estimator selected by (T present?, domain present?)."""
    mode = _mode_for(config)
    if mode == "terminal":
        return estimate_parabolic(config, payoff)
    if mode == "killed":
        return estimate_parabolic_bounded(config, payoff)
    return estimate_elliptic_exit(config, payoff)


def occupation_estimates(config: RunConfig, c: float) -> list[EstimatorResult]:
    """S(h) per start point, packaged with its Monte Carlo standard error."""
    if config.T is None:
        raise ConfigError("the occupation statistic needs a horizon T")
    if c <= 0:
        raise ConfigError("the exponent constant c must be positive")
    mode = "terminal" if config.domain is None else "killed"
    out = []
    for i in range(len(config.points)):
        result, occ = _run_point(config, i, mode, ConstantPayoff(0.0), c_occ=c)
        out.append(
            EstimatorResult(
                mean=occ.mean,
                stderr=occ.stderr,
                n_paths=config.N,
                crossings=result.crossings,
                corrections=result.corrections,
                excluded=result.excluded,
                seconds=result.seconds,
            )
        )
    return out


def occupation_diagnostic(config: RunConfig, c: float) -> float:
    """Monte Carlo estimate of S(h) for a single-start-point configuration."""
    if len(config.points) != 1:
        raise ConfigError("occupation_diagnostic expects exactly one start point")
    return occupation_estimates(config, c)[0].mean


# ---------------------------------------------------------------------------
# Convergence study
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceRow:
    h: float
    estimate: float
    error: float
    stderr: float
    used: bool


@dataclass(frozen=True)
class ConvergenceStudy:
    rows: tuple
    slope: float
    reference: float


def fit_loglog_slope(hs, errors) -> float:
    """Least-squares slope of log|error| against log h."""
    lx = np.log(np.asarray(hs, dtype=np.float64))
    ly = np.log(np.asarray(errors, dtype=np.float64))
    lxc = lx - np.mean(lx)
    return float(np.sum(lxc * (ly - np.mean(ly))) / np.sum(lxc * lxc))


def convergence_study(config: RunConfig, payoff, h_list, reference: float) -> ConvergenceStudy:
    """Errors against ``reference`` over an h grid and the fitted rate.

    Points whose error does not exceed 3 stderr are noise dominated and are
    excluded from the fit; fewer than two usable points raises
    InsufficientResolution (the exception carries the rows).  A warning is
    logged when fewer than four points are usable, the sign that N is too
    small for the bias to dominate.
    """
    if len(config.points) != 1:
        raise ConfigError("convergence_study expects exactly one start point")
    hs = sorted(set(float(h) for h in h_list), reverse=True)
    if not hs:
        raise ConfigError("h list must not be empty")
    rows = []
    for h in hs:
        run_cfg = dataclasses.replace(config, h=h, n=None)
        res = run_estimator(run_cfg, payoff)[0]
        error = abs(res.mean - reference)
        rows.append((h, res.mean, error, res.stderr))
    used = [error > 3.0 * stderr for (_, _, error, stderr) in rows]
    final_rows = tuple(
        ConvergenceRow(h=h, estimate=est, error=err, stderr=se, used=u)
        for (h, est, err, se), u in zip(rows, used)
    )
    n_used = sum(used)
    if n_used < 2:
        raise InsufficientResolution(
            "all errors are noise dominated; increase N or coarsen h",
            rows=final_rows,
        )
    if n_used < 4:
        logger.warning(
            "only %d of %d convergence points exceed 3 stderr; the fitted slope is fragile",
            n_used, len(final_rows),
        )
    slope = fit_loglog_slope(
        [r.h for r in final_rows if r.used], [r.error for r in final_rows if r.used]
    )
    return ConvergenceStudy(rows=final_rows, slope=slope, reference=reference)


# ---------------------------------------------------------------------------
# 1D pathwise equivalence runner
# ---------------------------------------------------------------------------


def oracle1d_max_discrepancy(a_plus: float, a_minus: float, x0: float, T: float,
                             n: int, n_paths: int, seed: int = 0,
                             disable_corrections: bool = False) -> float:
    """Max pathwise gap between the transformed and phi-transform schemes.

    Both schemes consume identical Brownian increments; for piecewise
    constant 1D coefficients they coincide exactly, so the returned maximum
    over all paths and grid times is pure floating-point noise unless the
    corrections are deliberately disabled (the negative control).
    """
    from .coefficients import piecewise_constant_1d

    field = piecewise_constant_1d(a_plus, a_minus)
    iface = field.interface
    h = T / n
    sqrth = math.sqrt(h)
    rng = np.random.Generator(np.random.Philox(key=_stream_key(seed, 0, 0)))
    pos = np.full((n_paths, 1), float(x0))
    side = _fold(iface.side_code(pos))
    y = phi_map(pos[:, 0], a_plus, a_minus)
    worst = 0.0
    for _ in range(n):
        z = rng.standard_normal(n_paths)
        dw = (z * sqrth)[:, None]
        if disable_corrections:
            pos = step_euler(pos, side, dw, h, field)
            side = _fold(iface.side_code(pos))
        else:
            pos, side, _, _, _ = step_transformed(pos, side, dw, h, field, iface)
        y, x_phi = _phi_step(y, z * sqrth, a_plus, a_minus)
        worst = max(worst, float(np.max(np.abs(pos[:, 0] - x_phi))))
    return worst
