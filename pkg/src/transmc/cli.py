"""Command-line front end.

Subcommands
-----------
estimate   run the configured estimator at each start point, write CSV rows
           (point_x, point_y, h, N, estimate, stderr, crossings,
           corrections, excluded, seconds)
converge   error against a reference value over an h grid, plus the fitted
           log-log slope; CSV rows (h, error, stderr, estimate, used) under
           a metadata comment line
compare    transformed and regularized schemes side by side with shared
           seeds; CSV rows (point_x, point_y, h, N, benchmark, transformed,
           stderr_transformed, regularized, stderr_regularized)
oracle1d   pathwise equality suite of the transformed scheme against the 1D
           phi-transform scheme (piecewise-constant preset only)
diagnose   near-interface occupation statistic S(h) over an h grid with the
           S(h_i)/S(h_{i-1}) ratio column

Configs are JSON documents validated against a closed schema (unknown keys
are rejected before anything runs).  Exit codes: 0 success, 1 validation
error, 2 numerical failure (excluded-path fraction above 1 percent, a
failed oracle suite, or an unstable run).

Floats are written with repr round-trip precision, so re-running a command
with the same config and seed reproduces the CSV byte for byte (the
wall-clock seconds column is the only varying field).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import jsonschema
import numpy as np

from . import montecarlo as mc
from .coefficients import PRESETS, build_preset
from .errors import ConfigError, InsufficientResolution, TransmcError
from .montecarlo import PAYOFFS, RunConfig, UnitDisc
from .reference1d import richardson_value

EXCLUDED_FRACTION_LIMIT = 0.01

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["preset", "points", "N"],
    "properties": {
        "preset": {"enum": list(PRESETS)},
        "preset_params": {"type": "object"},
        "scheme": {"enum": list(mc.SCHEMES)},
        "points": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "array",
                "minItems": 1,
                "maxItems": 3,
                "items": {"type": "number"},
            },
        },
        "T": {"type": "number", "exclusiveMinimum": 0},
        "n": {"type": "integer", "minimum": 1},
        "h": {"type": "number", "exclusiveMinimum": 0},
        "N": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "epsilon_rule": {
            "oneOf": [{"const": "h^0.25"}, {"type": "number", "exclusiveMinimum": 0}]
        },
        "domain": {"enum": ["unit-disc", "none"]},
        "payoff": {"enum": sorted(PAYOFFS)},
        "benchmarks": {"type": "array", "items": {"type": "number"}},
        "h_list": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "number", "exclusiveMinimum": 0},
        },
        "reference": {"oneOf": [{"type": "number"}, {"const": "reference1d"}]},
        "c_occupation": {"type": "number", "exclusiveMinimum": 0},
        "output": {"type": "string"},
        "workers": {"type": "integer", "minimum": 1},
        "chunk_size": {"type": "integer", "minimum": 1},
        "shift_const": {"type": "number", "minimum": 0},
        "step_cap_time": {"type": "number", "exclusiveMinimum": 0},
        "disable_corrections": {"type": "boolean"},
    },
}


def load_config(path: str) -> dict:
    """Read and schema-validate a config file; raises ConfigError."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid config: {exc.message}") from exc
    return cfg


def _epsilon_from(cfg):
    rule = cfg.get("epsilon_rule", "h^0.25")
    return None if rule == "h^0.25" else float(rule)


def _default_payoff_name(cfg) -> str:
    if "payoff" in cfg:
        return cfg["payoff"]
    preset = cfg["preset"]
    if preset == "paper-example-2d":
        return "paper-initial" if "T" in cfg else "paper-boundary"
    if preset == "piecewise-constant-1d":
        return "indicator-positive"
    return "squared-norm"


def build_run_config(cfg: dict, *, seed=None, workers=None, h=None, n=None) -> RunConfig:
    """Assemble the RunConfig; h/n overrides replace the configured step."""
    field = build_preset(cfg["preset"], cfg.get("preset_params"))
    domain = UnitDisc() if cfg.get("domain", "none") == "unit-disc" else None
    if h is None and n is None:
        h = cfg.get("h")
        n = cfg.get("n")
    kwargs = {}
    if "shift_const" in cfg:
        kwargs["shift_const"] = cfg["shift_const"]
    if "step_cap_time" in cfg:
        kwargs["step_cap_time"] = cfg["step_cap_time"]
    if "chunk_size" in cfg:
        kwargs["chunk_size"] = cfg["chunk_size"]
    return RunConfig(
        field=field,
        N=cfg["N"],
        points=tuple(tuple(p) for p in cfg["points"]),
        seed=cfg.get("seed", 0) if seed is None else seed,
        T=cfg.get("T"),
        n=n,
        h=h,
        scheme=cfg.get("scheme", "transformed"),
        domain=domain,
        epsilon=_epsilon_from(cfg),
        workers=workers if workers is not None else cfg.get("workers", 1),
        **kwargs,
    )


def _fmt(value) -> str:
    """Round-trip text for CSV cells."""
    if value is None or value == "":
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path: str, header_comment: str | None, columns, rows):
    lines = []
    if header_comment:
        lines.append(f"# {header_comment}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _point_cells(point):
    x = point[0]
    y = point[1] if len(point) > 1 else ""
    return x, y


def _reference_value(cfg, payoff):
    ref = cfg.get("reference")
    if ref is None:
        raise ConfigError("converge needs a 'reference' value (number or 'reference1d')")
    if ref == "reference1d":
        field = build_preset(cfg["preset"], cfg.get("preset_params"))
        if field.dim != 1:
            raise ConfigError("'reference1d' references are available for 1D presets only")
        if "T" not in cfg:
            raise ConfigError("'reference1d' references require a horizon T")
        x0 = cfg["points"][0][0]
        value, _ = richardson_value(
            (field.a_plus, field.a_minus),
            lambda x: payoff(np.asarray(x, dtype=np.float64)[:, None]),
            cfg["T"],
            x0,
            a_max=field.Lam,
        )
        return value
    return float(ref)


def _flag_excluded(results) -> bool:
    return any(r.excluded_fraction > EXCLUDED_FRACTION_LIMIT for r in results)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_estimate(cfg, out, as_json) -> int:
    run = build_run_config(cfg)
    payoff = PAYOFFS[_default_payoff_name(cfg)]
    results = mc.run_estimator(run, payoff)
    columns = ["point_x", "point_y", "h", "N", "estimate", "stderr",
               "crossings", "corrections", "excluded", "seconds"]
    rows = []
    for point, res in zip(run.points, results):
        x, y = _point_cells(point)
        rows.append([x, y, run.step_size, run.N, res.mean, res.stderr,
                     res.crossings, res.corrections, res.excluded, res.seconds])
    _write_csv(out, None, columns, rows)
    if as_json:
        print(json.dumps({
            "command": "estimate",
            "scheme": run.scheme,
            "h": run.step_size,
            "results": [
                {"point": list(p), "estimate": r.mean, "stderr": r.stderr,
                 "excluded": r.excluded}
                for p, r in zip(run.points, results)
            ],
        }, sort_keys=True))
    else:
        for point, res in zip(run.points, results):
            print(f"point {point}: estimate {res.mean!r} (stderr {res.stderr:.3g}, "
                  f"crossings {res.crossings}, excluded {res.excluded})")
    if _flag_excluded(results):
        print("numerical failure: excluded-path fraction exceeds 1%", file=sys.stderr)
        return 2
    return 0


def cmd_converge(cfg, out, as_json) -> int:
    if "h_list" not in cfg:
        raise ConfigError("converge needs 'h_list'")
    if len(cfg["points"]) != 1:
        raise ConfigError("converge expects exactly one start point")
    payoff = PAYOFFS[_default_payoff_name(cfg)]
    reference = _reference_value(cfg, payoff)
    run = build_run_config(cfg, h=cfg["h_list"][0])
    meta = (f"preset={cfg['preset']} scheme={run.scheme} point={tuple(run.points[0])} "
            f"N={run.N} seed={run.seed} reference={reference!r}")
    noise_dominated = False
    try:
        study = mc.convergence_study(run, payoff, cfg["h_list"], reference)
        rows = study.rows
        slope = study.slope
    except InsufficientResolution as exc:
        rows = exc.rows
        slope = None
        noise_dominated = True
    columns = ["h", "error", "stderr", "estimate", "used"]
    _write_csv(out, meta, columns,
               [[r.h, r.error, r.stderr, r.estimate, int(r.used)] for r in rows])
    if noise_dominated:
        print("noise-dominated: fewer than 2 points exceed 3*stderr; no slope fitted")
    else:
        print(f"fitted slope: {slope!r} over {sum(r.used for r in rows)} points "
              f"(reference {reference!r})")
    if as_json:
        print(json.dumps({
            "command": "converge", "reference": reference, "slope": slope,
            "noise_dominated": noise_dominated,
            "rows": [{"h": r.h, "error": r.error, "stderr": r.stderr, "used": r.used}
                     for r in rows],
        }, sort_keys=True))
    return 0


def cmd_compare(cfg, out, as_json) -> int:
    h_values = cfg.get("h_list") or [build_run_config(cfg).step_size]
    benchmarks = cfg.get("benchmarks")
    if benchmarks is not None and len(benchmarks) != len(cfg["points"]):
        raise ConfigError("benchmarks must align with points")
    columns = ["point_x", "point_y", "h", "N", "benchmark", "transformed",
               "stderr_transformed", "regularized", "stderr_regularized"]
    rows = []
    flagged = False
    base = dict(cfg)
    for h in sorted(set(float(v) for v in h_values), reverse=True):
        res_by_scheme = {}
        for scheme in ("transformed", "regularized"):
            base["scheme"] = scheme
            run = build_run_config(base, h=h)
            payoff = PAYOFFS[_default_payoff_name(cfg)]
            res_by_scheme[scheme] = mc.run_estimator(run, payoff)
            flagged = flagged or _flag_excluded(res_by_scheme[scheme])
        for idx, point in enumerate(cfg["points"]):
            x, y = _point_cells(point)
            tr = res_by_scheme["transformed"][idx]
            rg = res_by_scheme["regularized"][idx]
            bench = benchmarks[idx] if benchmarks is not None else ""
            rows.append([x, y, h, cfg["N"], bench, tr.mean, tr.stderr, rg.mean, rg.stderr])
    meta = (f"preset={cfg['preset']} N={cfg['N']} seed={cfg.get('seed', 0)} "
            f"epsilon_rule={cfg.get('epsilon_rule', 'h^0.25')}")
    _write_csv(out, meta, columns, rows)
    if as_json:
        print(json.dumps({"command": "compare", "rows": [
            {"point": [r[0], r[1]], "h": r[2], "benchmark": r[4] if r[4] != "" else None,
             "transformed": r[5], "regularized": r[7]} for r in rows
        ]}, sort_keys=True))
    if flagged:
        print("numerical failure: excluded-path fraction exceeds 1%", file=sys.stderr)
        return 2
    return 0


def cmd_oracle1d(cfg, out, as_json) -> int:
    if cfg["preset"] != "piecewise-constant-1d":
        raise ConfigError("oracle1d runs on the piecewise-constant-1d preset")
    params = cfg.get("preset_params", {})
    a_plus = float(params.get("a_plus", 2.0))
    a_minus = float(params.get("a_minus", 1.0))
    run = build_run_config(cfg)
    if run.n_steps is None:
        raise ConfigError("oracle1d needs T with n or h")
    x0 = run.points[0][0]
    worst = mc.oracle1d_max_discrepancy(
        a_plus, a_minus, x0, run.T, run.n_steps, run.N, seed=run.seed,
        disable_corrections=bool(cfg.get("disable_corrections", False)),
    )
    passed = worst <= 1e-10
    print(f"max pathwise discrepancy over {run.N} paths x {run.n_steps} steps: {worst:.3e} "
          f"-> {'PASS' if passed else 'FAIL'} (tolerance 1e-10)")
    if as_json:
        print(json.dumps({"command": "oracle1d", "max_discrepancy": worst,
                          "passed": passed}, sort_keys=True))
    return 0 if passed else 2


def cmd_diagnose(cfg, out, as_json) -> int:
    if "h_list" not in cfg:
        raise ConfigError("diagnose needs 'h_list'")
    if len(cfg["points"]) != 1:
        raise ConfigError("diagnose expects exactly one start point")
    c = float(cfg.get("c_occupation", 0.5))
    rows = []
    prev = None
    for h in sorted(set(float(v) for v in cfg["h_list"]), reverse=True):
        run = build_run_config(cfg, h=h)
        res = mc.occupation_estimates(run, c)[0]
        ratio = "" if prev is None else res.mean / prev
        rows.append([h, res.mean, res.stderr, ratio])
        prev = res.mean
    meta = (f"preset={cfg['preset']} point={tuple(cfg['points'][0])} N={cfg['N']} "
            f"seed={cfg.get('seed', 0)} c={c!r}")
    _write_csv(out, meta, ["h", "S", "stderr", "ratio"], rows)
    for h, s, se, ratio in rows:
        extra = "" if ratio == "" else f" ratio {ratio:.4f}"
        print(f"h={h!r}: S={s!r} (stderr {se:.3g}){extra}")
    if as_json:
        print(json.dumps({"command": "diagnose", "c": c, "rows": [
            {"h": r[0], "S": r[1], "stderr": r[2],
             "ratio": None if r[3] == "" else r[3]} for r in rows
        ]}, sort_keys=True))
    return 0


COMMANDS = {
    "estimate": cmd_estimate,
    "converge": cmd_converge,
    "compare": cmd_compare,
    "oracle1d": cmd_oracle1d,
    "diagnose": cmd_diagnose,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="transmc",
        description="Monte Carlo solver for divergence-form PDEs with a "
                    "discontinuous coefficient across an interface",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--workers", type=int, default=None, help="worker process count")
        p.add_argument("--out", default=None, help="output CSV path ('-' = stdout)")
        p.add_argument("--json", action="store_true", help="print a JSON summary")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.workers is not None:
            cfg["workers"] = args.workers
        out = args.out or cfg.get("output", "-")
        return COMMANDS[args.command](cfg, out, args.json)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except TransmcError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
