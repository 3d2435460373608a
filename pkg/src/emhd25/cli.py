"""Command-line entry point wiring configuration to experiments.

Subcommands: init-data, run, frozen-run, approx-scan, region, sweep.
Each one writes into an output directory: the fully resolved
configuration (an INI echo a rerun can consume verbatim), a manifest
with the package version and a hash of that configuration, and the
command's CSV or checkpoint artifacts.  Outputs carry no timestamps or
machine identifiers, so a rerun from the echoed configuration is
byte-identical.

Exit codes: 0 on success, 2 for configuration errors, 3 when a grid or
trajectory cannot resolve the requested scales, and 4 for numeric
failure during time integration.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .approx import ApproxSolution, PhaseResolutionError, abar_norm_scan
from .diagnostics import (
    DiagnosticsRecord,
    default_s_grid,
    fit_exponent,
    inflation_report,
    make_probe,
    records_to_csv,
)
from .initial_data import (
    UnderResolvedError,
    check_grid,
    make_b0,
    make_initial_data,
    make_u0,
    normalization_factor,
    required_resolution,
)
from .params import ParamSet
from .region import region_sweep, sweep_to_csv
from .solver import (
    STATUS_COMPLETED,
    STATUS_RESOLUTION,
    SolverConfig,
    run,
    run_frozen_velocity,
)
from .spectral import Grid, derivative, sobolev_norm, sobolev_norm_vector
from .state import save_checkpoint

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOLUTION = 3
EXIT_NUMERIC = 4

#: Environment variable controlling sweep parallelism; the only
#: environment input the tool reads.
WORKERS_ENV = "EMHD25_WORKERS"

_DEFAULTS = {
    "lam": "8.0",
    "beta": "3.5",
    "gamma": "1.2",
    "zeta": "1.48",
    "n": "auto",
    "box": "auto",
    "normalize": "false",
    "s_grid": "auto",
    "t_end": "t_n",
    "dt_safety": "0.5",
    "nu": "0.0",
    "p_hyper": "4",
    "dealias": "true",
    "output_stride": "1",
    "max_steps": "10000000",
    "include_perturbation": "true",
    "t_min": "auto",
    "t_max": "auto",
    "num_times": "9",
    "beta_grid": "3.5",
    "gamma_grid": "1.2",
    "lams": "8.0,16.0,32.0",
    "mode": "frozen-run",
    "eval_t": "auto",
}

_PARAM_KEYS = ("lam", "beta", "gamma", "zeta")
_GRID_KEYS = ("n", "box")
_SOLVER_KEYS = (
    "t_end",
    "dt_safety",
    "nu",
    "p_hyper",
    "dealias",
    "output_stride",
    "max_steps",
    "include_perturbation",
)

KEYS = {
    "init-data": _PARAM_KEYS + _GRID_KEYS + ("normalize", "s_grid"),
    "run": _PARAM_KEYS + _GRID_KEYS + ("normalize", "s_grid") + _SOLVER_KEYS,
    "frozen-run": _PARAM_KEYS + _GRID_KEYS + ("normalize", "s_grid") + _SOLVER_KEYS,
    "approx-scan": _PARAM_KEYS
    + _GRID_KEYS
    + ("s_grid", "t_min", "t_max", "num_times"),
    "region": ("beta_grid", "gamma_grid"),
    "sweep": ("lams", "beta", "gamma", "zeta")
    + _GRID_KEYS
    + ("normalize", "s_grid", "mode", "eval_t")
    + tuple(k for k in _SOLVER_KEYS if k != "t_end"),
}


class ConfigError(ValueError):
    """A configuration value is missing, malformed, or out of range."""


def _as_float(cfg: dict[str, str], key: str) -> float:
    try:
        return float(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"{key} must be a number, got {cfg[key]!r}") from exc


def _as_int(cfg: dict[str, str], key: str) -> int:
    try:
        return int(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"{key} must be an integer, got {cfg[key]!r}") from exc


def _as_bool(cfg: dict[str, str], key: str) -> bool:
    text = cfg[key].strip().lower()
    if text in ("true", "1", "yes", "on"):
        return True
    if text in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"{key} must be a boolean, got {cfg[key]!r}")


def _float_list(cfg: dict[str, str], key: str) -> list[float]:
    items = [part.strip() for part in cfg[key].split(",") if part.strip()]
    try:
        return [float(part) for part in items]
    except ValueError as exc:
        raise ConfigError(f"{key} must be comma-separated numbers") from exc


def _str_list(cfg: dict[str, str], key: str) -> list[str]:
    return [part.strip() for part in cfg[key].split(",") if part.strip()]


def _render_float(x: float) -> str:
    return repr(float(x))


def _render_float_list(xs) -> str:
    return ",".join(repr(float(x)) for x in xs)


def _make_params(cfg: dict[str, str]) -> ParamSet:
    try:
        return ParamSet(
            lam=_as_float(cfg, "lam"),
            beta=_as_float(cfg, "beta"),
            gamma=_as_float(cfg, "gamma"),
            zeta=_as_float(cfg, "zeta"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _resolve_grid(p: ParamSet, cfg: dict[str, str]) -> Grid:
    """Concrete grid from possibly-auto n and box, echo-canonicalized."""
    if cfg["box"] == "auto":
        box = 8.0 / p.lam
    else:
        box = _as_float(cfg, "box")
    if cfg["n"] == "auto":
        # Floor of 512: at the auto box size the data's spectral tail on a
        # 256-cell grid sits at the under-resolution abort threshold.
        need = required_resolution(p, box)
        n = 512
        while n < need and n < 8192:
            n *= 2
    else:
        n = _as_int(cfg, "n")
    grid = Grid(n, box)
    check_grid(p, grid)
    cfg["box"] = _render_float(box)
    cfg["n"] = str(n)
    return grid


def _resolve_s_grid(cfg: dict[str, str], beta: float) -> tuple[float, ...]:
    if cfg["s_grid"] == "auto":
        s_values = default_s_grid(beta)
    else:
        s_values = tuple(_float_list(cfg, "s_grid"))
    cfg["s_grid"] = _render_float_list(s_values)
    return s_values


def _solver_config(cfg: dict[str, str], t_end: float) -> SolverConfig:
    try:
        return SolverConfig(
            t_end=t_end,
            dt_safety=_as_float(cfg, "dt_safety"),
            nu=_as_float(cfg, "nu"),
            p_hyper=_as_int(cfg, "p_hyper"),
            dealias=_as_bool(cfg, "dealias"),
            output_stride=_as_int(cfg, "output_stride"),
            max_steps=_as_int(cfg, "max_steps"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _guarded_probe(p: ParamSet, s_values, sol: ApproxSolution | None):
    """Record probe that drops the carrier comparison beyond its horizon."""
    if sol is None:
        return make_probe(p, s_values)
    horizon = sol.max_resolved_time()
    full = make_probe(p, s_values, sol=sol)
    bare = make_probe(p, s_values)

    def probe(state, realized_dt):
        if state.t <= horizon:
            return full(state, realized_dt)
        return bare(state, realized_dt)

    return probe


def _write_config(cfg: dict[str, str], keys, path: Path) -> None:
    parser = configparser.ConfigParser(interpolation=None)
    parser["experiment"] = {k: cfg[k] for k in sorted(keys)}
    with open(path, "w") as handle:
        parser.write(handle)


def _parameter_hash(cfg: dict[str, str], keys) -> str:
    blob = "\n".join(f"{k}={cfg[k]}" for k in sorted(keys))
    return hashlib.sha256(blob.encode()).hexdigest()


def _write_manifest(out: Path, sub: str, cfg: dict[str, str], keys) -> None:
    manifest = {
        "package_version": __version__,
        "parameter_hash": _parameter_hash(cfg, keys),
        "subcommand": sub,
    }
    with open(out / "manifest.json", "w") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _status_exit(status: str) -> int:
    if status == STATUS_COMPLETED:
        return EXIT_OK
    if status == STATUS_RESOLUTION:
        return EXIT_RESOLUTION
    return EXIT_NUMERIC


def cmd_init_data(cfg: dict[str, str], out: Path) -> int:
    p = _make_params(cfg)
    grid = _resolve_grid(p, cfg)
    s_values = _resolve_s_grid(cfg, p.beta)
    normalize = _as_bool(cfg, "normalize")
    state = make_initial_data(p, grid, normalize=normalize)
    save_checkpoint(out / "state.npz", state)
    u0 = make_u0(p, grid)
    factor = normalization_factor(
        state.a, make_b0(p, grid), p.beta
    ) if normalize else 1.0
    du_sup = max(
        float(np.abs(derivative(comp, ox, oy).values).max())
        for comp in (u0.x, u0.y)
        for ox, oy in ((1, 0), (0, 1))
    )
    rows = []
    for s in s_values:
        rows.append(("a0", f"{s:+g}", "hom", sobolev_norm(state.a, s)))
        if s >= 0.0:
            rows.append(("b0", f"{s:+g}", "hom", sobolev_norm(state.b, s)))
        else:
            rows.append(
                ("b0", f"{s:+g}", "inh", sobolev_norm(state.b, s, homogeneous=False))
            )
        rows.append(
            ("u0", f"{s:+g}", "inh", sobolev_norm_vector(u0, s, homogeneous=False))
        )
    rows.append(("u0", "C1", "sup", float(u0.magnitude_values().max()) + du_sup))
    rows.append(("pair", "scale", "factor", factor))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    with open(out / "norms.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["quantity", "s", "weight", "value"])
        for quantity, s, weight, value in rows:
            writer.writerow([quantity, s, weight, repr(value)])
    return EXIT_OK


def _run_common(cfg: dict[str, str], out: Path, frozen: bool) -> int:
    p = _make_params(cfg)
    grid = _resolve_grid(p, cfg)
    s_values = _resolve_s_grid(cfg, p.beta)
    if cfg["t_end"] == "t_n":
        t_end = p.inflation_time
        cfg["t_end"] = _render_float(t_end)
    else:
        t_end = _as_float(cfg, "t_end")
    solver_cfg = _solver_config(cfg, t_end)
    state = make_initial_data(p, grid, normalize=_as_bool(cfg, "normalize"))
    sol = ApproxSolution(p, grid) if _as_bool(cfg, "include_perturbation") else None
    probe = _guarded_probe(p, s_values, sol)
    if frozen:
        traj = run_frozen_velocity(state, solver_cfg, probe)
    else:
        traj = run(state, solver_cfg, probe)
    records_to_csv(traj.records, out / "trajectory.csv", status=traj.status)
    save_checkpoint(out / "final_state.npz", traj.final)
    if traj.message:
        print(f"{traj.status}: {traj.message}", file=sys.stderr)
    return _status_exit(traj.status)


def cmd_run(cfg: dict[str, str], out: Path) -> int:
    return _run_common(cfg, out, frozen=False)


def cmd_frozen_run(cfg: dict[str, str], out: Path) -> int:
    return _run_common(cfg, out, frozen=True)


def cmd_approx_scan(cfg: dict[str, str], out: Path) -> int:
    p = _make_params(cfg)
    grid = _resolve_grid(p, cfg)
    s_values = _resolve_s_grid(cfg, p.beta)
    sol = ApproxSolution(p, grid)
    t_max = (
        sol.max_resolved_time() if cfg["t_max"] == "auto" else _as_float(cfg, "t_max")
    )
    t_min = t_max / math.sqrt(10.0) if cfg["t_min"] == "auto" else _as_float(cfg, "t_min")
    num = _as_int(cfg, "num_times")
    if num < 5:
        raise ConfigError(f"num_times must be at least 5, got {num}")
    if not 0.0 < t_min < t_max:
        raise ConfigError(f"need 0 < t_min < t_max, got ({t_min}, {t_max})")
    cfg["t_max"], cfg["t_min"] = _render_float(t_max), _render_float(t_min)
    times = np.geomspace(t_min, t_max, num)
    scan = abar_norm_scan(sol, s_values, times)
    with open(out / "scan.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["t"] + [f"norm_abar_s{s:+g}_hom" for s in s_values])
        for i, t in enumerate(times):
            writer.writerow(
                [repr(float(t))] + [repr(scan[s][i][1]) for s in s_values]
            )
    with open(out / "fits.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["s", "slope", "r_squared", "t_n"])
        for s in s_values:
            slope, r2 = fit_exponent(times, [v for _, v in scan[s]])
            writer.writerow([f"{s:+g}", repr(slope), repr(r2), repr(p.inflation_time)])
    return EXIT_OK


def cmd_region(cfg: dict[str, str], out: Path) -> int:
    rows = region_sweep(_str_list(cfg, "beta_grid"), _str_list(cfg, "gamma_grid"))
    sweep_to_csv(rows, out / "region.csv")
    return EXIT_OK


def _sweep_member(task: tuple) -> tuple[str, list[DiagnosticsRecord], str]:
    """One sweep run: out to its own observation time and the shared one."""
    member_cfg, eval_t, frozen = task
    p = _make_params(member_cfg)
    grid = _resolve_grid(p, member_cfg)
    s_values = _resolve_s_grid(member_cfg, p.beta)
    state = make_initial_data(p, grid, normalize=_as_bool(member_cfg, "normalize"))
    sol = (
        ApproxSolution(p, grid)
        if _as_bool(member_cfg, "include_perturbation")
        else None
    )
    probe = _guarded_probe(p, s_values, sol)
    driver = run_frozen_velocity if frozen else run
    t_lo = min(p.inflation_time, eval_t)
    t_hi = max(p.inflation_time, eval_t)
    leg1 = driver(state, _solver_config(member_cfg, t_lo), probe)
    records = list(leg1.records)
    status = leg1.status
    if status == STATUS_COMPLETED and t_hi > t_lo:
        leg2 = driver(leg1.final, _solver_config(member_cfg, t_hi - t_lo), probe)
        records.extend(leg2.records[1:])
        status = leg2.status
    return member_cfg["lam"], records, status


def _ratio_at(records: list[DiagnosticsRecord], p: ParamSet, t: float) -> float:
    """Inflation-norm ratio at the record closest to t."""
    report = inflation_report(records, p, "completed")
    idx = int(np.argmin(np.abs(np.array(report.times) - t)))
    return report.ratios[idx]


def cmd_sweep(cfg: dict[str, str], out: Path) -> int:
    lams = _float_list(cfg, "lams")
    if not lams:
        raise ConfigError("lams must name at least one value")
    if sorted(lams) != lams:
        raise ConfigError("lams must be listed in increasing order")
    mode = cfg["mode"]
    if mode not in ("run", "frozen-run"):
        raise ConfigError(f"mode must be 'run' or 'frozen-run', got {mode!r}")
    cfg["lams"] = _render_float_list(lams)
    members: list[dict[str, str]] = []
    for lam in lams:
        member = dict(cfg)
        member["lam"] = _render_float(lam)
        members.append(member)
    t_ns = [_make_params(m).inflation_time for m in members]
    eval_t = min(t_ns) if cfg["eval_t"] == "auto" else _as_float(cfg, "eval_t")
    if eval_t <= 0.0:
        raise ConfigError(f"eval_t must be positive, got {eval_t}")
    cfg["eval_t"] = _render_float(eval_t)
    tasks = [(m, eval_t, mode == "frozen-run") for m in members]
    workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_member, tasks))
    else:
        results = [_sweep_member(t) for t in tasks]
    exit_code = EXIT_OK
    rows = []
    for member, t_n, (lam_str, records, status) in zip(members, t_ns, results):
        p = _make_params(member)
        run_dir = out / f"run_lam{lam_str}"
        run_dir.mkdir(parents=True, exist_ok=True)
        records_to_csv(records, run_dir / "trajectory.csv", status=status)
        ratio_eval = ratio_tn = ""
        if status == STATUS_COMPLETED:
            ratio_eval = repr(_ratio_at(records, p, eval_t))
            ratio_tn = repr(_ratio_at(records, p, t_n))
        else:
            exit_code = max(exit_code, _status_exit(status))
        rows.append(
            {
                "lam": lam_str,
                "beta": member["beta"],
                "gamma": member["gamma"],
                "zeta": member["zeta"],
                "m": str(p.m),
                "gamma_eff": repr(p.gamma_eff),
                "t_n": repr(t_n),
                "eval_t": repr(eval_t),
                "ratio_at_eval_t": ratio_eval,
                "ratio_at_t_n": ratio_tn,
                "status": status,
            }
        )
    with open(out / "sweep.csv", "w", newline="") as handle:
        writer = csv.DictWriter(
            handle,
            fieldnames=[
                "lam",
                "beta",
                "gamma",
                "zeta",
                "m",
                "gamma_eff",
                "t_n",
                "eval_t",
                "ratio_at_eval_t",
                "ratio_at_t_n",
                "status",
            ],
        )
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return exit_code


_COMMANDS = {
    "init-data": cmd_init_data,
    "run": cmd_run,
    "frozen-run": cmd_frozen_run,
    "approx-scan": cmd_approx_scan,
    "region": cmd_region,
    "sweep": cmd_sweep,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emhd25",
        description="Pseudo-spectral experiments for the sheared-carrier system.",
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for sub, keys in KEYS.items():
        sp = subparsers.add_parser(sub)
        sp.add_argument("--config", help="INI file with an [experiment] section")
        sp.add_argument("--out", required=True, help="output directory")
        for key in keys:
            sp.add_argument(f"--{key.replace('_', '-')}", dest=key)
    return parser


def _resolve_config(args: argparse.Namespace, keys) -> dict[str, str]:
    cfg = {k: _DEFAULTS[k] for k in keys}
    if args.config:
        parser = configparser.ConfigParser(interpolation=None)
        read = parser.read(args.config)
        if not read:
            raise ConfigError(f"cannot read config file {args.config}")
        if "experiment" not in parser:
            raise ConfigError(f"{args.config} lacks an [experiment] section")
        for key, value in parser["experiment"].items():
            if key not in keys:
                raise ConfigError(
                    f"key {key!r} is not valid for this subcommand"
                )
            cfg[key] = value
    for key in keys:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    return cfg


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    sub = args.subcommand
    keys = KEYS[sub]
    out = Path(args.out)
    try:
        cfg = _resolve_config(args, keys)
        out.mkdir(parents=True, exist_ok=True)
        code = _COMMANDS[sub](cfg, out)
        _write_config(cfg, keys, out / "config.ini")
        _write_manifest(out, sub, cfg, keys)
        return code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (UnderResolvedError, PhaseResolutionError) as exc:
        print(f"resolution error: {exc}", file=sys.stderr)
        return EXIT_RESOLUTION
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FloatingPointError, RuntimeError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
