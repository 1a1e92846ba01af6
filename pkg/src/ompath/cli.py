"""Command line interface.

Five subcommands over one config format::

    ompath validate  --config sys.toml
    ompath solve     --config sys.toml --out results/
    ompath simulate  --config sys.toml --out results/ [--seed 7]
    ompath action    --config sys.toml --path path.csv
    ompath benchmark --config bench.toml --out results/

Configs are TOML (or JSON with the same structure, selected by a .json
extension).  Exit codes: 0 on success, 1 when a gate or solver fails,
2 for malformed input of any kind.  All file output is atomic and
deterministic: running a command twice with the same config and seeds
produces byte-identical artifacts.

Config sections (all optional unless a subcommand needs them):

    [system]            dimension, builtin = "maier_stein" | "zero",
                        gamma, x0
    [system.drift]      components = per-coordinate lists of monomials
                        [coef, e1, ..., ed] (alternative to builtin)
    [system.noise]      exactly one of identity = true,
                        diagonal = [...], matrix = [[...], ...]
    [[system.levy]]     one table per coordinate: null = true, or
                        alpha/sigma/beta and optional mu
    [boundary]          z0, z1, T
    [solver]            shooting_n, shooting_tol, shooting_max_iter,
                        fd_step, min_nodes, gtol
    [simulation]        dt, T, m, seed, include_large_jumps
    [band]              epsilon
    [validate]          probes, box, tol
    [benchmark]         eta = [...] override
    [output]            directory
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path as FsPath

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from scipy.stats import qmc

from .action import Path, action_of_path, check_poincare_symmetry
from .benchmark import benchmark_system, run_benchmark
from .bvp import ShootingConfig, solve_both
from .fileio import read_csv, write_csv, write_json
from .levy import (
    BoundedVariationError,
    StableComponent,
    check_bounded_variation,
    eta,
    null_component,
    stable_component,
)
from .model import (
    BoundaryPair,
    DriftField,
    NoiseMatrix,
    SystemSpec,
    maier_stein,
    polynomial_drift,
    zero_drift,
)
from .simulate import SimConfig, ensemble_band, simulate_ensemble

__all__ = ["ConfigError", "main"]


class ConfigError(Exception):
    """Anything wrong with the input: reported on stderr, exit code 2."""


def _fail(where: str, message: str) -> "ConfigError":
    return ConfigError(f"{where}: {message}")


def _table(raw: dict, key: str, where: str) -> dict:
    value = raw.get(key, {})
    if not isinstance(value, dict):
        raise _fail(where, f"expected a table for [{key}]")
    return value


def _scalar(table: dict, key: str, where: str, kind, default):
    if key not in table:
        if default is _REQUIRED:
            raise _fail(where, f"missing required key '{key}'")
        return default
    value = table[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise _fail(f"{where}.{key}", f"expected a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise _fail(f"{where}.{key}", f"expected an integer, got {value!r}")
        return int(value)
    if kind is bool:
        if not isinstance(value, bool):
            raise _fail(f"{where}.{key}", f"expected a boolean, got {value!r}")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise _fail(f"{where}.{key}", f"expected a string, got {value!r}")
        return value
    raise AssertionError(kind)


_REQUIRED = object()


def _vector(table: dict, key: str, where: str, d: int | None, default):
    if key not in table:
        if default is _REQUIRED:
            raise _fail(where, f"missing required key '{key}'")
        return default
    value = table[key]
    if not isinstance(value, (list, tuple)):
        raise _fail(f"{where}.{key}", f"expected an array, got {value!r}")
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise _fail(f"{where}.{key}", "expected an array of numbers") from None
    if arr.ndim != 1:
        raise _fail(f"{where}.{key}", f"expected a flat array, got shape {arr.shape}")
    if d is not None and arr.shape[0] != d:
        raise _fail(f"{where}.{key}", f"expected {d} entries, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise _fail(f"{where}.{key}", "entries must be finite")
    return arr


@dataclass
class RunConfig:
    """Everything a subcommand might need, parsed and validated."""

    source: str
    d: int
    drift: DriftField
    noise: NoiseMatrix
    components: tuple[StableComponent, ...]
    x0: np.ndarray
    boundary: BoundaryPair | None
    shooting: ShootingConfig
    min_nodes: int
    gtol: float
    sim: SimConfig | None
    band_epsilon: float
    validate_probes: int
    validate_box: np.ndarray
    validate_tol: float | None
    benchmark_eta: np.ndarray | None
    out_dir: str | None

    def system(self) -> SystemSpec:
        """Assemble the SystemSpec, translating model errors to ConfigError."""
        try:
            return SystemSpec(drift=self.drift, noise=self.noise,
                              levy=self.components, x0=self.x0)
        except (BoundedVariationError, ValueError) as exc:
            raise _fail(self.source, str(exc)) from exc

    def probe_system(self) -> SystemSpec:
        """System with null jumps, for gates that ignore the Levy part."""
        return SystemSpec(drift=self.drift, noise=self.noise,
                          levy=tuple(null_component() for _ in range(self.d)),
                          x0=self.x0)


def _load_raw(config_path: str) -> dict:
    path = FsPath(config_path)
    try:
        text = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
    if path.suffix.lower() == ".json":
        try:
            raw = json.loads(text.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{config_path}: invalid JSON: {exc}") from exc
    else:
        try:
            raw = tomllib.loads(text.decode("utf-8"))
        except (UnicodeDecodeError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"{config_path}: invalid TOML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{config_path}: top level must be a table")
    return raw


def _parse_drift(system_tbl: dict, d: int, source: str):
    builtin = _scalar(system_tbl, "builtin", "[system]", str, None)
    drift_tbl = system_tbl.get("drift")
    if builtin is not None and drift_tbl is not None:
        raise _fail("[system]", "give either 'builtin' or a [system.drift] table, not both")
    if builtin == "maier_stein":
        if d != 2:
            raise _fail("[system]", "builtin 'maier_stein' requires dimension = 2")
        gamma = _scalar(system_tbl, "gamma", "[system]", float, 1.0)
        try:
            base = maier_stein(gamma)
        except ValueError as exc:
            raise _fail("[system].gamma", str(exc)) from exc
        return base.drift, np.array([1.0, 0.0])
    if builtin == "zero":
        return zero_drift(d), np.zeros(d)
    if builtin is not None:
        raise _fail("[system].builtin", f"unknown builtin {builtin!r}")
    if drift_tbl is None:
        raise _fail("[system]", "need either 'builtin' or a [system.drift] table")
    if not isinstance(drift_tbl, dict):
        raise _fail("[system].drift", "expected a table")
    components = drift_tbl.get("components")
    if not isinstance(components, list) or len(components) != d:
        raise _fail("[system].drift.components",
                    f"expected a list of {d} per-coordinate term lists")
    try:
        drift = polynomial_drift(d, components)
    except (TypeError, ValueError) as exc:
        raise _fail("[system].drift.components", str(exc)) from exc
    return drift, np.zeros(d)


def _parse_noise(system_tbl: dict, d: int) -> NoiseMatrix:
    noise_tbl = system_tbl.get("noise", {"identity": True})
    if not isinstance(noise_tbl, dict):
        raise _fail("[system].noise", "expected a table")
    keys = [k for k in ("identity", "diagonal", "matrix") if k in noise_tbl]
    if len(keys) != 1:
        raise _fail("[system].noise",
                    "give exactly one of identity = true, diagonal, matrix")
    if keys[0] == "identity":
        if noise_tbl["identity"] is not True:
            raise _fail("[system].noise.identity", "the only accepted value is true")
        return NoiseMatrix.identity(d)
    if keys[0] == "diagonal":
        entries = _vector(noise_tbl, "diagonal", "[system].noise", d, _REQUIRED)
        return NoiseMatrix.diagonal(entries, require_invertible=False)
    rows = noise_tbl["matrix"]
    try:
        mat = np.asarray(rows, dtype=float)
    except (TypeError, ValueError):
        raise _fail("[system].noise.matrix", "expected a matrix of numbers") from None
    if mat.shape != (d, d):
        raise _fail("[system].noise.matrix", f"expected shape ({d}, {d}), got {mat.shape}")
    return NoiseMatrix(mat, require_invertible=False)


def _parse_levy(system_tbl: dict, d: int) -> tuple[StableComponent, ...]:
    entries = system_tbl.get("levy")
    if entries is None:
        return tuple(null_component() for _ in range(d))
    if not isinstance(entries, list) or len(entries) != d:
        raise _fail("[system].levy", f"expected {d} component tables, got "
                    f"{len(entries) if isinstance(entries, list) else type(entries).__name__}")
    out = []
    for j, entry in enumerate(entries):
        where = f"[[system.levy]] #{j + 1}"
        if not isinstance(entry, dict):
            raise _fail(where, "expected a table")
        if entry.get("null", False) is True:
            out.append(null_component())
            continue
        alpha = _scalar(entry, "alpha", where, float, _REQUIRED)
        sigma = _scalar(entry, "sigma", where, float, _REQUIRED)
        beta = _scalar(entry, "beta", where, float, _REQUIRED)
        mu = _scalar(entry, "mu", where, float, 0.0)
        try:
            out.append(stable_component(alpha, sigma, beta, mu))
        except ValueError as exc:
            raise _fail(where, str(exc)) from exc
    return tuple(out)


def build_runconfig(config_path: str, require_system: bool = True) -> RunConfig:
    raw = _load_raw(config_path)
    system_tbl = _table(raw, "system", config_path)
    if not system_tbl and not require_system:
        # benchmark configs may omit [system]: the benchmark system is fixed
        bench = benchmark_system()
        d = bench.d
        drift, default_x0 = bench.drift, bench.x0
        noise = bench.noise
        components = bench.levy
        system_tbl = {}
    elif not system_tbl:
        raise _fail(config_path, "missing [system] section")
    else:
        d = _scalar(system_tbl, "dimension", "[system]", int, _REQUIRED)
        if d < 1:
            raise _fail("[system].dimension", f"must be at least 1, got {d}")
        drift, default_x0 = _parse_drift(system_tbl, d, config_path)
        noise = _parse_noise(system_tbl, d)
        components = _parse_levy(system_tbl, d)
    x0 = _vector(system_tbl, "x0", "[system]", d, default_x0)

    boundary = None
    boundary_tbl = _table(raw, "boundary", config_path)
    if boundary_tbl:
        z0 = _vector(boundary_tbl, "z0", "[boundary]", d, _REQUIRED)
        z1 = _vector(boundary_tbl, "z1", "[boundary]", d, _REQUIRED)
        horizon = _scalar(boundary_tbl, "T", "[boundary]", float, 1.0)
        try:
            boundary = BoundaryPair(z0, z1, horizon)
        except ValueError as exc:
            raise _fail("[boundary]", str(exc)) from exc

    solver_tbl = _table(raw, "solver", config_path)
    try:
        shooting = ShootingConfig(
            n=_scalar(solver_tbl, "shooting_n", "[solver]", int, 1000),
            tol=_scalar(solver_tbl, "shooting_tol", "[solver]", float, 1e-10),
            max_iter=_scalar(solver_tbl, "shooting_max_iter", "[solver]", int, 50),
            fd_step=_scalar(solver_tbl, "fd_step", "[solver]", float, 1e-6),
        )
    except ValueError as exc:
        raise _fail("[solver]", str(exc)) from exc
    min_nodes = _scalar(solver_tbl, "min_nodes", "[solver]", int, 400)
    if min_nodes < 8:
        raise _fail("[solver].min_nodes", f"must be at least 8, got {min_nodes}")
    gtol = _scalar(solver_tbl, "gtol", "[solver]", float, 1e-8)

    sim = None
    sim_tbl = _table(raw, "simulation", config_path)
    if sim_tbl:
        try:
            sim = SimConfig(
                dt=_scalar(sim_tbl, "dt", "[simulation]", float, 1e-3),
                T=_scalar(sim_tbl, "T", "[simulation]", float, 1.0),
                m=_scalar(sim_tbl, "m", "[simulation]", int, 100),
                seed=_scalar(sim_tbl, "seed", "[simulation]", int, 0),
                include_large_jumps=_scalar(
                    sim_tbl, "include_large_jumps", "[simulation]", bool, True),
            )
        except ValueError as exc:
            raise _fail("[simulation]", str(exc)) from exc

    band_tbl = _table(raw, "band", config_path)
    band_epsilon = _scalar(band_tbl, "epsilon", "[band]", float, 0.3)
    if not band_epsilon > 0.0:
        raise _fail("[band].epsilon", "must be positive")

    validate_tbl = _table(raw, "validate", config_path)
    probes = _scalar(validate_tbl, "probes", "[validate]", int, 100)
    if probes < 1:
        raise _fail("[validate].probes", "need at least one probe")
    box_raw = validate_tbl.get("box")
    if box_raw is None:
        box = np.tile(np.array([-2.0, 2.0]), (d, 1))
    else:
        try:
            box = np.asarray(box_raw, dtype=float)
        except (TypeError, ValueError):
            raise _fail("[validate].box", "expected a list of [lo, hi] pairs") from None
        if box.shape != (d, 2) or np.any(box[:, 0] >= box[:, 1]):
            raise _fail("[validate].box",
                        f"expected {d} [lo, hi] pairs with lo < hi")
    validate_tol = _scalar(validate_tbl, "tol", "[validate]", float, None)

    benchmark_tbl = _table(raw, "benchmark", config_path)
    benchmark_eta = _vector(benchmark_tbl, "eta", "[benchmark]", None, None)

    output_tbl = _table(raw, "output", config_path)
    out_dir = _scalar(output_tbl, "directory", "[output]", str, None)

    return RunConfig(
        source=config_path, d=d, drift=drift, noise=noise,
        components=components, x0=x0, boundary=boundary,
        shooting=shooting, min_nodes=min_nodes, gtol=gtol, sim=sim,
        band_epsilon=band_epsilon, validate_probes=probes,
        validate_box=box, validate_tol=validate_tol,
        benchmark_eta=benchmark_eta, out_dir=out_dir,
    )


def _halton_probes(box: np.ndarray, count: int) -> np.ndarray:
    sampler = qmc.Halton(d=box.shape[0], scramble=False)
    unit = sampler.random(count)
    return box[:, 0] + unit * (box[:, 1] - box[:, 0])


def cmd_validate(cfg: RunConfig) -> int:
    """Run the three gates and print a JSON report; exit 0 iff all pass."""
    bv_entries = []
    bv_ok = True
    for j, comp in enumerate(cfg.components):
        ok = check_bounded_variation(comp)
        entry = {"index": j, "passed": bool(ok),
                 "null": bool(comp.null)}
        if not comp.null:
            entry["alpha"] = comp.alpha
        if not ok:
            entry["reason"] = f"alpha = {comp.alpha} >= 1: unbounded variation"
            bv_ok = False
        bv_entries.append(entry)

    noise_ok = cfg.noise.invertible
    noise_gate = {"passed": bool(noise_ok)}
    if noise_ok:
        noise_gate["condition_estimate"] = cfg.noise.condition_estimate
    else:
        noise_gate["reason"] = "noise matrix is singular"

    if noise_ok:
        probes = _halton_probes(cfg.validate_box, cfg.validate_probes)
        report = check_poincare_symmetry(cfg.probe_system(), probes, cfg.validate_tol)
        symmetry_gate = {
            "passed": bool(report.passed),
            "worst_asymmetry": report.worst_asymmetry,
            "worst_point": [float(v) for v in report.worst_point],
            "probes": cfg.validate_probes,
        }
        if cfg.validate_tol is not None:
            symmetry_gate["tol"] = cfg.validate_tol
        symmetry_ok = report.passed
    else:
        symmetry_gate = {"passed": False,
                         "reason": "skipped: noise matrix is singular"}
        symmetry_ok = False

    passed = bv_ok and noise_ok and symmetry_ok
    print(json.dumps({
        "schema_version": 1,
        "passed": bool(passed),
        "gates": {
            "bounded_variation": {"passed": bool(bv_ok), "components": bv_entries},
            "noise_invertible": noise_gate,
            "poincare_symmetry": symmetry_gate,
        },
    }, sort_keys=True, indent=2))
    return 0 if passed else 1


def _require_invertible(cfg: RunConfig) -> None:
    if not cfg.noise.invertible:
        raise _fail(cfg.source,
                    "this command needs an invertible noise matrix")


def _solver_summary(result) -> dict:
    return {
        "converged": bool(result.converged),
        "boundary_mismatch_norm": float(result.boundary_mismatch_norm),
        "el_residual_max": float(result.el_residual_max),
        "action": float(result.action),
        "iterations": int(result.iterations),
    }


def cmd_solve(cfg: RunConfig, out_dir: str) -> int:
    """Solve the boundary value problem both ways and write artifacts."""
    if cfg.boundary is None:
        raise _fail(cfg.source, "solve needs a [boundary] section")
    _require_invertible(cfg)
    system = cfg.system()
    eta_vec = eta(system.levy)
    shot, minimized = solve_both(system, cfg.boundary, eta_vec,
                                 shooting=cfg.shooting, min_nodes=cfg.min_nodes,
                                 gtol=cfg.gtol)
    grid = minimized.path.grid
    d = system.d
    header = ["t"]
    columns = [grid]
    if shot is not None:
        shot_vals = np.empty((grid.shape[0], d))
        for j in range(d):
            shot_vals[:, j] = np.interp(grid, shot.path.grid, shot.path.values[:, j])
    else:
        shot_vals = np.full((grid.shape[0], d), np.nan)
    for j in range(d):
        header.append(f"shooting_x{j + 1}")
        columns.append(shot_vals[:, j])
    for j in range(d):
        header.append(f"minimize_x{j + 1}")
        columns.append(minimized.path.values[:, j])
    rows = list(zip(*columns))
    out = FsPath(out_dir)
    write_csv(out / "mpp_path.csv", header, rows)

    preferred = "shooting" if (shot is not None and shot.converged) else "minimize"
    report = {
        "schema_version": 1,
        "command": "solve",
        "system_digest": system.digest,
        "eta": [float(v) for v in eta_vec.eta],
        "boundary": {
            "z0": [float(v) for v in cfg.boundary.z0],
            "z1": [float(v) for v in cfg.boundary.z1],
            "T": cfg.boundary.T,
        },
        "minimize": _solver_summary(minimized),
        "preferred_solver": preferred,
    }
    if shot is not None:
        report["shooting"] = _solver_summary(shot)
        report["agreement_sup_norm"] = float(np.max(np.abs(
            shot_vals - minimized.path.values)))
    else:
        report["shooting"] = None
        report["note"] = "no second-order reduction for non-diagonal noise"
    write_json(out / "report.json", report)

    converged = minimized.converged or (shot is not None and shot.converged)
    return 0 if converged else 1


def _band_reference(cfg: RunConfig, out: FsPath, d: int) -> tuple[Path | None, str | None]:
    """Pick the path band.csv is measured against, plus a label for the meta."""
    mpp = out / "mpp_path.csv"
    if mpp.exists():
        names, data = read_csv(mpp)
        prefix = "minimize"
        report_file = out / "report.json"
        if report_file.exists():
            try:
                prefix = json.loads(report_file.read_text())["preferred_solver"]
            except (json.JSONDecodeError, KeyError):
                prefix = "minimize"
        try:
            cols = [names.index(f"{prefix}_x{j + 1}") for j in range(d)]
        except ValueError:
            raise _fail(str(mpp), f"missing {prefix}_x* columns for d = {d}") from None
        return Path(data[:, 0], data[:, cols]), "mpp_path.csv"
    if cfg.boundary is not None:
        return Path.straight_line(cfg.boundary.z0, cfg.boundary.z1,
                                  cfg.boundary.T, n=2), "straight-line"
    return None, None


def cmd_simulate(cfg: RunConfig, out_dir: str) -> int:
    """Simulate the configured ensemble; write the paths, metadata, band."""
    if cfg.sim is None:
        raise _fail(cfg.source, "simulate needs a [simulation] section")
    system = cfg.system()
    ensemble = simulate_ensemble(system, cfg.sim)
    out = FsPath(out_dir)

    d = system.d
    header = ["t", "path_id"] + [f"x{j + 1}" for j in range(d)]
    n_nodes = ensemble.times.shape[0]

    def rows():
        for i in range(ensemble.m):
            block = ensemble.paths[i]
            for k in range(n_nodes):
                yield (ensemble.times[k], i, *block[k])

    write_csv(out / "ensemble.csv", header, rows())

    reference, reference_label = _band_reference(cfg, out, d)
    meta = {
        "schema_version": 1,
        "system_digest": ensemble.digest,
        "config": {
            "dt": cfg.sim.dt,
            "T": cfg.sim.T,
            "m": cfg.sim.m,
            "seed": cfg.sim.seed,
            "include_large_jumps": cfg.sim.include_large_jumps,
        },
        "seed_rule": "philox key = seed + path_id; per path: standard normals "
                     "(n_steps, d) first, then per non-null coordinate its "
                     "n_steps stable increments in ascending coordinate order",
        "escaped_count": int(np.count_nonzero(ensemble.escaped)),
        "escaped_path_ids": [int(i) for i in np.nonzero(ensemble.escaped)[0]],
        "band_reference": reference_label,
    }
    write_json(out / "ensemble_meta.json", meta)

    if reference is not None:
        band = ensemble_band(ensemble, reference, cfg.band_epsilon)
        write_csv(out / "band.csv", ["t", "coverage"],
                  [[band.times[k], band.coverage[k]] for k in range(n_nodes)])
    return 0


def cmd_action(cfg: RunConfig, path_file: str) -> int:
    """Score a path file against the configured system; JSON on stdout."""
    _require_invertible(cfg)
    system = cfg.system()
    try:
        names, data = read_csv(path_file)
    except (OSError, ValueError) as exc:
        raise _fail(path_file, str(exc)) from exc
    if len(names) != 1 + system.d or names[0] != "t":
        raise _fail(path_file,
                    f"expected columns t,x1..x{system.d}, got {','.join(names)}")
    try:
        path = Path(data[:, 0], data[:, 1:])
    except ValueError as exc:
        raise _fail(path_file, str(exc)) from exc
    eta_vec = eta(system.levy)
    report = action_of_path(system, path, eta_vec)
    out = {
        "action": report.action,
        "rule": report.rule,
        "n": report.n,
        "lagrangian": {
            "min": float(np.min(report.node_lagrangians)),
            "max": float(np.max(report.node_lagrangians)),
            "mean": float(np.mean(report.node_lagrangians)),
        },
    }
    if path.n >= 4:
        from .bvp import el_diagnostics
        out["el_residual_max"] = el_diagnostics(system, path, eta_vec)
    print(json.dumps(out, sort_keys=True, indent=2))
    return 0


def cmd_benchmark(cfg: RunConfig, out_dir: str) -> int:
    """Run the built-in two-well pipeline with optional overrides."""
    report = run_benchmark(
        out_dir=out_dir,
        sim=cfg.sim,
        shooting=cfg.shooting,
        min_nodes=cfg.min_nodes,
        band_epsilon=cfg.band_epsilon,
        eta_override=cfg.benchmark_eta,
    )
    converged = report.shooting.converged or report.minimization.converged
    return 0 if converged else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ompath",
        description="Most probable transition paths and jump-diffusion ensembles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "validate": "check the model gates and print a JSON report",
        "solve": "solve the two-point path problem by shooting and minimization",
        "simulate": "run an Euler-Maruyama ensemble and write it to disk",
        "action": "evaluate the action of a path file",
        "benchmark": "run the built-in two-well end-to-end workflow",
    }
    for name, help_text in specs.items():
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="TOML or JSON config file")
        if name in ("solve", "simulate", "benchmark"):
            cmd.add_argument("--out", default=None, help="output directory")
        if name in ("simulate", "benchmark"):
            cmd.add_argument("--seed", type=int, default=None,
                             help="override the simulation seed")
        if name == "action":
            cmd.add_argument("--path", required=True, help="path CSV (t,x1..xd)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = build_runconfig(args.config,
                              require_system=args.command != "benchmark")
        if getattr(args, "seed", None) is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be nonnegative")
            if cfg.sim is not None:
                cfg.sim = replace(cfg.sim, seed=args.seed)
        out_dir = getattr(args, "out", None) or cfg.out_dir or "."
        if args.command == "validate":
            return cmd_validate(cfg)
        if args.command == "solve":
            return cmd_solve(cfg, out_dir)
        if args.command == "simulate":
            return cmd_simulate(cfg, out_dir)
        if args.command == "action":
            return cmd_action(cfg, args.path)
        if args.command == "benchmark":
            return cmd_benchmark(cfg, out_dir)
        raise AssertionError(args.command)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
