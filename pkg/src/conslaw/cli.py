"""Batch command-line interface.

One JSON config drives every command; --set key=value overrides single
entries with dotted paths.  Each run writes its data as RFC 4180 CSV
files plus a manifest JSON holding the seed, the config hash, timing and
the output listing.  Data files are byte-identical across reruns with the
same config and seed; anything environment-dependent stays in the
manifest.

Exit codes: 0 success, 2 validation failure, 1 error.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import validate as suite
from .airy import identity_report
from .density import f_pde
from .errors import ConfigError, ConslawError
from .excursion import build_kernel_table, chernoff_density
from .generator import compare_with_direct, empirical_sampler, simulate_profile
from .hamiltonian import ConvexFunctionSpec
from .io import write_csv, write_manifest
from .paths import GridSpec, sample_two_sided_bm
from .solver import shock_census, solve_field

DEFAULT_CONFIG = {
    "hamiltonian": {"family": "quadratic", "params": {"a": 1.0}},
    "phi": {"family": "quadratic", "params": {"a": 2.0}},
    "grids": {
        "x_min": -12.0, "x_max": 12.0, "n_steps": 6000,
        "t": 1.0,
        "t_min": -6.0, "t_max": 6.0, "n_t": 481,
        "rho_min": -2.6, "rho_max": 3.0, "n_rho": 57,
        "sim_x_max": 14.0, "sim_n_x": 1025,
    },
    "mc": {
        "n_samples": 20000, "n_steps": 256, "n_paths": 8,
        "n_oracle": 100000, "sigma": 1.0, "jump_intensity": 1.0,
    },
    "quad": {"rel_tol": 1e-8},
    "seed": 0,
    "output_dir": "runs/out",
    "validate": {"budget": "full", "checks": None},
}


def load_config(path=None, overrides=()):
    """Config dict from JSON (or the shipped default), with --set applied."""
    if path is None:
        config = json.loads(json.dumps(DEFAULT_CONFIG))
    else:
        try:
            with open(path) as fh:
                config = json.load(fh)
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}", field="config")
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON (line {e.lineno})",
                              field="config")
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set needs key=value, got {item!r}",
                              field="set")
        key, _, raw = item.partition("=")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = config
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigError(f"--set path {key!r} crosses a leaf",
                                  field="set")
        node[parts[-1]] = value
    for section in ("seed", "output_dir"):
        if section not in config:
            raise ConfigError(f"config is missing {section!r}", field=section)
    return config


def _section(config, name):
    base = DEFAULT_CONFIG.get(name, {})
    merged = dict(base) if isinstance(base, dict) else {}
    merged.update(config.get(name, {}) or {})
    return merged


def _phi(config):
    return ConvexFunctionSpec.from_dict(
        config.get("phi", DEFAULT_CONFIG["phi"]))


def _hamiltonian(config):
    return ConvexFunctionSpec.from_dict(
        config.get("hamiltonian", DEFAULT_CONFIG["hamiltonian"]))


# -- commands ----------------------------------------------------------------

def cmd_chernoff(config, out_dir, seed):
    grids, mc = _section(config, "grids"), _section(config, "mc")
    phi = _phi(config)
    t_grid = np.linspace(grids["t_min"], grids["t_max"], int(grids["n_t"]))
    dens, se = chernoff_density(phi, t_grid, n_samples=int(mc["n_samples"]),
                                n_steps=int(mc["n_steps"]), seed=seed)
    pool = suite._argmax_pool(phi, int(mc["n_oracle"]), seed)
    centers, hist, hist_se = suite.lattice_histogram(pool, t_grid)
    write_csv(os.path.join(out_dir, "chernoff_density.csv"),
              {"t": t_grid, "density": dens, "std_error": se})
    write_csv(os.path.join(out_dir, "chernoff_mc_hist.csv"),
              {"center": centers, "density": hist, "std_error": hist_se})
    return ["chernoff_density.csv", "chernoff_mc_hist.csv"], {}


def cmd_solve(config, out_dir, seed):
    grids, mc = _section(config, "grids"), _section(config, "mc")
    H = _hamiltonian(config)
    grid = GridSpec(grids["x_min"], grids["x_max"], int(grids["n_steps"]))
    outputs = []
    for k in range(int(mc["n_paths"])):
        pot = sample_two_sided_bm(grid, mc["sigma"], seed, path_index=k)
        field = solve_field(pot, H, grids["t"])
        name = f"solution_field_{k:03d}.csv"
        write_csv(os.path.join(out_dir, name),
                  {"x": field.x, "u": field.u, "y": field.y,
                   "rho": field.rho})
        outputs.append(name)
        census = shock_census(field, min_gap=0.05)
        name = f"shock_report_{k:03d}.csv"
        write_csv(os.path.join(out_dir, name),
                  {"x": census.x, "rho_left": census.rho_left,
                   "rho_right": census.rho_right, "gap": census.gap})
        outputs.append(name)
    return outputs, {}


def cmd_kernel(config, out_dir, seed):
    grids, mc = _section(config, "grids"), _section(config, "mc")
    H = _hamiltonian(config)
    rho_grid = np.linspace(grids["rho_min"], grids["rho_max"],
                           int(grids["n_rho"]))
    table = build_kernel_table(H, grids["t"], rho_grid,
                               n_samples=int(mc["n_samples"]),
                               n_steps=int(mc["n_steps"]), seed=seed)
    rm, rp, nv, se = table.rows()
    write_csv(os.path.join(out_dir, "kernel_table.csv"),
              {"rho_minus": rm, "rho_plus": rp, "n": nv, "std_error": se})
    write_csv(os.path.join(out_dir, "kernel_lambda.csv"),
              {"rho": table.rho_grid, "lam": table.lam})
    return ["kernel_table.csv", "kernel_lambda.csv"], {}


def cmd_simulate(config, out_dir, seed):
    grids, mc = _section(config, "grids"), _section(config, "mc")
    H = _hamiltonian(config)
    rho_grid = np.linspace(grids["rho_min"], grids["rho_max"],
                           int(grids["n_rho"]))
    table = build_kernel_table(H, grids["t"], rho_grid,
                               n_samples=int(mc["n_samples"]),
                               n_steps=int(mc["n_steps"]), seed=seed)
    n_paths = int(mc["n_paths"])
    grid = GridSpec(grids["x_min"], grids["x_max"], int(grids["n_steps"]))
    rep = compare_with_direct(H, grids["t"], n_paths, grid, table, seed=seed,
                              sigma=mc["sigma"])
    pot = sample_two_sided_bm(grid, mc["sigma"], seed, path_index=n_paths + 7)
    field = solve_field(pot, H, grids["t"])
    prof = simulate_profile(H, grids["t"], (0.0, grids["sim_x_max"]), table,
                            empirical_sampler(rep.direct_marginal), seed=seed,
                            path_index=n_paths + 7,
                            n_x=int(grids["sim_n_x"]))
    write_csv(os.path.join(out_dir, "profile_direct.csv"),
              {"x": field.x, "rho": field.rho})
    write_csv(os.path.join(out_dir, "profile_generator.csv"),
              {"x": prof.x_grid, "rho": prof.rho})
    write_csv(os.path.join(out_dir, "profile_jumps.csv"),
              {"x": prof.jump_x, "rho_before": prof.rho_before,
               "rho_after": prof.rho_after})
    comparison = {
        "n_paths": rep.n_paths, "marginal_ks": rep.marginal_ks,
        "jump_ks": rep.jump_ks, "count_ks": rep.count_ks,
        "rate_ratio": rep.rate_ratio,
        "direct_slope_dev": rep.direct_slope_dev,
        "generator_slope_dev": rep.generator_slope_dev,
        "floor_rescues": rep.floor_rescues,
    }
    with open(os.path.join(out_dir, "comparison.json"), "w") as fh:
        json.dump(comparison, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return (["profile_direct.csv", "profile_generator.csv",
             "profile_jumps.csv", "comparison.json"],
            {"comparison": comparison})


def cmd_density(config, out_dir, seed):
    mc = _section(config, "mc")
    result = suite.check_density_cross(seed=seed, out_dir=out_dir,
                                       n_samples=int(mc["n_samples"]))
    phi = _phi(config)
    grid = f_pde(phi, 0.0, -1.0, 1.0, n_y=400, n_t=300, store_values=True)
    rows = grid.rows()
    write_csv(os.path.join(out_dir, "density_grid.csv"),
              {"t": rows[:, 0], "y": rows[:, 1], "f": rows[:, 2]})
    outputs = list(result.outputs) + ["density_grid.csv"]
    return outputs, {"metrics": result.metrics, "passed": result.passed}


def cmd_airy_check(config, out_dir, seed):
    mc = _section(config, "mc")
    reports = identity_report(np.arange(-14, 15) / 10.0,
                              n_samples=int(mc["n_samples"]),
                              n_steps=int(mc["n_steps"]), seed=seed)
    write_csv(os.path.join(out_dir, "airy_identity.csv"), {
        "t": [r.t for r in reports],
        "lhs": [r.lhs for r in reports],
        "rhs": [r.rhs for r in reports],
        "rel_diff": [r.rel_diff for r in reports],
        "lhs_std_error": [r.lhs_std_error for r in reports],
    })
    worst = max(r.rel_diff for r in reports)
    return ["airy_identity.csv"], {"worst_rel_diff": worst}


def cmd_shocks(config, out_dir, seed):
    result = suite.check_shocks(seed=seed, out_dir=out_dir)
    return list(result.outputs), {"metrics": result.metrics,
                                  "passed": result.passed}


def cmd_validate(config, out_dir, seed, threads=1):
    section = _section(config, "validate")
    checks = section.get("checks")
    overrides = section.get("overrides")
    results = suite.run_suite(seed, out_dir=out_dir,
                              budget=section.get("budget", "full"),
                              checks=checks, threads=threads,
                              overrides=overrides)
    outputs = [f for r in results for f in r.outputs]
    outputs += ["validate_summary.csv", "validate_metrics.csv"]
    detail = {r.name: {"passed": r.passed,
                       "elapsed_s": round(r.elapsed, 3),
                       "metrics": {k: float(v) for k, v in r.metrics.items()},
                       "bounds": {k: float(v) for k, v in r.bounds.items()}}
              for r in results}
    return outputs, {"checks": detail,
                     "all_passed": all(r.passed for r in results)}


_COMMANDS = {
    "chernoff": cmd_chernoff,
    "solve": cmd_solve,
    "kernel": cmd_kernel,
    "simulate": cmd_simulate,
    "density": cmd_density,
    "airy-check": cmd_airy_check,
    "shocks": cmd_shocks,
    "validate": cmd_validate,
}


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; 2 is reserved for validation failure
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser():
    parser = _Parser(prog="conslaw", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", default=None,
                        help="JSON config path (default: shipped config)")
    parser.add_argument("--set", action="append", default=[], metavar="K=V",
                        dest="overrides",
                        help="override one config entry, dotted path")
    parser.add_argument("--output-dir", default=None,
                        help="override config output_dir")
    parser.add_argument("--threads", type=int,
                        default=int(os.environ.get("CONSLAW_THREADS", "1")),
                        help="worker pool size (env CONSLAW_THREADS)")
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        config = load_config(args.config, args.overrides)
        if args.output_dir is not None:
            config["output_dir"] = args.output_dir
        seed = config["seed"]
        if not isinstance(seed, int):
            raise ConfigError("seed must be an integer", field="seed")
        out_dir = config["output_dir"]
        os.makedirs(out_dir, exist_ok=True)
        if args.command == "validate":
            outputs, extra = cmd_validate(config, out_dir, seed,
                                          threads=max(1, args.threads))
        else:
            outputs, extra = _COMMANDS[args.command](config, out_dir, seed)
        extra = dict(extra)
        extra["elapsed_s"] = round(time.perf_counter() - t0, 3)
        write_manifest(os.path.join(out_dir, "manifest.json"), args.command,
                       config, seed, outputs, extra=extra)
    except ConslawError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if args.command == "validate" and not extra["all_passed"]:
        failed = [n for n, d in extra["checks"].items() if not d["passed"]]
        print(f"validation failed: {', '.join(failed)}", file=sys.stderr)
        return 2
    if args.command in ("density", "shocks") and not extra.get("passed", True):
        print("validation failed", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
