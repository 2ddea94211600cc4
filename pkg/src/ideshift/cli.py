"""Experiment orchestration: figure-level sweeps, CSV and SVG emission.

Every CSV embeds the full resolved configuration (including the seed) as a
'#'-prefixed header block; rerunning the same subcommand from that block
reproduces the file bit-identically.  SVG output is pure presentation over
the CSV data and can be disabled with --no-svg.

Exit codes: 0 ok, 1 computation error, 2 configuration error.
"""

from __future__ import annotations

import math
import sys
from pathlib import Path

import click
import numpy as np

from . import persistence, spectral
from .config import (ConfigError, config_lines, parse_config_text, resolve,
                     variance_grid)
from .environment import EnvironmentModel, mean_preserving_family
from .growth import GrowthFamily, GrowthMap
from .habitat import Suitability, build_grid
from .kernels import DispersalKernel, KernelFamily
from .simulate import run_trajectory

MC_SWEEP_POINTS = 13  # Monte Carlo sweeps use a coarser variance grid


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _kernel(cfg, family=None, variance=None) -> DispersalKernel:
    fam = KernelFamily(family or cfg["kernel.family"])
    return DispersalKernel(fam, cfg["kernel.variance"] if variance is None else variance)


def _growth(cfg) -> GrowthMap:
    return GrowthMap(GrowthFamily(cfg["growth.family"]), cfg["growth.capacity"])


def _suitability(cfg) -> Suitability:
    return Suitability(tuple(cfg["habitat.omega0_km"]))


def _environment(cfg, zero_sigma=False) -> EnvironmentModel:
    sigmas = cfg["env.sigma_atoms"]
    if zero_sigma:
        sigmas = tuple(0.0 for _ in sigmas)
    atoms = tuple(zip(sigmas, cfg["env.r_atoms"], cfg["env.probs"]))
    return EnvironmentModel(atoms, c=cfg["env.c"])


def _mc_variance_grid(cfg) -> np.ndarray:
    n = min(cfg["sweep.variance_points"], MC_SWEEP_POINTS)
    lo, hi = cfg["sweep.variance_min"], cfg["sweep.variance_max"]
    if cfg["sweep.variance_scale"] == "log":
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


# ----------------------------------------------------------------- output ---

def write_csv(path: Path, command: str, cfg: dict, columns, rows,
              extra_comments=()):
    lines = [f"# ideshift {command}", "# config-begin"]
    lines += [f"# {line}" for line in config_lines(cfg)]
    lines.append("# config-end")
    lines += [f"# {comment}" for comment in extra_comments]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


def read_embedded_config(path) -> dict:
    """Recover the resolved config dict from a CSV's header block."""
    lines = Path(path).read_text().splitlines()
    try:
        start = lines.index("# config-begin") + 1
        end = lines.index("# config-end")
    except ValueError:
        raise ConfigError(f"{path}: no embedded config block") from None
    text = "\n".join(line[2:] for line in lines[start:end])
    return resolve(parse_config_text(text))


def _plot_lines(path: Path, x, series: dict, xlabel: str, ylabel: str,
                hline=None, logx=False):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for label, y in series.items():
        ax.plot(x, y, label=label)
    if hline is not None:
        ax.axhline(hline, color="0.4", linestyle=":", linewidth=1)
    if logx:
        ax.set_xscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if len(series) > 1:
        ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


# --------------------------------------------------------------- commands ---

def cmd_eigen(cfg) -> list[Path]:
    """Principal eigenvalue and its dispersal-success approximations over a
    kernel-variance sweep (patch not shifted)."""
    out = Path(cfg["output.dir"])
    suit = _suitability(cfg)
    omega0 = suit.support
    env0 = EnvironmentModel(((0.0, 1.0, 1.0),), c=0.0)
    hab = build_grid(suit, env0, cfg["numerics.grid_points"])
    rows = []
    for v in variance_grid(cfg):
        kern = _kernel(cfg, variance=v)
        lam0 = spectral.eigen_for(kern, hab, 0.0,
                                  tol=cfg["numerics.eigen_tol"]).value
        rows.append((v, lam0,
                     spectral.dispersal_success_approx(kern, omega0),
                     spectral.modified_dispersal_success_approx(kern, omega0)))
    csv = out / "eigen.csv"
    write_csv(csv, "eigen", cfg,
              ["variance", "lambda0", "lambda0_bar", "lambda0_hat"], rows)
    files = [csv]
    if cfg["output.svg"]:
        data = np.array(rows)
        svg = out / "eigen.svg"
        _plot_lines(svg, data[:, 0],
                    {"lambda0": data[:, 1], "lambda0_bar": data[:, 2],
                     "lambda0_hat": data[:, 3]},
                    "kernel variance (km^2/generation)", "eigenvalue", logx=True)
        files.append(svg)
    return files


def cmd_critical_speed(cfg) -> list[Path]:
    """Critical shifting speed vs kernel variance (Gaussian, sigma = 0)."""
    if cfg["kernel.family"] != "gaussian":
        raise ConfigError("kernel.family: critical-speed needs a gaussian kernel")
    out = Path(cfg["output.dir"])
    suit = _suitability(cfg)
    env = _environment(cfg, zero_sigma=True)
    hab = build_grid(suit, env, cfg["numerics.grid_points"])
    log_mean = env.log_growth_mean()
    rows = []
    for v in variance_grid(cfg):
        kern = _kernel(cfg, variance=v)
        lam0 = spectral.eigen_for(kern, hab, 0.0,
                                  tol=cfg["numerics.eigen_tol"]).value
        c_exact = persistence.critical_speed_gaussian(lam0, v, env).c_star
        lam_bar = spectral.dispersal_success_approx(kern, suit.support)
        gain = math.log(lam_bar) + log_mean
        c_approx = math.sqrt(2.0 * v * gain) if gain > 0 else 0.0
        rows.append((v, c_exact, c_approx))
    data = np.array(rows)
    crossings = _crossings(data[:, 0], data[:, 1], cfg["env.c"])
    comments = [
        f"reference_speed = {_fmt(cfg['env.c'])}",
        "crossing_variances = " + ", ".join(_fmt(v) for v in crossings),
    ]
    csv = out / "critical_speed.csv"
    write_csv(csv, "critical-speed", cfg,
              ["variance", "c_star_exact", "c_star_dispersal_success_approx"],
              rows, comments)
    files = [csv]
    if cfg["output.svg"]:
        svg = out / "critical_speed.svg"
        _plot_lines(svg, data[:, 0],
                    {"c_star": data[:, 1], "c_star (dispersal-success)": data[:, 2]},
                    "kernel variance (km^2/generation)",
                    "critical speed (km/generation)",
                    hline=cfg["env.c"], logx=True)
        files.append(svg)
    return files


def _crossings(x, y, level) -> list[float]:
    """Linear-interpolated x where y crosses the level."""
    out = []
    d = y - level
    for i in range(len(x) - 1):
        if d[i] == 0.0:
            out.append(float(x[i]))
        elif d[i] * d[i + 1] < 0:
            w = d[i] / (d[i] - d[i + 1])
            out.append(float(x[i] + w * (x[i + 1] - x[i])))
    if d[-1] == 0.0:
        out.append(float(x[-1]))
    return out


def cmd_lambda_sweep(cfg) -> list[Path]:
    """Monte Carlo Lambda vs kernel variance for Gaussian and Laplace kernels,
    plus the deterministic-shift sanity value R_bar * lambda_c."""
    out = Path(cfg["output.dir"])
    suit = _suitability(cfg)
    env = _environment(cfg)
    env0 = _environment(cfg, zero_sigma=True)
    hab = build_grid(suit, env, cfg["numerics.grid_points"])
    hab0 = build_grid(suit, env0, cfg["numerics.grid_points"])
    r_bar = env.geometric_mean_growth()
    rows = []
    for v in _mc_variance_grid(cfg):
        row = [v]
        for family in ("gaussian", "laplace"):
            kern = _kernel(cfg, family=family, variance=v)
            est = persistence.estimate_lambda(
                kern, hab, env, cfg["numerics.horizon"],
                cfg["numerics.replicates"], cfg["numerics.base_seed"])
            row += [est.value, est.log_std]
        for family in ("gaussian", "laplace"):
            kern = _kernel(cfg, family=family, variance=v)
            lam_c = spectral.eigen_for(kern, hab0, cfg["env.c"],
                                       tol=cfg["numerics.eigen_tol"]).value
            row.append(r_bar * lam_c)
        rows.append(tuple(row))
    csv = out / "lambda_sweep.csv"
    write_csv(csv, "lambda-sweep", cfg,
              ["variance", "lambda_gaussian", "lambda_gaussian_log_std",
               "lambda_laplace", "lambda_laplace_log_std",
               "lambda_det_sigma_gaussian", "lambda_det_sigma_laplace"], rows)
    files = [csv]
    if cfg["output.svg"]:
        data = np.array(rows)
        svg = out / "lambda_sweep.svg"
        _plot_lines(svg, data[:, 0],
                    {"gaussian": data[:, 1], "laplace": data[:, 3]},
                    "kernel variance (km^2/generation)", "Lambda",
                    hline=1.0, logx=True)
        files.append(svg)
    return files


def cmd_variance_effect(cfg) -> list[Path]:
    """Lambda along mean-preserving spread sweeps in sigma and in r."""
    out = Path(cfg["output.dir"])
    suit = _suitability(cfg)
    base = _environment(cfg)
    files = []
    for which, spreads in (("sigma", cfg["sweep.sigma_spreads"]),
                           ("r", cfg["sweep.r_spreads"])):
        rows = []
        for spread in spreads:
            env = mean_preserving_family(base, which, spread)
            hab = build_grid(suit, env, cfg["numerics.grid_points"])
            row = [spread, spread * spread]
            for family in ("gaussian", "laplace"):
                kern = _kernel(cfg, family=family)
                est = persistence.estimate_lambda(
                    kern, hab, env, cfg["numerics.horizon"],
                    cfg["numerics.replicates"], cfg["numerics.base_seed"])
                row += [est.value, est.log_se]
            rows.append(tuple(row))
        csv = out / f"variance_effect_{which}.csv"
        write_csv(csv, "variance-effect", cfg,
                  ["spread", "variance", "lambda_gaussian", "lambda_gaussian_log_se",
                   "lambda_laplace", "lambda_laplace_log_se"], rows)
        files.append(csv)
        if cfg["output.svg"]:
            data = np.array(rows)
            svg = out / f"variance_effect_{which}.svg"
            _plot_lines(svg, data[:, 1],
                        {"gaussian": data[:, 2], "laplace": data[:, 4]},
                        f"variance of {which}", "Lambda", hline=1.0)
            files.append(svg)
    return files


def cmd_simulate(cfg) -> list[Path]:
    """One full nonlinear trajectory: mass/sup series, classification,
    optional density snapshots."""
    out = Path(cfg["output.dir"])
    suit = _suitability(cfg)
    env = _environment(cfg)
    hab = build_grid(suit, env, cfg["numerics.grid_points"])
    kern = _kernel(cfg)
    growth = _growth(cfg)
    u0 = suit(hab.nodes)  # start from the unshifted suitable patch
    snap_times = tuple(int(t) for t in cfg["output.snapshot_times"])
    stream = env.stream(cfg["numerics.base_seed"], 0)
    rec = run_trajectory(kern, growth, hab, env, u0, cfg["numerics.horizon"],
                         stream, snapshot_times=snap_times)
    rows = [(t, rec.masses[t], rec.sups[t]) for t in range(len(rec.masses))]
    csv = out / "simulate_trajectory.csv"
    write_csv(csv, "simulate", cfg, ["t", "mass", "sup_density"], rows,
              [f"classification = {rec.classification}",
               f"replicate = {rec.replicate}"])
    files = [csv]
    summary = out / "simulate_summary.txt"
    summary.write_text("\n".join([
        f"classification = {rec.classification}",
        f"final_mass = {_fmt(rec.masses[-1])}",
        f"final_sup_density = {_fmt(rec.sups[-1])}",
        f"horizon = {cfg['numerics.horizon']}",
        f"replicate = {rec.replicate}",
        f"base_seed = {cfg['numerics.base_seed']}",
        f"rules.extinction_mass = {_fmt(rec.rules.extinction_mass)}",
        f"rules.extinction_window = {rec.rules.extinction_window}",
        f"rules.persistence_floor = {_fmt(rec.rules.persistence_floor)}",
        f"rules.trailing_window = {rec.rules.trailing_window}",
        f"rules.relative_stability = {_fmt(rec.rules.relative_stability)}",
    ]) + "\n")
    files.append(summary)
    if snap_times:
        columns = ["x"] + [f"u_t{t}" for t in rec.snapshot_times]
        rows = [tuple([hab.nodes[i]] + [rec.snapshots[k, i]
                                        for k in range(len(snap_times))])
                for i in range(hab.n)]
        snap_csv = out / "simulate_snapshots.csv"
        write_csv(snap_csv, "simulate", cfg, columns, rows)
        files.append(snap_csv)
    if cfg["output.svg"]:
        svg = out / "simulate_trajectory.svg"
        _plot_lines(svg, np.arange(len(rec.masses)), {"mass": rec.masses},
                    "generation", "total mass")
        files.append(svg)
    return files


COMMANDS = {
    "eigen": cmd_eigen,
    "critical-speed": cmd_critical_speed,
    "lambda-sweep": cmd_lambda_sweep,
    "variance-effect": cmd_variance_effect,
    "simulate": cmd_simulate,
}


# -------------------------------------------------------------------- CLI ---

def _common_options(fn):
    opts = [
        click.option("--config", "config_path", type=click.Path(exists=True),
                     default=None, help="Experiment config file."),
        click.option("--seed", type=int, default=None,
                     help="Override numerics.base_seed."),
        click.option("--out", type=click.Path(), default=None,
                     help="Override output.dir."),
        click.option("--replicates", type=int, default=None,
                     help="Override numerics.replicates."),
        click.option("--horizon", type=int, default=None,
                     help="Override numerics.horizon."),
        click.option("--grid-points", type=int, default=None,
                     help="Override numerics.grid_points."),
        click.option("--no-svg", is_flag=True, default=False,
                     help="Skip SVG emission."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _resolve_from_cli(config_path, seed, out, replicates, horizon,
                      grid_points, no_svg) -> dict:
    overrides = {}
    if config_path is not None:
        overrides.update(parse_config_text(Path(config_path).read_text()))
    if seed is not None:
        overrides["numerics.base_seed"] = seed
    if out is not None:
        overrides["output.dir"] = out
    if replicates is not None:
        overrides["numerics.replicates"] = replicates
    if horizon is not None:
        overrides["numerics.horizon"] = horizon
    if grid_points is not None:
        overrides["numerics.grid_points"] = grid_points
    if no_svg:
        overrides["output.svg"] = False
    return resolve(overrides)


@click.group()
def cli():
    """Persistence analysis for populations on a randomly shifting habitat."""


def _register(name):
    command = COMMANDS[name]

    @cli.command(name, help=command.__doc__)
    @_common_options
    def _cmd(**kwargs):
        cfg = _resolve_from_cli(**kwargs)
        for path in command(cfg):
            click.echo(str(path))


for _name in COMMANDS:
    _register(_name)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        return 2
    except click.UsageError as exc:
        click.echo(f"usage error: {exc}", err=True)
        return 2
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return 1
    except Exception as exc:  # computation failure
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
