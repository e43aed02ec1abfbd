"""Command line driver: run, converge, analyze, temp-sweep.

Exit codes: 0 success, 1 usage or configuration error, 2 solver error,
3 monitor violation when --strict is requested.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, parse_config
from .diagnostics import convergence_study
from .grid_field import TensorField, field_reduce, ic_director
from .integrators import RunReport, simulate
from .nonlinearity import ModelParams, mbp_constants
from .qtensor import DegenerateTensorError, biaxiality, eig_sym, principal_axis
from .snapshot import read_snapshot, write_snapshot

_SCI = "%.9E"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _model_dict(p: ModelParams) -> dict[str, float]:
    return {
        "c": p.c,
        "alpha": p.alpha,
        "beta": p.beta,
        "gamma": p.gamma,
        "dim": float(p.dim),
    }


def _initial_field(cfg: RunConfig) -> TensorField:
    if cfg.ic in ("paper2d", "paper3d"):
        return ic_director(cfg.grid, cfg.ic)
    snap = read_snapshot(cfg.ic[len("file:") :])
    if snap.field.grid != cfg.grid:
        raise ConfigError(
            f"run.ic: snapshot grid (dim={snap.field.grid.dim}, "
            f"n={snap.field.grid.n}) does not match the configured grid"
        )
    return snap.field


def _write_timeseries(path: Path, report: RunReport) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,sup_frob,sup_spectral,min_eig,max_eig,energy\n")
        for row in zip(
            report.times,
            report.sup_frob,
            report.sup_spectral,
            report.min_eig,
            report.max_eig,
            report.energy,
        ):
            fh.write(",".join(_SCI % v for v in row) + "\n")


def _write_summary(path: Path, cfg: RunConfig, report: RunReport, consts) -> None:
    rises = np.diff(report.energy)
    max_rise = float(np.max(rises)) if rises.size else 0.0
    lines = [
        f"scheme = {cfg.scheme.value}",
        f"grid n = {cfg.grid.n} (dim {cfg.grid.dim})",
        f"tau = {cfg.tau!r}",
        f"t_end = {cfg.t_end!r}",
        f"mbp radius a = {report.mbp_radius!r}",
        f"b = {consts.b!r}",
        f"tau0 advisory = {consts.tau0!r}",
        f"violations = {len(report.violations)}",
    ]
    for t, kind in report.violations:
        lines.append(f"  at t={t:g}: {kind}")
    lines += [
        f"final sup_frob = {float(report.sup_frob[-1])!r}",
        f"final min_eig = {float(report.min_eig[-1])!r}",
        f"final max_eig = {float(report.max_eig[-1])!r}",
        f"final energy = {float(report.energy[-1])!r}",
        f"energy monotone within tolerance = "
        f"{'yes' if not any(k == 'energy_increase' for _, k in report.violations) else 'no'}",
        f"max energy rise between samples = {max_rise!r}",
        f"max energy over run - initial energy = "
        f"{float(np.max(report.energy) - report.energy[0])!r}",
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_simulation(cfg: RunConfig, out_dir: Path) -> RunReport:
    """Simulate per config and write timeseries, snapshots, and summary."""
    out_dir.mkdir(parents=True, exist_ok=True)
    q0 = _initial_field(cfg)
    consts = mbp_constants(cfg.params, field_reduce(q0).sup_frob)
    model = _model_dict(cfg.params)

    def sink(t: float, field: TensorField) -> None:
        write_snapshot(out_dir / f"snapshot_t{t:g}.qfld", field, t, model)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = simulate(
            q0,
            cfg.scheme,
            cfg.params,
            cfg.tau,
            cfg.t_end,
            monitor_every=cfg.monitor_every,
            kind=cfg.laplacian,
            snapshot_times=cfg.snapshot_times,
            snapshot_sink=sink,
        )
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)

    write_snapshot(out_dir / "final.qfld", report.final_field, cfg.t_end, model)
    _write_timeseries(out_dir / "timeseries.csv", report)
    _write_summary(out_dir / "summary.txt", cfg, report, consts)
    return report


def cmd_run(cfg: RunConfig, strict: bool) -> int:
    report = run_simulation(cfg, cfg.out_dir)
    print(f"wrote {cfg.out_dir}/timeseries.csv ({len(report.times)} samples)")
    if report.violations:
        print(f"{len(report.violations)} monitor violation(s); see summary.txt")
        if strict:
            return 3
    return 0


def cmd_converge(cfg: RunConfig, levels: int) -> int:
    if levels < 3:
        raise ConfigError(f"--levels must be >= 3 for rate estimates, got {levels}")
    q0 = _initial_field(cfg)
    table = convergence_study(
        q0, cfg.scheme, cfg.params, cfg.tau, levels, cfg.t_end, kind=cfg.laplacian
    )
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / "convergence.csv"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("tau,err_frob,rate_frob,err_2norm,rate_2norm\n")
        for k in range(len(table.errors_frob)):
            rate_f = _SCI % table.rates_frob[k - 1] if k > 0 else ""
            rate_s = _SCI % table.rates_spectral[k - 1] if k > 0 else ""
            fh.write(
                ",".join(
                    [
                        _SCI % table.taus[k],
                        _SCI % table.errors_frob[k],
                        rate_f,
                        _SCI % table.errors_spectral[k],
                        rate_s,
                    ]
                )
                + "\n"
            )
    print(f"wrote {path}")
    return 0


def cmd_analyze(snapshot_path: str, eigen: bool, biax: bool) -> int:
    snap = read_snapshot(snapshot_path)
    field = snap.field
    grid = field.grid
    if biax and grid.dim != 3:
        raise ConfigError("--biaxiality requires a 3D snapshot")
    coord_names = ("x", "y", "z")[: grid.dim]
    coords = [c.ravel() for c in grid.coordinate_arrays()]
    npoints = grid.n**grid.dim
    flat = field.data.reshape(grid.ncomp, npoints)
    base = Path(snapshot_path)

    if eigen:
        path = base.with_name(base.stem + "_eigen.csv")
        axis_names = [f"axis_{c}" for c in coord_names]
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(
                ",".join(list(coord_names) + ["lambda_max"] + axis_names + ["degenerate"])
                + "\n"
            )
            for i in range(npoints):
                q = field.point(*np.unravel_index(i, grid.shape))
                vals, _ = eig_sym(q)
                row = [_SCI % coords[d][i] for d in range(grid.dim)]
                row.append(_SCI % vals[0])
                try:
                    axis = principal_axis(q)
                    row += [_SCI % v for v in axis]
                    row.append("0")
                except DegenerateTensorError:
                    row += [""] * grid.dim
                    row.append("1")
                fh.write(",".join(row) + "\n")
        print(f"wrote {path}")

    if biax:
        path = base.with_name(base.stem + "_biaxiality.csv")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(list(coord_names) + ["beta_b", "degenerate"]) + "\n")
            for i in range(npoints):
                q = field.point(*np.unravel_index(i, grid.shape))
                row = [_SCI % coords[d][i] for d in range(grid.dim)]
                try:
                    row += [_SCI % biaxiality(q), "0"]
                except DegenerateTensorError:
                    row += ["", "1"]
                fh.write(",".join(row) + "\n")
        print(f"wrote {path}")
    return 0


def cmd_temp_sweep(cfg: RunConfig, thetas: list[float]) -> int:
    if cfg.temperature is None:
        raise ConfigError(
            "temp-sweep requires the temperature-form model "
            "(model.a_coef / model.theta / model.theta_star)"
        )
    if not thetas:
        raise ConfigError("--theta list must not be empty")
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for theta in thetas:
        alpha = cfg.temperature.alpha(theta)
        params = ModelParams(
            c=cfg.params.c,
            alpha=alpha,
            beta=cfg.params.beta,
            gamma=cfg.params.gamma,
            dim=cfg.params.dim,
        )
        sub = RunConfig(
            params=params,
            temperature=cfg.temperature,
            grid=cfg.grid,
            laplacian=cfg.laplacian,
            tau=cfg.tau,
            t_end=cfg.t_end,
            monitor_every=cfg.monitor_every,
            scheme=cfg.scheme,
            ic=cfg.ic,
            out_dir=cfg.out_dir,
            snapshot_times=cfg.snapshot_times,
        )
        report = run_simulation(sub, cfg.out_dir / f"theta_{theta:g}")
        rows.append((theta, alpha, report.max_eig[-1], report.energy[-1]))
        print(f"theta={theta:g}: final max_eig={report.max_eig[-1]:.6f}")
    path = cfg.out_dir / "sweep_summary.csv"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("theta,alpha,final_max_eig,final_energy\n")
        for row in rows:
            fh.write(",".join(_SCI % v for v in row) + "\n")
    print(f"wrote {path}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="qflow", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one configuration")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--strict", action="store_true")

    p_conv = sub.add_parser("converge", help="successive-halving order study")
    p_conv.add_argument("--config", required=True)
    p_conv.add_argument("--levels", type=int, required=True)

    p_an = sub.add_parser("analyze", help="eigen/biaxiality maps from a snapshot")
    p_an.add_argument("--snapshot", required=True)
    p_an.add_argument("--eigen", action="store_true")
    p_an.add_argument("--biaxiality", action="store_true")

    p_ts = sub.add_parser("temp-sweep", help="one run per temperature")
    p_ts.add_argument("--config", required=True)
    p_ts.add_argument("--theta", required=True, help="comma-separated temperatures")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return cmd_run(parse_config(args.config), args.strict)
        if args.command == "converge":
            return cmd_converge(parse_config(args.config), args.levels)
        if args.command == "analyze":
            if not (args.eigen or args.biaxiality):
                raise UsageError("analyze needs --eigen and/or --biaxiality")
            return cmd_analyze(args.snapshot, args.eigen, args.biaxiality)
        if args.command == "temp-sweep":
            try:
                thetas = [float(v) for v in args.theta.split(",") if v.strip()]
            except ValueError:
                raise UsageError(f"cannot parse --theta {args.theta!r}") from None
            return cmd_temp_sweep(parse_config(args.config), thetas)
        raise UsageError(f"unknown command {args.command!r}")
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, AssertionError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
