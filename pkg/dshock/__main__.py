"""Command-line interface to dshock."""

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from . import fv
from ._resources import SAMPLE_CONFIG_PATH, __version__
from .config import OUTPUT_FORMATS, RunConfig
from .errors import NumericalError, ValidationError
from .profile import ProfileResult, ode_residual, shoot, sweep
from .riemann import classify, oc_boundary_curves, region_grid, shock_quantities
from .singular import build_configuration
from .util import to_builtin
from .weak_limit import analyze, bump

_LOGGER = logging.getLogger("dshock")

_PIECE_COLUMNS = ("beta", "r", "w1", "w2", "xi", "kappa")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point"""
    parser = argparse.ArgumentParser(prog="dshock")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "-c",
        "--config",
        action="append",
        help="JSON/YAML config file (may be repeated; later files override earlier ones)",
    )
    parser.add_argument("--out-dir", help="Directory for output files")
    parser.add_argument("--format", choices=OUTPUT_FORMATS, help="Format of output tables")
    parser.add_argument(
        "--debug", action="store_true", help="Print DEBUG messages to the console"
    )

    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("classify", help="Shock quantities and hypothesis verdicts")
    subparsers.add_parser("configure", help="Singular configuration and slow quantities")

    profile_parser = subparsers.add_parser("profile", help="Shoot one viscous profile")
    profile_parser.add_argument("--eps", type=float, help="Viscosity (default from config)")

    sweep_parser = subparsers.add_parser("sweep", help="Profiles over decreasing eps")
    sweep_parser.add_argument("--eps-list", type=float, nargs="+", help="Decreasing eps values")

    subparsers.add_parser("lf", help="Lax-Friedrichs run")

    pair_parser = subparsers.add_parser("pair", help="Weak-limit report of a stored profile")
    pair_parser.add_argument(
        "--profile", required=True, help="Profile JSON (or CSV with --eps) written by 'profile'"
    )
    pair_parser.add_argument("--eps", type=float, help="Viscosity of a CSV profile")

    args = parser.parse_args(argv)

    level = logging.DEBUG if args.debug else logging.INFO
    logging.basicConfig(level=level)
    _LOGGER.debug(args)

    try:
        config = RunConfig.from_files(args.config or [SAMPLE_CONFIG_PATH])
        if args.out_dir:
            config.output.dir = args.out_dir
            out_dir = Path(args.out_dir)
        else:
            out_dir = config.out_dir

        if args.format:
            config.output.format = args.format

        out_dir.mkdir(parents=True, exist_ok=True)
        _COMMANDS[args.command](args, config, out_dir)
    except ValidationError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except NumericalError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 2

    return 0


# -----------------------------------------------------------------------------


def write_table(
    out_dir: Path, name: str, columns: Mapping[str, Any], table_format: str
) -> Path:
    """Write equal-length columns as CSV (full precision) or JSON records."""
    frame = pd.DataFrame({key: np.asarray(value) for key, value in columns.items()})
    if table_format == "csv":
        path = out_dir / f"{name}.csv"
        frame.to_csv(path, index=False, float_format="%.17g")
    else:
        path = out_dir / f"{name}.json"
        write_report(path, frame.to_dict(orient="list"))

    _LOGGER.debug("Wrote %s", path)
    return path


def write_report(path: Path, report: Dict[str, Any]) -> None:
    with open(path, "w", encoding="utf-8") as report_file:
        json.dump(to_builtin(report), report_file, indent=2)


def _emit(out_dir: Path, name: str, report: Dict[str, Any]) -> None:
    """Write a JSON report and echo it to stdout."""
    path = out_dir / f"{name}.json"
    write_report(path, report)
    json.dump(to_builtin(report), sys.stdout, indent=2)
    print("")
    _LOGGER.info("Wrote %s", path)


def _eps_label(eps: float) -> str:
    return f"{eps:g}"


# -----------------------------------------------------------------------------


def run_classify(args: argparse.Namespace, config: RunConfig, out_dir: Path) -> None:
    rd, p = config.riemann_data, config.model

    # Degenerate data are an input error here
    shock_quantities(rd, p)
    verdicts = classify(rd, p, s_max=config.singular.s_max)

    grid = region_grid(rd.uL, p, n_beta=config.classify.n_beta, n_v=config.classify.n_v)
    beta_grid, v_grid = np.meshgrid(grid.beta, grid.v, indexing="ij")
    write_table(
        out_dir,
        "region",
        {
            "beta": beta_grid.ravel(),
            "v": v_grid.ravel(),
            "h1": grid.h1.ravel().astype(int),
            "in_region": grid.in_region.ravel().astype(int),
        },
        config.output.format,
    )

    curves = oc_boundary_curves(rd.uL, p, n_samples=config.classify.n_curve)
    write_table(
        out_dir,
        "boundary",
        {"beta": curves.beta, "v_left": curves.v_left, "v_right": curves.v_right},
        config.output.format,
    )

    report = verdicts.to_dict()
    report["riemann"] = rd.to_dict()
    report["model"] = p.to_dict()
    report["region_samples"] = int(grid.in_region.sum())
    _emit(out_dir, "classify", report)


def run_configure(args: argparse.Namespace, config: RunConfig, out_dir: Path) -> None:
    rd, p = config.riemann_data, config.model
    sq = shock_quantities(rd, p)
    singular = build_configuration(sq, p, config.singular)

    for name, piece in singular.pieces.items():
        write_table(
            out_dir,
            name,
            {column: piece[:, i] for i, column in enumerate(_PIECE_COLUMNS)},
            config.output.format,
        )

    report = singular.slow.to_dict()
    report["shock"] = sq.to_dict()
    report["h3"] = singular.h3.to_dict()
    report["max_kappa"] = singular.max_kappa
    _emit(out_dir, "slow", report)


def run_profile(args: argparse.Namespace, config: RunConfig, out_dir: Path) -> None:
    rd, p = config.riemann_data, config.model
    eps = args.eps if args.eps is not None else config.shooting.eps
    result = shoot(rd, p, eps, cfg=config.shooting)

    label = _eps_label(eps)
    write_table(out_dir, f"profile_eps{label}", result.columns(), config.output.format)
    write_report(out_dir / f"profile_eps{label}_full.json", result.to_dict())

    report = result.to_dict()
    del report["samples"]
    defect = ode_residual(result, p)
    checked = defect[np.isfinite(defect)]
    report["max_ode_residual"] = float(np.max(checked)) if len(checked) else None
    _emit(out_dir, f"profile_eps{label}_report", report)


def run_sweep(args: argparse.Namespace, config: RunConfig, out_dir: Path) -> None:
    rd, p = config.riemann_data, config.model
    result = sweep(rd, p, eps_list=args.eps_list, cfg=config.shooting)

    for member in result.members:
        if member.result is not None:
            label = _eps_label(member.eps)
            write_table(
                out_dir, f"profile_eps{label}", member.result.columns(), config.output.format
            )
            write_report(out_dir / f"profile_eps{label}_full.json", member.result.to_dict())

    _emit(out_dir, "sweep", result.to_dict())

    if not any(m.success for m in result.members):
        raise NumericalError("No profile in the sweep converged")


def run_lf(args: argparse.Namespace, config: RunConfig, out_dir: Path) -> None:
    rd, p = config.riemann_data, config.model
    fv_cfg = config.fv
    fv_run = fv.run(
        rd,
        p,
        grid=fv_cfg.grid,
        cfl=fv_cfg.cfl,
        n_steps=fv_cfg.n_steps,
        record_every=fv_cfg.record_every,
    )

    write_table(
        out_dir,
        "lf_history",
        {name: fv_run.history[name].to_numpy() for name in fv_run.history.columns},
        config.output.format,
    )
    final = fv_run.final
    write_table(
        out_dir,
        "lf_final",
        {"x": final.grid.centers, "beta": final.beta, "v": final.v},
        config.output.format,
    )

    first, last = fv_run.history.iloc[0], fv_run.history.iloc[-1]
    drift = [
        float(last[f"total_{c}"] + last[f"outflow_{c}"] - first[f"total_{c}"])
        for c in ("beta", "v")
    ]
    _emit(
        out_dir,
        "lf",
        {
            "steps": final.step,
            "t": final.t,
            "blew_up": fv_run.blew_up,
            "blow_up_step": fv_run.blow_up_step,
            "max_v_initial": float(first["max_v"]),
            "max_v_final": float(last["max_v"]),
            "delta_ratio": float(last["delta_ratio"]),
            "centroid": float(last["centroid"]),
            "peak_x": float(last["peak_x"]),
            "conservation_drift": drift,
        },
    )


def run_pair(args: argparse.Namespace, config: RunConfig, out_dir: Path) -> None:
    rd, p = config.riemann_data, config.model
    sq = shock_quantities(rd, p)
    profile_path = Path(args.profile)

    if profile_path.suffix == ".csv":
        eps = args.eps if args.eps is not None else config.shooting.eps
        result = ProfileResult.from_csv(profile_path, eps=eps, s=sq.s, r0=config.shooting.r0)
    else:
        with open(profile_path, "r", encoding="utf-8") as profile_file:
            result = ProfileResult.from_dict(json.load(profile_file))

    test_functions = {"bump": bump(sq.s, config.weak_limit.bump_half_width)}
    report = analyze(result, sq, p, r0=config.weak_limit.r0, test_functions=test_functions)

    summary = report.to_dict()
    summary["profile"] = str(profile_path)
    summary["bump_half_width"] = config.weak_limit.bump_half_width
    if math.isfinite(report.e0) and report.e0 != 0:
        summary["pairing_tolerance"] = 0.05 * abs(report.e0)

    _emit(out_dir, f"pair_eps{_eps_label(result.eps)}", summary)


_COMMANDS = {
    "classify": run_classify,
    "configure": run_configure,
    "profile": run_profile,
    "sweep": run_sweep,
    "lf": run_lf,
    "pair": run_pair,
}


# -----------------------------------------------------------------------------

if __name__ == "__main__":
    sys.exit(main())
