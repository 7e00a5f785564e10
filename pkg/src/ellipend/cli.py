"""Command-line front end.

Subcommands: simulate, exact, multiscale, average, compare, sweep.
Parameters come from dimensionless flags, physical flags, or a key=value
file; outputs are CSV/JSON with provenance comments, optionally with a
rendered figure next to the delimited output.  Exit codes: 0 success,
1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import averaging, compare, dynamics, exact, multiscale, params
from .errors import EllipendError, InvalidParameterError
from .params import DimensionlessParams, PhysicalParams, Regime, classify_regime

__all__ = ["RunConfig", "run", "main"]

_DEFAULT_TOL = 1e-10
_DEFAULT_SAMPLES = 1024
_METHODS = ("multiscale1", "multiscale2", "averaging2")


@dataclass(frozen=True)
class RunConfig:
    """One resolved CLI invocation: command, parameters, output, knobs."""

    command: str
    d: DimensionlessParams
    out: Path | None
    fmt: str
    tol: float
    options: dict


class _UsageError(Exception):
    pass


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("parameters (choose one source)")
    g.add_argument("--eps", type=float, help="semiaxis half-difference ratio (dimensionless)")
    g.add_argument("--mu", type=float, help="semiaxis half-sum ratio (dimensionless, > 0)")
    g.add_argument("--omega", type=float, help="frequency ratio sqrt(g/l)/Omega (dimensionless)")
    g.add_argument("--beta", type=float, help="damping ratio c/(m l^2 Omega) (dimensionless)")
    g.add_argument("--m", type=float, help="mass (kg)")
    g.add_argument("--l", type=float, help="pendulum length (m)")
    g.add_argument("--c", type=float, help="viscous damping coefficient (N m s)")
    g.add_argument("--g", type=float, help="gravitational acceleration (m/s^2)")
    g.add_argument("--X", type=float, help="horizontal semiaxis (m)")
    g.add_argument("--Y", type=float, help="vertical semiaxis (m)")
    g.add_argument("--Omega", type=float, help="excitation angular frequency (rad/s)")
    g.add_argument("--params", type=Path, metavar="FILE",
                   help="key=value parameter file (keys m,l,c,g,X,Y,Omega or eps,mu,omega,beta)")


def _resolve_params(args) -> DimensionlessParams:
    # a sweep varies beta itself, so the template may omit it
    beta_optional = args.command == "sweep"
    dim_flags = [args.eps, args.mu, args.omega, args.beta]
    phys_flags = [args.m, args.l, args.c, args.g, args.X, args.Y, args.Omega]
    sources = sum(
        [
            args.params is not None,
            any(v is not None for v in dim_flags),
            any(v is not None for v in phys_flags),
        ]
    )
    if sources != 1:
        raise _UsageError(
            "provide exactly one parameter source: --params FILE, all of "
            "--eps/--mu/--omega/--beta, or all of --m/--l/--c/--g/--X/--Y/--Omega"
        )
    if args.params is not None:
        loaded = params.load_params_file(args.params)
        if isinstance(loaded, PhysicalParams):
            return params.nondimensionalize(loaded)
        return loaded
    if any(v is not None for v in dim_flags):
        if args.beta is None and beta_optional:
            dim_flags[3] = 0.0
        if any(v is None for v in dim_flags):
            needed = "--eps --mu --omega" if beta_optional else "--eps --mu --omega --beta"
            raise _UsageError(f"all of {needed} are required together")
        return DimensionlessParams(dim_flags[0], dim_flags[1], dim_flags[2], dim_flags[3])
    if any(v is None for v in phys_flags):
        raise _UsageError("all of --m --l --c --g --X --Y --Omega are required together")
    return params.nondimensionalize(
        PhysicalParams(args.m, args.l, args.c, args.g, args.X, args.Y, args.Omega)
    )


def _provenance(config: RunConfig, skip: tuple[str, ...] = ()) -> list[str]:
    d = config.d
    lines = [
        f"command={config.command}",
        f"eps={d.eps!r} mu={d.mu!r} omega={d.omega!r} beta={d.beta!r}",
        f"tol={config.tol!r}",
        f"transient_periods={dynamics.TRANSIENT_PERIODS}",
    ]
    for key in sorted(config.options):
        value = config.options[key]
        if key == "plot" or key in skip or value is None:
            continue
        lines.append(f"{key}={value}")
    return lines


def _meta(config: RunConfig) -> dict:
    d = config.d
    meta = {
        "command": config.command,
        "eps": d.eps,
        "mu": d.mu,
        "omega": d.omega,
        "beta": d.beta,
        "tol": config.tol,
        "transient_periods": dynamics.TRANSIENT_PERIODS,
    }
    for key in sorted(config.options):
        value = config.options[key]
        if key in ("plot", "grid") or value is None:
            continue
        meta[key] = str(value) if isinstance(value, Path) else value
    return meta


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8", newline="\n")


def _plot_path(out: Path) -> Path:
    return out.with_suffix(".png")


# ---------------------------------------------------------------------------
# Command implementations
# ---------------------------------------------------------------------------


def _run_simulate(config: RunConfig) -> int:
    opts = config.options
    d = config.d
    if opts["theta0"] is not None:
        theta0 = opts["theta0"]
    elif abs(d.beta) <= d.mu:
        theta0 = math.asin(d.beta / d.mu)
    else:
        theta0 = 0.0
    s0 = dynamics.State(theta0, opts["theta_dot0"])
    traj = dynamics.integrate(d, s0, opts["tau0"], opts["tau_max"], config.tol, opts["samples"])
    comments = _provenance(config, skip=("theta0", "theta_dot0")) + [
        f"theta0={s0.theta!r} theta_dot0={s0.theta_dot!r}",
        f"steady_start_index={traj.steady_start}",
    ]
    traj.write_csv(config.out, comments)
    if opts["plot"]:
        from . import plots

        plots.save_trajectory_figure(traj, _plot_path(config.out))
    return 0


def _run_exact(config: RunConfig) -> int:
    d = config.d
    opts = config.options
    branches = exact.exact_branches(d.beta, d.mu, range(opts["k_min"], opts["k_max"] + 1))
    if config.fmt == "json":
        payload = {
            "meta": _meta(config),
            "existence_window": exact.existence_window(d.beta, d.mu),
            "branches": [
                {"theta0": b.theta0, "k": b.k, "stable": b.stable} for b in branches
            ],
        }
        _write_json(config.out, payload)
    else:
        lines = [f"# {c}" for c in _provenance(config)]
        lines.append("theta0,k,stable")
        for b in branches:
            lines.append(f"{b.theta0:.16e},{b.k},{int(b.stable)}")
        config.out.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return 0


def _solution_payload(config: RunConfig, sol) -> dict:
    return {"meta": _meta(config), "solution": sol.to_dict()}


def _run_multiscale(config: RunConfig) -> int:
    sol = multiscale.multiscale_solution(config.d, config.options["order"])
    if config.fmt == "json":
        _write_json(config.out, _solution_payload(config, sol))
    else:
        traj = sol.sample(0.0, 2.0 * math.pi, config.options["samples"])
        traj.write_csv(config.out, _provenance(config))
    return 0


def _run_average(config: RunConfig) -> int:
    d = config.d
    sp = averaging.ScaledParams.from_dimensionless(d)
    state = averaging.stationary_state(sp, d.eps, config.options["order"])
    stable = averaging.averaged_stability(state, sp, d.eps)
    try:
        advisory = averaging.stationary_closed_form_first(sp, d.eps)
        advisory_q, advisory_zeta = advisory.Q, advisory.Zeta
    except EllipendError:
        advisory_q = advisory_zeta = None
    regime = classify_regime(
        d, config.options["small_threshold"], config.options["small_mu_threshold"]
    )
    payload = {
        "meta": _meta(config),
        "regime": regime.value,
        "order": state.order,
        "Q": state.Q,
        "Zeta": state.Zeta,
        "residual": state.residual,
        "trivial": state.trivial,
        "stable": stable,
        "advisory_Q": advisory_q,
        "advisory_Zeta": advisory_zeta,
    }
    if config.options["order"] == 2:
        sol = averaging.averaging_solution(d)
        payload["solution"] = sol.to_dict()
        if config.options["solution_csv"] is not None:
            traj = sol.sample(0.0, 2.0 * math.pi, config.options["samples"])
            traj.write_csv(config.options["solution_csv"], _provenance(config))
    _write_json(config.out, payload)
    return 0


def _run_compare(config: RunConfig) -> int:
    d = config.d
    methods = config.options["methods"]
    reports = []
    curves: dict[str, np.ndarray] = {}
    tau = numeric = None
    for method in methods:
        sol = compare.build_solution(d, method)
        tau, numeric, approx = compare.comparison_curves(sol, d, config.tol, config.options["samples"])
        report = compare.compare_solution(sol, d, config.tol, config.options["samples"])
        reports.append(report.to_dict())
        curves[method] = approx
    payload = {"meta": _meta(config), "reports": reports}
    _write_json(config.out, payload)
    if config.options["plot"] and tau is not None:
        from . import plots

        plots.save_comparison_figure(tau, numeric, curves, _plot_path(config.out))
    return 0


def _run_sweep(config: RunConfig) -> int:
    opts = config.options
    result = compare.sweep_beta(config.d, opts["grid"], opts["methods"], config.tol, opts["jobs"])
    compare.write_sweep_csv(result, config.out, _provenance(config, skip=("grid",)))
    if opts["plot"]:
        from . import plots

        plots.save_sweep_figure(result, _plot_path(config.out), log_x=opts["log_grid"])
    return 0


_RUNNERS = {
    "simulate": _run_simulate,
    "exact": _run_exact,
    "multiscale": _run_multiscale,
    "average": _run_average,
    "compare": _run_compare,
    "sweep": _run_sweep,
}


def run(config: RunConfig) -> int:
    """Dispatch a resolved configuration to its command implementation."""
    return _RUNNERS[config.command](config)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _parse_grid(spec: str, log: bool) -> np.ndarray:
    try:
        lo_s, hi_s, count_s = spec.split(":")
        lo, hi, count = float(lo_s), float(hi_s), int(count_s)
    except ValueError:
        raise _UsageError(f"grid must be lo:hi:count, got {spec!r}") from None
    if count < 1 or hi < lo:
        raise _UsageError(f"grid needs hi >= lo and count >= 1, got {spec!r}")
    if log:
        if lo <= 0:
            raise _UsageError("log grid requires lo > 0")
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


def _parse_methods(spec: str) -> list[str]:
    methods = [m.strip() for m in spec.split(",") if m.strip()]
    for m in methods:
        if m not in _METHODS:
            raise _UsageError(f"unknown method {m!r}; choose from {', '.join(_METHODS)}")
    if not methods:
        raise _UsageError("at least one method is required")
    return methods


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ellipend",
        description="Rotations of a pendulum on an elliptically vibrating pivot: "
        "simulation, asymptotic solutions, stability, accuracy sweeps.",
    )
    parser.add_argument(
        "--error-json",
        action="store_true",
        help="on failure, print a machine-readable {error, message} JSON object",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt_default):
        _add_param_flags(p)
        p.add_argument("--tol", type=float, default=_DEFAULT_TOL,
                       help="integration tolerance, absolute and relative (default: 1e-10)")
        p.add_argument("--out", type=Path, required=True, help="output file path")
        p.add_argument("--format", choices=("csv", "json"), default=fmt_default,
                       help=f"output format (default: {fmt_default})")

    p = sub.add_parser("simulate", help="integrate the equation of motion, emit a trajectory CSV")
    common(p, "csv")
    p.add_argument("--tau0", type=float, default=0.0, help="start time, dimensionless (default: 0)")
    p.add_argument("--tau-max", type=float, required=True, help="end time, dimensionless")
    p.add_argument("--samples", type=int, default=_DEFAULT_SAMPLES,
                   help="number of equally spaced output samples (default: 1024)")
    p.add_argument("--theta0", type=float, default=None,
                   help="initial angle, rad (default: stable rotation branch arcsin(beta/mu))")
    p.add_argument("--theta-dot0", type=float, default=-1.0,
                   help="initial angular velocity, per dimensionless time (default: -1)")
    p.add_argument("--plot", action="store_true", help="also render <out>.png")

    p = sub.add_parser("exact", help="closed-form rotation branches of the circular zero-gravity case")
    common(p, "json")
    p.add_argument("--k-min", type=int, default=0, help="smallest branch index k (default: 0)")
    p.add_argument("--k-max", type=int, default=0, help="largest branch index k (default: 0)")

    p = sub.add_parser("multiscale", help="expansion solution (order 1 or 2)")
    common(p, "json")
    p.add_argument("--order", type=int, choices=(1, 2), default=2,
                   help="expansion order (default: 2)")
    p.add_argument("--samples", type=int, default=_DEFAULT_SAMPLES,
                   help="samples per period for CSV output (default: 1024)")

    p = sub.add_parser("average", help="averaged stationary state and reconstructed solution")
    common(p, "json")
    p.add_argument("--order", type=int, choices=(1, 2), default=2,
                   help="averaging order for the stationary state (default: 2)")
    p.add_argument("--samples", type=int, default=_DEFAULT_SAMPLES,
                   help="samples per period for --solution-csv (default: 1024)")
    p.add_argument("--solution-csv", type=Path, default=None,
                   help="also write the reconstructed solution sampled over one period")
    p.add_argument("--small-threshold", type=float, default=1.0,
                   help="beta counts as small below this multiple of sqrt(eps), "
                        "dimensionless (default: 1.0)")
    p.add_argument("--small-mu-threshold", type=float, default=0.2,
                   help="mu counts as small below this value, dimensionless (default: 0.2)")

    p = sub.add_parser("compare", help="deviation of asymptotic solutions from the numeric orbit")
    common(p, "json")
    p.add_argument("--methods", type=str, default="multiscale1,multiscale2",
                   help="comma-separated: multiscale1, multiscale2, averaging2 "
                        "(default: multiscale1,multiscale2)")
    p.add_argument("--samples", type=int, default=_DEFAULT_SAMPLES,
                   help="samples over one period (default: 1024)")
    p.add_argument("--plot", action="store_true", help="also render <out>.png")

    p = sub.add_parser("sweep", help="deviation versus damping over a beta grid")
    common(p, "csv")
    p.add_argument("--beta-grid", type=str, required=True, metavar="LO:HI:COUNT",
                   help="damping grid, linear spacing (dimensionless)")
    p.add_argument("--log-grid", action="store_true", help="use logarithmic grid spacing")
    p.add_argument("--methods", type=str, default="multiscale2,averaging2",
                   help="comma-separated methods (default: multiscale2,averaging2)")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes for sweep points (default: 1)")
    p.add_argument("--plot", action="store_true", help="also render <out>.png")
    return parser


def _config_from_args(args) -> RunConfig:
    d = _resolve_params(args)
    options: dict = {}
    if args.command == "simulate":
        options = {
            "tau0": args.tau0,
            "tau_max": args.tau_max,
            "samples": args.samples,
            "theta0": args.theta0,
            "theta_dot0": args.theta_dot0,
            "plot": args.plot,
        }
    elif args.command == "exact":
        options = {"k_min": args.k_min, "k_max": args.k_max}
    elif args.command == "multiscale":
        options = {"order": args.order, "samples": args.samples}
    elif args.command == "average":
        options = {
            "order": args.order,
            "samples": args.samples,
            "solution_csv": args.solution_csv,
            "small_threshold": args.small_threshold,
            "small_mu_threshold": args.small_mu_threshold,
        }
    elif args.command == "compare":
        options = {
            "methods": _parse_methods(args.methods),
            "samples": args.samples,
            "plot": args.plot,
        }
    elif args.command == "sweep":
        options = {
            "beta_grid": args.beta_grid,
            "log_grid": args.log_grid,
            "grid": _parse_grid(args.beta_grid, args.log_grid),
            "methods": _parse_methods(args.methods),
            "jobs": args.jobs,
            "plot": args.plot,
        }
    return RunConfig(args.command, d, args.out, getattr(args, "format", "json"), args.tol, options)


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
    except (_UsageError, InvalidParameterError) as exc:
        if args.error_json:
            print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        else:
            print(f"ellipend: error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(config)
    except EllipendError as exc:
        if args.error_json:
            print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        else:
            print(f"ellipend: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
