"""Command-line front door: one subcommand per library operation.

Every run writes fixed-name CSV/JSON files into an output directory and
prints the list of written paths.  Outputs are byte-stable for identical
inputs: floats are formatted with 17 significant digits, files end with
'\\n' line endings, and the seed that feeds any randomized check is part
of the run configuration.

Exit codes: 0 success, 1 validation error (bad parameter values, bad
config keys), 2 numerical or IO failure, 64 usage error.  Every mapped
failure also prints a one-line JSON record on stderr.

A ``--config FILE`` option reads a flat ``key=value`` file whose keys
mirror the long flags of the subcommand; command-line flags override the
file.  ``LIOUVILLE_LAB_OUT`` in the environment overrides the output
directory from both.

Masses appear in two interchangeable scales: the radial commands natively
report the boundary integral ``beta`` while the disk commands natively
report the area integral ``rho = 2*pi*beta``.  The ``--units`` flag
converts every mass-scale output column at emission time; inputs are
always read in the units their flag names imply.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .collapse_experiment import (
    a_pow_from_rho,
    admissible_rho_window,
    limit_profile,
    run_collapse,
)
from .disk_solver import (
    ContinuationControl,
    DiskGrid,
    DiskProblem,
    blowup_points,
    bubble_cap_init,
    continuation_in_t,
    enclosed_mass,
    mass_balance,
    pohozaev_residual,
    save_solution,
    solve,
)
from .errors import InvalidInputs, NumericalError, ValidationError
from .mass_curve import classify, find_min, sweep
from .mass_relations import HeightInputs, admissible_masses, predict_height
from .radial_shooting import IntegrationControl, WeightSpec, beta, integrate_cauchy
from .reporting import fmt_float, write_csv, write_json
from .vortex_configuration import VortexParams, find_points, newton_oracle

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2  # shared by IO failures: both mean "inputs were legal"
EXIT_USAGE = 64

_TWO_PI = 2.0 * math.pi

_CANONICAL_EPS = "1e-2,1e-4,1e-6,1e-8,1e-10,1e-12"
_CANONICAL_SCHEDULE = "0.2,0.1,0.05,0.025"


class _UsageError(Exception):
    """Argv did not parse; carries the parser whose grammar was violated."""

    def __init__(self, parser: argparse.ArgumentParser, message: str):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - argparse hook
        raise _UsageError(self, message)


# ---------------------------------------------------------------------------
# small parsers and converters


def _mass_literal(text: str) -> float:
    """Float literal with an optional 'pi' suffix: '12.6pi' -> 12.6*pi."""
    raw = text.strip().lower()
    if raw.endswith("pi"):
        head = raw[:-2].strip()
        return (float(head) if head else 1.0) * math.pi
    return float(raw)


def _float_list(text: str) -> list[float]:
    items = [tok.strip() for tok in text.split(",")]
    if not any(items):
        raise ValueError("empty list")
    return [float(tok) for tok in items if tok]


def _mass_out(value: Optional[float], native: str, units: str) -> Optional[float]:
    """Convert one mass-scale number from its native units at emission."""
    if value is None:
        return None
    value = float(value)
    if units == native:
        return value
    return value * _TWO_PI if native == "beta" else value / _TWO_PI


def _mass_array(values: np.ndarray, native: str, units: str) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if units == native:
        return values
    return values * _TWO_PI if native == "beta" else values / _TWO_PI


def _alpha_tag(alpha: float) -> str:
    return fmt_float(float(alpha)).replace("-", "m").replace(".", "p").replace("+", "")


def _set_distance(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Symmetric Hausdorff distance between two finite point sets."""
    one = max(min(abs(x - y) for y in b) for x in a)
    two = max(min(abs(x - y) for y in a) for x in b)
    return max(one, two)


# ---------------------------------------------------------------------------
# run configuration: output directory, config file, summaries


def _out_dir(args: argparse.Namespace) -> Path:
    env = os.environ.get("LIOUVILLE_LAB_OUT")
    out = Path(env) if env else Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _read_config(path: Path) -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            raise InvalidInputs(f"{path}:{lineno}: expected key=value, got {raw!r}")
        if key in entries:
            raise InvalidInputs(f"{path}:{lineno}: duplicate key {key!r}")
        entries[key] = value.strip()
    return entries


def _config_tokens(sub: argparse.ArgumentParser, path: Path) -> list[str]:
    """Turn a flat key=value file into argv tokens for re-parsing.

    Keys must name long options of the subcommand; unknown keys are a
    validation error, not a usage error, so that a stale config file is
    distinguishable from a mistyped command line.
    """
    actions: dict[str, argparse.Action] = {}
    for action in sub._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                actions[opt[2:].replace("-", "_")] = action
    tokens: list[str] = []
    for key, value in _read_config(path).items():
        if key in ("config", "help"):
            raise InvalidInputs(f"{path}: key {key!r} is not allowed in a config file")
        if key not in actions:
            raise InvalidInputs(f"{path}: unknown config key {key!r}")
        flag = "--" + key.replace("_", "-")
        if isinstance(actions[key], argparse._StoreTrueAction):
            lowered = value.lower()
            if lowered in ("true", "1", "yes"):
                tokens.append(flag)
            elif lowered not in ("false", "0", "no"):
                raise InvalidInputs(f"{path}: {key} must be a boolean, got {value!r}")
        else:
            tokens.extend([flag, value])
    return tokens


def _summary(args: argparse.Namespace, **fields) -> dict:
    head = {"command": args.command, "seed": args.seed}
    head.update(fields)
    return head


def _weight_from_args(args: argparse.Namespace) -> WeightSpec:
    explicit = [args.eps, args.p, args.q, args.power, args.scale]
    if args.alpha is not None:
        if any(v is not None for v in explicit):
            raise InvalidInputs(
                "give either --alpha or explicit weight parameters, not both")
        return WeightSpec(eps=1.0, p=float(args.alpha), q=0.0)
    if args.p is None:
        raise InvalidInputs("need --alpha or at least --p to define the weight")
    return WeightSpec(
        eps=1.0 if args.eps is None else args.eps,
        p=args.p,
        q=0.0 if args.q is None else args.q,
        power=0.0 if args.power is None else args.power,
        scale=1.0 if args.scale is None else args.scale,
    )


# ---------------------------------------------------------------------------
# subcommand handlers; each returns the list of files it wrote


def _cmd_shoot(args: argparse.Namespace) -> list[Path]:
    out = _out_dir(args)
    weight = _weight_from_args(args)
    sol = integrate_cauchy(weight, args.a)
    u = args.units
    rows = [
        {
            "t": t,
            "r": math.exp(t),
            "v": v,
            "slope": s,
            "mass": _mass_out(m, "beta", u),
        }
        for t, v, s, m in zip(sol.grid, sol.v, sol.slope, sol.mass)
    ]
    paths = [write_csv(out / "shoot_trace.csv", rows)]
    summary = _summary(
        args,
        units=u,
        weight={"eps": weight.eps, "p": weight.p, "q": weight.q,
                "power": weight.power, "scale": weight.scale},
        a=args.a,
        converged=sol.converged,
        t_end=sol.t_end,
        mass=_mass_out(sol.beta_estimate, "beta", u),
        tail=_mass_out(sol.tail_estimate, "beta", u),
        slope_end=float(sol.slope[-1]),
    )
    paths.append(write_json(out / "shoot_summary.json", summary))
    if args.plot:
        from . import figures

        paths.append(figures.plot_trace(sol, out / "shoot.png"))
    return paths


def _cmd_beta(args: argparse.Namespace) -> list[Path]:
    out = _out_dir(args)
    weight = _weight_from_args(args)
    result = beta(weight, args.a)
    u = args.units
    summary = _summary(
        args,
        units=u,
        weight={"eps": weight.eps, "p": weight.p, "q": weight.q,
                "power": weight.power, "scale": weight.scale},
        a=args.a,
        mass=_mass_out(result.beta, "beta", u),
        tail=_mass_out(result.tail, "beta", u),
        converged=result.converged,
        r_cut=result.r_cut,
    )
    return [write_json(out / "beta.json", summary)]


def _cmd_mass_curve(args: argparse.Namespace) -> list[Path]:
    out = _out_dir(args)
    u = args.units
    alphas = sorted(set(args.alpha))
    paths: list[Path] = []
    entries = []
    curves = []
    for alpha in alphas:
        curve = sweep(alpha, a_lo=args.a_lo, a_hi=args.a_hi, n=args.n,
                      jobs=args.jobs)
        curves.append(curve)
        rows = [
            {
                "a": s.a,
                "mass": _mass_out(s.beta, "beta", u),
                "converged": s.converged,
                "tail": _mass_out(s.tail, "beta", u),
            }
            for s in curve.samples
        ]
        name = f"mass_curve_alpha{_alpha_tag(alpha)}.csv"
        paths.append(write_csv(out / name, rows))
        entries.append({
            "alpha": alpha,
            "csv": name,
            "a_star": curve.a_star,
            "min_mass": _mass_out(curve.beta_bar, "beta", u),
            "samples": len(curve.samples),
            "converged": sum(1 for s in curve.samples if s.converged),
        })
    summary = _summary(args, units=u, a_lo=args.a_lo, a_hi=args.a_hi,
                       n=args.n, jobs=args.jobs, curves=entries)
    paths.append(write_json(out / "mass_curve_summary.json", summary))
    if args.plot:
        from . import figures

        paths.append(figures.plot_mass_curves(curves, out / "mass_curve.png"))
    return paths


def _cmd_rho_bar(args: argparse.Namespace) -> list[Path]:
    out = _out_dir(args)
    curve = sweep(args.alpha, a_lo=args.a_lo, a_hi=args.a_hi, n=args.n,
                  jobs=args.jobs)
    a_star, beta_bar = find_min(curve)
    try:
        window = admissible_rho_window(args.alpha, beta_bar)
    except ValidationError as exc:
        window, window_note = None, str(exc)
    else:
        window_note = None
    summary = _summary(
        args,
        alpha=args.alpha,
        a_star=a_star,
        beta_bar=beta_bar,
        rho_bar=_TWO_PI * beta_bar,
        window=list(window) if window else None,
        window_note=window_note,
    )
    return [write_json(out / "rho_bar.json", summary)]


def _cmd_classify(args: argparse.Namespace) -> list[Path]:
    out = _out_dir(args)
    report = classify(args.alpha, n=args.n, jobs=args.jobs)
    u = args.units
    lo, hi = report.solvable_beta_interval
    summary = _summary(
        args,
        units=u,
        alpha=report.alpha,
        regime=report.regime,
        interval_lo=_mass_out(lo, "beta", u),
        interval_hi=_mass_out(hi, "beta", u),
        lower_attained=report.lower_attained,
        sweep_n=report.sweep_n,
        multiplicity=[
            {
                "mass_lo": _mass_out(mlo, "beta", u),
                "mass_hi": _mass_out(mhi, "beta", u),
                "count": count,
            }
            for mlo, mhi, count in report.multiplicity_map
        ],
    )
    return [write_json(out / "classify.json", summary)]


def _cmd_collapse(args: argparse.Namespace) -> list[Path]:
    out = _out_dir(args)
    report = run_collapse(args.alpha, args.rho, args.eps)
    u = args.units
    rows = [
        {
            "eps": r.eps,
            "a_found": r.a_found,
            "mass_check": _mass_out(r.beta_check, "beta", u),
            "plateau": _mass_out(r.plateau, "beta", u),
            "plateau_alt": _mass_out(r.plateau_alt, "beta", u),
            "r_probe": r.r_probe,
        }
        for r in report.run.records
    ]
    paths = [write_csv(out / "collapse_steps.csv", rows)]
    found = [r for r in report.run.records if r.found]
    summary = _summary(
        args,
        units=u,
        alpha=args.alpha,
        rho=args.rho,
        a_pow=report.run.a_pow,
        steps=len(report.run.records),
        found=len(found),
        final_plateau=_mass_out(found[-1].plateau, "beta", u) if found else None,
        note=report.note,
    )
    paths.append(write_json(out / "collapse_summary.json", summary))
    if args.plot:
        from . import figures

        paths.append(figures.plot_collapse(report, out / "collapse.png"))
    return paths


def _cmd_limit_profile(args: argparse.Namespace) -> list[Path]:
    out = _out_dir(args)
    profile = limit_profile(args.alpha, args.rho)
    u = args.units
    rows = [
        {
            "t": t,
            "r": math.exp(t),
            "eta": v,
            "slope": s,
            "mass": _mass_out(m, "beta", u),
        }
        for t, v, s, m in zip(profile.grid, profile.v, profile.slope, profile.mass)
    ]
    paths = [write_csv(out / "limit_profile.csv", rows)]
    summary = _summary(
        args,
        units=u,
        alpha=args.alpha,
        rho=args.rho,
        a_pow=a_pow_from_rho(args.rho, args.alpha),
        a=profile.a,
        converged=profile.converged,
        mass=_mass_out(profile.beta_estimate, "beta", u),
    )
    paths.append(write_json(out / "limit_profile_summary.json", summary))
    if args.plot:
        from . import figures

        paths.append(figures.plot_limit_profile(profile, out / "limit_profile.png"))
    return paths


def _cmd_blowup_points(args: argparse.Namespace) -> list[Path]:
    out = _out_dir(args)
    params = VortexParams(alpha1=args.alpha1, alpha2=args.alpha2, m=args.m,
                          extrapolation=args.extrapolation)
    config = find_points(params)
    summary = _summary(args, **config.as_dict())
    if args.check_oracle:
        rng = np.random.default_rng(args.seed)
        distances: list[float] = []
        attempts = 0
        # random starts may legitimately diverge (poles, escape); keep
        # drawing until the requested number of converged runs is in hand
        while len(distances) < args.check_oracle and attempts < 50 * args.check_oracle:
            attempts += 1
            start = rng.standard_normal(params.m) + 1j * rng.standard_normal(params.m)
            try:
                pts = newton_oracle(params, list(start))
            except (ValidationError, NumericalError):
                continue
            distances.append(_set_distance(pts, config.points))
        summary["oracle"] = {
            "requested": args.check_oracle,
            "converged_runs": len(distances),
            "attempts": attempts,
            "max_set_distance": max(distances) if distances else None,
        }
    return [write_json(out / "blowup_points.json", summary)]


def _cmd_masses(args: argparse.Namespace) -> list[Path]:
    out = _out_dir(args)
    pairs = admissible_masses(args.alpha1, args.alpha2)
    u = args.units
    summary = _summary(
        args,
        units=u,
        alpha1=args.alpha1,
        alpha2=args.alpha2,
        pairs=[{"m": m, "mass": _mass_out(total, "beta", u)} for m, total in pairs],
    )
    return [write_json(out / "masses.json", summary)]


def _cmd_height(args: argparse.Namespace) -> list[Path]:
    out = _out_dir(args)
    data = json.loads(Path(args.inputs).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise InvalidInputs("height inputs file must hold a JSON object")
    inputs = HeightInputs.from_dict(data)
    if args.i is not None:
        indices = [args.i]
    else:
        indices = list(range(inputs.m))
    heights = [predict_height(inputs, i) for i in indices]
    summary = _summary(
        args,
        inputs=inputs.as_dict(),
        indices=indices,
        heights=heights,
    )
    return [write_json(out / "height.json", summary)]


def _cmd_disk_solve(args: argparse.Namespace) -> list[Path]:
    out = _out_dir(args)
    grid = DiskGrid.for_vortex(args.t_vortex, ht_target=args.ht,
                               n_theta=args.n_theta)
    problem = DiskProblem(grid=grid, alpha1=args.alpha1, alpha2=args.alpha2,
                          t_vortex=args.t_vortex, boundary=args.boundary_c)
    sol = solve(problem, bubble_cap_init(problem, args.boundary_c))
    u = args.units
    mass, flux = mass_balance(sol)
    local = enclosed_mass(sol, args.poho_radius)
    poho = pohozaev_residual(sol, args.poho_radius)
    points = None
    if args.t_vortex > 0.0:
        points = [[v, y1, y2] for v, y1, y2 in blowup_points(sol)]
    bin_path, meta_path = save_solution(sol, out / "disk_solution")
    summary = _summary(
        args,
        units=u,
        alpha1=args.alpha1,
        alpha2=args.alpha2,
        t_vortex=args.t_vortex,
        boundary_c=args.boundary_c,
        n_r=grid.n_r,
        n_theta=grid.n_theta,
        t_min=grid.t_min,
        converged=sol.converged,
        newton_iters=sol.newton_iters,
        residual_norm=sol.residual_norm,
        pole_value=sol.pole_value,
        lambda_extract=sol.lambda_extract,
        mass=_mass_out(mass, "rho", u),
        flux=_mass_out(flux, "rho", u),
        cap_mass=_mass_out(sol.cap_mass, "rho", u),
        local_mass=_mass_out(local, "rho", u),
        poho_radius=args.poho_radius,
        poho_residual=_mass_out(poho, "rho", u),
        points=points,
    )
    paths = [bin_path, meta_path, write_json(out / "disk_summary.json", summary)]
    if args.plot:
        from . import figures

        paths.append(figures.plot_disk(sol, out / "disk.png"))
    return paths


def _cmd_scaling(args: argparse.Namespace) -> list[Path]:
    out = _out_dir(args)
    schedule = args.schedule
    ctrl = ContinuationControl(ht_target=args.ht, n_theta=args.n_theta,
                               target_deficit=args.deficit)
    grid = DiskGrid.for_vortex(schedule[0], ht_target=args.ht,
                               n_theta=args.n_theta)
    base = DiskProblem(grid=grid, alpha1=args.alpha, alpha2=args.alpha,
                       t_vortex=schedule[0], boundary=args.boundary_c)
    report = continuation_in_t(base, schedule, ctrl)
    u = args.units
    rows = []
    for row in report.rows():
        for key in ("mass", "flux", "local_mass", "poho_residual"):
            row[key] = _mass_out(row[key], "rho", u)
        rows.append(row)
    paths = [write_csv(out / "scaling_report.csv", rows)]
    summary = _summary(
        args,
        units=u,
        label=report.label,
        alpha1=report.alpha1,
        alpha2=report.alpha2,
        boundary_c=report.boundary_c,
        target_deficit=report.target_deficit,
        schedule=schedule,
        steps=len(report.steps),
        total_variation=report.total_variation(),
    )
    paths.append(write_json(out / "scaling_summary.json", summary))
    if args.plot:
        from . import figures

        paths.append(figures.plot_scaling(report, out / "scaling.png"))
    return paths


_HANDLERS = {
    "shoot": _cmd_shoot,
    "beta": _cmd_beta,
    "mass-curve": _cmd_mass_curve,
    "rho-bar": _cmd_rho_bar,
    "classify": _cmd_classify,
    "collapse": _cmd_collapse,
    "limit-profile": _cmd_limit_profile,
    "blowup-points": _cmd_blowup_points,
    "masses": _cmd_masses,
    "height": _cmd_height,
    "disk-solve": _cmd_disk_solve,
    "scaling": _cmd_scaling,
}


# ---------------------------------------------------------------------------
# parser construction


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None,
                   help="output directory (default: current directory; "
                        "LIOUVILLE_LAB_OUT overrides)")
    p.add_argument("--config", default=None,
                   help="flat key=value file mirroring the flags; "
                        "flags override the file")
    p.add_argument("--seed", type=int, default=0,
                   help="seed recorded in summaries and feeding randomized checks")


def _add_units(p: argparse.ArgumentParser, native: str) -> None:
    p.add_argument("--units", choices=("beta", "rho"), default=native,
                   help=f"units for mass-scale outputs (native: {native}; "
                        "rho = 2*pi*beta)")


def _add_weight_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=None,
                   help="cone strength: shorthand for the weight (1+r^2)^alpha "
                        "with eps=1")
    p.add_argument("--eps", type=float, default=None,
                   help="weight regularization (explicit mode, default 1)")
    p.add_argument("--p", type=float, default=None,
                   help="(eps+r^2) exponent (explicit mode)")
    p.add_argument("--q", type=float, default=None,
                   help="(1+r^2) exponent (explicit mode, default 0)")
    p.add_argument("--power", type=float, default=None,
                   help="pure r exponent (explicit mode, default 0)")
    p.add_argument("--scale", type=float, default=None,
                   help="weight prefactor (explicit mode, default 1)")


def _build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = _Parser(
        prog="liouville-lab",
        description="Numerical experiments for singular mean-field equations: "
                    "radial shooting, mass curves, collapse and blow-up probes.",
    )
    subs = parser.add_subparsers(dest="command", required=True,
                                 parser_class=_Parser)
    by_name: dict[str, argparse.ArgumentParser] = {}

    def sub(name: str, help_text: str) -> argparse.ArgumentParser:
        p = subs.add_parser(name, help=help_text, description=help_text)
        _add_run_options(p)
        by_name[name] = p
        return p

    p = sub("shoot", "integrate one radial Cauchy problem and dump its trace")
    _add_weight_options(p)
    p.add_argument("--a", type=float, required=True, help="central value v(0)")
    p.add_argument("--plot", action="store_true", help="also render a PNG")
    _add_units(p, "beta")

    p = sub("beta", "total mass of one radial solution")
    _add_weight_options(p)
    p.add_argument("--a", type=float, required=True, help="central value v(0)")
    _add_units(p, "beta")

    p = sub("mass-curve", "sample mass-vs-central-value curves")
    p.add_argument("--alpha", type=_float_list, required=True,
                   help="cone strengths, comma-separated (e.g. 1.5,2,3)")
    p.add_argument("--a-lo", type=float, default=-30.0, help="window start")
    p.add_argument("--a-hi", type=float, default=30.0, help="window end")
    p.add_argument("--n", type=int, default=200, help="samples per curve")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel workers; output order is unaffected")
    p.add_argument("--plot", action="store_true", help="also render a PNG")
    _add_units(p, "beta")

    p = sub("rho-bar", "minimal mass of the curve and the admissible window")
    p.add_argument("--alpha", type=float, required=True, help="cone strength")
    p.add_argument("--a-lo", type=float, default=-30.0, help="window start")
    p.add_argument("--a-hi", type=float, default=30.0, help="window end")
    p.add_argument("--n", type=int, default=200, help="samples in the sweep")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel workers; output order is unaffected")

    p = sub("classify", "solvable mass interval and multiplicity counts")
    p.add_argument("--alpha", type=float, required=True, help="cone strength")
    p.add_argument("--n", type=int, default=200, help="samples in the sweep")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel workers; output order is unaffected")
    _add_units(p, "beta")

    p = sub("collapse", "follow the fixed-mass branch down an eps schedule")
    p.add_argument("--alpha", type=float, default=2.0, help="cone strength")
    p.add_argument("--rho", type=_mass_literal, default=_mass_literal("12.6pi"),
                   help="total mass, rho units; accepts a 'pi' suffix "
                        "(default 12.6pi)")
    p.add_argument("--eps", type=_float_list, default=_float_list(_CANONICAL_EPS),
                   help=f"decreasing schedule (default {_CANONICAL_EPS})")
    p.add_argument("--plot", action="store_true", help="also render a PNG")
    _add_units(p, "beta")

    p = sub("limit-profile", "regular part of the singular limit at fixed mass")
    p.add_argument("--alpha", type=float, default=2.0, help="cone strength")
    p.add_argument("--rho", type=_mass_literal, default=_mass_literal("12.6pi"),
                   help="total mass, rho units; accepts a 'pi' suffix "
                        "(default 12.6pi)")
    p.add_argument("--plot", action="store_true", help="also render a PNG")
    _add_units(p, "beta")

    p = sub("blowup-points", "solve the blow-up configuration equations")
    p.add_argument("--alpha1", type=int, required=True, help="vortex strength at +1")
    p.add_argument("--alpha2", type=int, required=True, help="vortex strength at -1")
    p.add_argument("--m", type=int, required=True, help="number of points")
    p.add_argument("--extrapolation", action="store_true",
                   help="allow configurations outside the proven mass list")
    p.add_argument("--check-oracle", type=int, default=0, metavar="N",
                   help="cross-check against N random-start Newton solves")

    p = sub("masses", "admissible blow-up mass list for a vortex pair")
    p.add_argument("--alpha1", type=int, required=True, help="vortex strength at +1")
    p.add_argument("--alpha2", type=int, required=True, help="vortex strength at -1")
    _add_units(p, "beta")

    p = sub("height", "evaluate the bubbling-height formula on a JSON input file")
    p.add_argument("--inputs", required=True,
                   help="JSON file of height inputs (see masses/height docs)")
    p.add_argument("--i", type=int, default=None,
                   help="single point index (default: all points)")

    p = sub("disk-solve", "solve the vortex-pair problem on the unit disk")
    p.add_argument("--t-vortex", type=float, required=True,
                   help="vortex half-separation in [0, 1)")
    p.add_argument("--alpha1", type=int, default=1, help="vortex strength at +t")
    p.add_argument("--alpha2", type=int, default=1, help="vortex strength at -t")
    p.add_argument("--boundary-c", type=float, default=-1.0,
                   help="constant boundary value")
    p.add_argument("--ht", type=float, default=0.045, help="radial step target")
    p.add_argument("--n-theta", type=int, default=96, help="angular resolution")
    p.add_argument("--poho-radius", type=float, default=0.5,
                   help="radius for the local mass and identity check")
    p.add_argument("--plot", action="store_true", help="also render a PNG")
    _add_units(p, "rho")

    p = sub("scaling", "continuation in the vortex separation (EXPLORATORY)")
    p.add_argument("--alpha", type=int, default=1,
                   help="strength of both vortices (symmetric pair)")
    p.add_argument("--schedule", type=_float_list,
                   default=_float_list(_CANONICAL_SCHEDULE),
                   help=f"decreasing separations (default {_CANONICAL_SCHEDULE})")
    p.add_argument("--deficit", type=float, default=1.0,
                   help="anchor: total mass minus 8*pi*m at the first step")
    p.add_argument("--boundary-c", type=float, default=None,
                   help="fix the boundary constant instead of anchoring")
    p.add_argument("--ht", type=float, default=0.03, help="radial step target")
    p.add_argument("--n-theta", type=int, default=96, help="angular resolution")
    p.add_argument("--plot", action="store_true", help="also render a PNG")
    _add_units(p, "rho")

    return parser, by_name


# ---------------------------------------------------------------------------
# dispatch


def _record(command: Optional[str], exc: BaseException, code: int) -> None:
    line = json.dumps({
        "command": command,
        "error": type(exc).__name__.lstrip("_"),
        "exit": code,
        "message": str(exc),
    })
    print(line, file=sys.stderr)


def _extract_config(argv: Sequence[str]) -> Optional[str]:
    """Find --config before parsing: required flags may live in the file."""
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def dispatch(argv: Sequence[str]) -> int:
    """Run one subcommand; returns the process exit code."""
    argv = list(argv)
    parser, by_name = _build_parser()
    command = argv[0] if argv and not argv[0].startswith("-") else None
    try:
        config = _extract_config(argv)
        if config is not None and command in by_name:
            tokens = _config_tokens(by_name[command], Path(config))
            args = parser.parse_args([command] + tokens + argv[1:])
        else:
            args = parser.parse_args(argv)
        paths = _HANDLERS[args.command](args)
        print("wrote " + " ".join(str(p) for p in paths))
        return EXIT_OK
    except _UsageError as exc:
        print(exc.parser.format_help().rstrip(), file=sys.stderr)
        _record(command, exc, EXIT_USAGE)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse --help
        return exc.code if isinstance(exc.code, int) else 0
    except (ValidationError, ValueError) as exc:
        _record(command, exc, EXIT_VALIDATION)
        return EXIT_VALIDATION
    except (NumericalError, OSError) as exc:
        _record(command, exc, EXIT_NUMERICAL)
        return EXIT_NUMERICAL


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
