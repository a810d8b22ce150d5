"""Vanishing-regularization experiment for the weight (eps + r^2)^alpha (1 + r^2)^a.

Holding the total mass rho fixed while eps -> 0, the solution develops a
unit bubble at the origin carrying local mass exactly 8 pi (4 in beta
units) while the remainder stays spread at scale O(1).  The limit object
solves the singular equation with an explicit -4 log r spike; writing
xi = -4 log r + eta turns it into a regular problem for eta with the
shifted weight r^(2(alpha-2)) (1 + r^2)^a and total mass (rho - 8 pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import EmptyWindow, InvalidParams, NoBracket, NotConverged
from .radial_shooting import (
    IntegrationControl,
    RadialSolution,
    WeightSpec,
    beta,
    integrate_cauchy,
    mass_of,
)

_SCAN_POINTS = 32
_BETA_TOL = 1e-8
_PROFILE_POINTS = 400

RADIAL_MECHANISM_NOTE = (
    "radial mechanism only: fixed-total-mass radial solutions of the "
    "regularized weight; non-radial faces of the collapse are out of reach"
)


@dataclass(frozen=True)
class CollapseRecord:
    eps: float
    a_candidates: tuple[float, ...]  # every root found in the scan window
    a_found: float                   # continued branch (nan when none found)
    beta_check: float
    plateau: float       # local mass at r = eps^(1/4), beta units
    plateau_alt: float   # same at r = eps^(1/3) (probe-exponent sensitivity)
    r_probe: float
    profile_t: np.ndarray
    profile_mass: np.ndarray

    @property
    def found(self) -> bool:
        return math.isfinite(self.a_found)


@dataclass
class CollapseRun:
    alpha: float
    rho: float
    a_pow: float
    eps_schedule: tuple[float, ...]
    records: list[CollapseRecord]


@dataclass
class CollapseReport:
    run: CollapseRun
    limit_profile: Optional[RadialSolution] = None
    note: str = RADIAL_MECHANISM_NOTE

    def plateau_series(self) -> list[tuple[float, float]]:
        return [(r.eps, r.plateau) for r in self.run.records if r.found]

    def rows(self) -> list[dict]:
        return [
            {
                "eps": r.eps,
                "a_found": r.a_found,
                "beta_check": r.beta_check,
                "plateau": r.plateau,
                "plateau_alt": r.plateau_alt,
                "r_probe": r.r_probe,
            }
            for r in self.run.records
        ]


def a_pow_from_rho(rho: float, alpha: float) -> float:
    """Exponent of the spread factor forced by the total mass."""
    if rho <= 0.0:
        raise InvalidParams("total mass rho must be positive")
    return rho / (4.0 * math.pi) - (alpha + 2.0)


def admissible_rho_window(alpha: float, beta_bar: float) -> tuple[float, float]:
    """Total-mass window where the collapse mechanism is available.

    Lower end: the spread branch exists (rho > 4 pi (alpha+1)); upper end:
    below both the radial minimum 2 pi beta_bar and the two-bubble level
    16 pi.
    """
    if not 1.0 < alpha < 3.0:
        raise InvalidParams("collapse regime needs 1 < alpha < 3")
    lo = 4.0 * math.pi * (alpha + 1.0)
    hi = min(2.0 * math.pi * beta_bar, 16.0 * math.pi)
    if lo >= hi:
        raise EmptyWindow(f"no admissible rho: lower {lo:.6g} >= upper {hi:.6g}")
    return (lo, hi)


def _beta_or_nan(weight: WeightSpec, a: float, ctrl: IntegrationControl) -> float:
    try:
        return beta(weight, a, ctrl).beta
    except NotConverged:
        return math.nan


def _mass_roots(weight: WeightSpec, target: float, a_lo: float, a_hi: float,
                ctrl: IntegrationControl, n: int = _SCAN_POINTS) -> list[float]:
    """Roots of beta(a) = target inside [a_lo, a_hi]: coarse scan + bisection."""
    grid = np.linspace(a_lo, a_hi, n)
    vals = np.array([_beta_or_nan(weight, float(a), ctrl) - target for a in grid])
    roots: list[float] = []
    for i in range(n - 1):
        g0, g1 = vals[i], vals[i + 1]
        if math.isnan(g0) or math.isnan(g1) or g0 * g1 > 0.0:
            continue
        if g0 == 0.0:
            roots.append(float(grid[i]))
            continue
        lo, hi, glo = float(grid[i]), float(grid[i + 1]), g0
        gm = math.inf
        while abs(gm) > _BETA_TOL and hi - lo > 1e-14:
            mid = 0.5 * (lo + hi)
            gm = _beta_or_nan(weight, mid, ctrl) - target
            if math.isnan(gm):
                break
            if glo * gm <= 0.0:
                hi = mid
            else:
                lo, glo = mid, gm
        if math.isfinite(gm):
            roots.append(0.5 * (lo + hi))
    return sorted(roots)


def _downsample(sol: RadialSolution) -> tuple[np.ndarray, np.ndarray]:
    idx = np.unique(np.linspace(0, len(sol.grid) - 1, _PROFILE_POINTS).astype(int))
    return sol.grid[idx].copy(), sol.mass[idx].copy()


def run_collapse(alpha: float, rho: float, eps_schedule: Sequence[float],
                 ctrl: IntegrationControl = IntegrationControl()) -> CollapseReport:
    """Follow the fixed-mass branch down the eps schedule and record plateaus.

    Per eps the central value solving 2 pi beta = rho is found by a coarse
    scan plus bisection; all roots are recorded, and the branch nearest the
    previous step (largest root at the first step — the concentrating
    branch) defines the run.  A step with no root is recorded as a miss and
    the run continues.
    """
    eps_list = [float(e) for e in eps_schedule]
    if not eps_list or any(e <= 0.0 for e in eps_list):
        raise InvalidParams("eps schedule must be positive")
    if any(e1 >= e0 for e0, e1 in zip(eps_list, eps_list[1:])):
        raise InvalidParams("eps schedule must be strictly decreasing")
    a_pow = a_pow_from_rho(rho, alpha)
    if not -1.0 < a_pow < 0.0:
        raise InvalidParams(
            f"rho={rho:.6g} puts the spread exponent at {a_pow:.4g}, outside (-1, 0)"
        )
    beta_target = rho / (2.0 * math.pi)

    records: list[CollapseRecord] = []
    a_prev: Optional[float] = None
    eps_prev: Optional[float] = None
    for eps in eps_list:
        weight = WeightSpec(eps=eps, p=alpha, q=a_pow)
        if a_prev is None:
            windows = [(-30.0, 60.0)]
        else:
            # the concentrating branch drifts like (alpha+1) log(1/eps)
            drift = (alpha + 1.0) * (math.log(eps_prev) - math.log(eps))
            center = a_prev + drift
            windows = [(center - 8.0, center + 8.0),
                       (center - 16.0, center + 16.0),
                       (center - 30.0, center + 30.0)]
        roots: list[float] = []
        for lo, hi in windows:
            roots = _mass_roots(weight, beta_target, lo, hi, ctrl)
            if roots:
                break
        if not roots:
            records.append(CollapseRecord(
                eps=eps, a_candidates=(), a_found=math.nan,
                beta_check=math.nan, plateau=math.nan, plateau_alt=math.nan,
                r_probe=eps ** 0.25,
                profile_t=np.empty(0), profile_mass=np.empty(0)))
            eps_prev = eps  # keep the predictor moving along the schedule
            continue
        if a_prev is None:
            a_found = roots[-1]
        else:
            center = a_prev + (alpha + 1.0) * (math.log(eps_prev) - math.log(eps))
            a_found = min(roots, key=lambda r: abs(r - center))
        sol = integrate_cauchy(weight, a_found, ctrl)
        check = mass_of(sol, ctrl)
        t_probe = 0.25 * math.log(eps)
        t_alt = math.log(eps) / 3.0
        profile_t, profile_mass = _downsample(sol)
        records.append(CollapseRecord(
            eps=eps,
            a_candidates=tuple(roots),
            a_found=a_found,
            beta_check=check.beta,
            plateau=float(sol.mass_at(t_probe)),
            plateau_alt=float(sol.mass_at(t_alt)),
            r_probe=eps ** 0.25,
            profile_t=profile_t,
            profile_mass=profile_mass,
        ))
        a_prev, eps_prev = a_found, eps

    run = CollapseRun(alpha=alpha, rho=rho, a_pow=a_pow,
                      eps_schedule=tuple(eps_list), records=records)
    return CollapseReport(run=run)


def limit_profile(alpha: float, rho: float,
                  ctrl: IntegrationControl = IntegrationControl()) -> RadialSolution:
    """Regular part eta of the singular limit xi = -4 log r + eta.

    Solves the shifted-weight problem for the central value whose total
    mass matches the spread remainder (rho - 8 pi)/(2 pi).
    """
    if rho <= 8.0 * math.pi:
        raise InvalidParams("limit profile needs rho > 8 pi")
    a_pow = a_pow_from_rho(rho, alpha)
    weight = WeightSpec(eps=0.0, p=alpha - 2.0, q=a_pow)
    target = (rho - 8.0 * math.pi) / (2.0 * math.pi)
    roots = _mass_roots(weight, target, -30.0, 30.0, ctrl)
    if not roots:
        raise NoBracket(
            f"no central value attains the shifted mass {target:.6g} in [-30, 30]"
        )
    return integrate_cauchy(weight, roots[-1], ctrl)


def limit_xi_at(profile: RadialSolution, r: float) -> float:
    """Value of the recombined singular limit xi at radius r."""
    t = math.log(r)
    return -4.0 * t + float(profile.v_at(t))
