"""Sweep and analyze the total-mass curve a -> beta(a).

For the weight (1+r^2)^alpha the curve interpolates between 4(alpha+1)
at a -> -infinity and 4 max{alpha, 1} at a -> +infinity.  For alpha <= 1
it is monotone; past alpha = 1 an interior minimum appears and mass
targets slightly above the minimum are attained twice.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

from .errors import NoInteriorMin, NoSolution, NotConverged
from .radial_shooting import IntegrationControl, WeightSpec, beta, linearized

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_A_TOL = 1e-6     # abscissa resolution of the minimizer
_BETA_TOL = 1e-8  # mass resolution of root solves


@dataclass(frozen=True)
class CurveSample:
    a: float
    beta: float
    converged: bool
    tail: float


@dataclass
class MassCurve:
    alpha: float
    samples: list[CurveSample]
    a_star: Optional[float] = None
    beta_bar: Optional[float] = None

    def rows(self) -> list[dict]:
        return [
            {"a": s.a, "beta": s.beta, "converged": s.converged, "tail": s.tail}
            for s in self.samples
        ]


@dataclass
class SolvabilityReport:
    alpha: float
    regime: str  # "sub-unit" (-1 < alpha <= 1) or "super-unit" (alpha > 1)
    solvable_beta_interval: tuple[float, float]
    lower_attained: bool
    multiplicity_map: list[tuple[float, float, int]]
    sweep_n: int

    def rows(self) -> list[dict]:
        return [
            {"beta_lo": lo, "beta_hi": hi, "count": c}
            for lo, hi, c in self.multiplicity_map
        ]


def _weight_for(alpha: float) -> WeightSpec:
    return WeightSpec(eps=1.0, p=alpha, q=0.0)


def _sample_one(args: tuple[float, float, IntegrationControl]) -> CurveSample:
    alpha, a, ctrl = args
    try:
        res = beta(_weight_for(alpha), a, ctrl)
        return CurveSample(a=a, beta=res.beta, converged=res.converged, tail=res.tail)
    except NotConverged:
        return CurveSample(a=a, beta=math.nan, converged=False, tail=math.nan)


def sweep(alpha: float, a_lo: float = -30.0, a_hi: float = 30.0, n: int = 200,
          ctrl: IntegrationControl = IntegrationControl(),
          jobs: int = 1) -> MassCurve:
    """Sample beta over an abscissa window and locate the interior minimum.

    Non-converged samples are flagged rather than fatal.  With jobs > 1 the
    samples are computed in a process pool (they are independent); ordering
    is by a regardless.
    """
    if n < 2:
        raise ValueError("need at least two samples")
    if not a_lo < a_hi:
        raise ValueError("empty sweep window")
    abscissas = [a_lo + (a_hi - a_lo) * i / (n - 1) for i in range(n)]
    work = [(alpha, a, ctrl) for a in abscissas]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            samples = list(pool.map(_sample_one, work, chunksize=8))
    else:
        samples = [_sample_one(w) for w in work]
    curve = MassCurve(alpha=alpha, samples=samples)
    try:
        curve.a_star, curve.beta_bar = find_min(curve, ctrl)
    except NoInteriorMin:
        pass
    return curve


def find_min(curve: MassCurve, ctrl: IntegrationControl = IntegrationControl()
             ) -> tuple[float, float]:
    """Golden-section refinement of the sampled interior minimum.

    Raises NoInteriorMin when no interior sample sits strictly below both
    endpoint values (the monotone regime alpha <= 1, and the flat alpha = 0
    curve).
    """
    good = [s for s in curve.samples if s.converged]
    if len(good) < 3:
        raise NoInteriorMin("too few converged samples to bracket a minimum")
    k = min(range(len(good)), key=lambda i: good[i].beta)
    if k == 0 or k == len(good) - 1:
        raise NoInteriorMin("sampled curve is monotone over the window")
    if good[k].beta > min(good[0].beta, good[-1].beta) - 1e-6:
        raise NoInteriorMin("no interior sample strictly below the endpoints")

    w = _weight_for(curve.alpha)

    def f(a: float) -> float:
        return beta(w, a, ctrl).beta

    lo, hi = good[k - 1].a, good[k + 1].a
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > _A_TOL:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = f(d)
    a_star = 0.5 * (lo + hi)
    beta_bar = f(a_star)
    slope = linearized(w, a_star, ctrl).beta_prime
    if abs(slope) > 1e-3:
        raise NotConverged(f"flat-point check failed at a*={a_star}: beta'={slope}")
    return a_star, beta_bar


def solve_for_mass(alpha: float, beta_target: float, curve: MassCurve,
                   ctrl: IntegrationControl = IntegrationControl()) -> list[float]:
    """All abscissas where the curve attains beta_target, one per bracket.

    Sign changes of beta - target between adjacent converged samples are
    refined by bisection until the mass matches to 1e-8.  Raises NoSolution
    when the target is outside the sampled image.
    """
    good = [s for s in curve.samples if s.converged]
    if len(good) < 2:
        raise NoSolution("curve has too few converged samples")
    w = _weight_for(alpha)

    def f(a: float) -> float:
        return beta(w, a, ctrl).beta - beta_target

    roots: list[float] = []
    for s0, s1 in zip(good, good[1:]):
        g0, g1 = s0.beta - beta_target, s1.beta - beta_target
        if g0 == 0.0:
            roots.append(s0.a)
            continue
        if g0 * g1 >= 0.0:
            continue
        lo, hi, glo = s0.a, s1.a, g0
        gm = math.inf
        while abs(gm) > _BETA_TOL and hi - lo > 1e-14:
            mid = 0.5 * (lo + hi)
            gm = f(mid)
            if glo * gm <= 0.0:
                hi = mid
            else:
                lo, glo = mid, gm
        roots.append(0.5 * (lo + hi))
    if good[-1].beta == beta_target:
        roots.append(good[-1].a)
    if not roots:
        raise NoSolution(f"beta={beta_target} is outside the sampled image")
    return sorted(roots)


def classify(alpha: float, ctrl: IntegrationControl = IntegrationControl(),
             n: int = 200, jobs: int = 1) -> SolvabilityReport:
    """Solvable mass interval and multiplicity counts from a default sweep.

    Counts are sampling-based lower bounds ("at least"), never exact; the
    sweep density is recorded so they are reproducible.
    """
    if alpha <= -1.0:
        raise ValueError("weight requires alpha > -1")
    curve = sweep(alpha, n=n, ctrl=ctrl, jobs=jobs)
    good = [s for s in curve.samples if s.converged]
    betas = [s.beta for s in good]
    b_min, b_max = min(betas), max(betas)
    regime = "sub-unit" if alpha <= 1.0 else "super-unit"

    if b_max - b_min < 1e-3:  # flat curve (pure Liouville)
        return SolvabilityReport(
            alpha=alpha,
            regime=regime,
            solvable_beta_interval=(b_min, b_max),
            lower_attained=True,
            multiplicity_map=[(b_min, b_max, 1)],
            sweep_n=n,
        )

    lower_attained = curve.beta_bar is not None
    lo = curve.beta_bar if lower_attained else b_min
    interval = (float(lo), float(b_max))

    # probe a modest mass grid and merge adjacent equal counts into ranges
    probes = [lo + (b_max - lo) * (i + 0.5) / 12.0 for i in range(12)]
    counted: list[tuple[float, int]] = []
    for bt in probes:
        try:
            counted.append((bt, len(solve_for_mass(alpha, bt, curve, ctrl))))
        except NoSolution:
            counted.append((bt, 0))
    merged: list[tuple[float, float, int]] = []
    for bt, c in counted:
        if merged and merged[-1][2] == c:
            merged[-1] = (merged[-1][0], bt, c)
        else:
            merged.append((bt, bt, c))
    return SolvabilityReport(
        alpha=alpha,
        regime=regime,
        solvable_beta_interval=interval,
        lower_attained=lower_attained,
        multiplicity_map=merged,
        sweep_n=n,
    )
