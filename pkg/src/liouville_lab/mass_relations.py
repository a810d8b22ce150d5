"""Closed-form mass relations: local-mass algebra, quantization, bubbles.

Unit conventions used across the package (the literature mixes 2 pi and
8 pi normalizations; everything here is explicit):

  * rho units: integrals of K e^u over the plane or surface;
  * beta units: the same divided by 2 pi (radial mass function);
  * local masses sigma_u, m_v: rho-units divided by 2 pi as well.

Conversions live here and nowhere else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from scipy.integrate import quad

from .errors import InvalidInputs, InvalidParams

TWO_PI = 2.0 * math.pi
EIGHT_PI = 8.0 * math.pi


def rho_to_beta(rho: float) -> float:
    return rho / TWO_PI


def beta_to_rho(beta: float) -> float:
    return beta * TWO_PI


@dataclass(frozen=True)
class MassPair:
    """Local masses of one blow-up point at the two scales."""

    sigma_u: float
    m_v: float

    def validate(self) -> None:
        if not self.sigma_u >= self.m_v >= 0.0:
            raise InvalidParams(f"need sigma_u >= m_v >= 0, got {self}")

    def balance_residual(self, alpha1: float, alpha2: float) -> float:
        """Defect of the dilation (Pohozaev) identity for this pair."""
        lhs = self.sigma_u**2 - self.m_v**2
        rhs = 4.0 * (1.0 + alpha1 + alpha2) * (self.sigma_u - self.m_v)
        return abs(lhs - rhs)


def pohozaev_sigma(m_v: float, alpha1: float, alpha2: float) -> tuple[float, float]:
    """Both solutions of the dilation identity, given the inner mass.

    The quadratic sigma^2 - m^2 = 4(1+a1+a2)(sigma - m) factors: either
    sigma = m (no extra concentration) or sigma + m = 4(1+a1+a2).
    """
    if m_v < 0.0:
        raise InvalidParams("inner mass must be non-negative")
    other = 4.0 * (1.0 + alpha1 + alpha2) - m_v
    lo, hi = sorted((float(m_v), float(other)))
    return (lo, hi)


def concentration_threshold(alpha1: float, alpha2: float) -> float:
    """Inner mass at which the two sigma branches coincide."""
    return 2.0 * (1.0 + alpha1 + alpha2)


def admissible_masses(alpha1: int, alpha2: int) -> list[tuple[int, float]]:
    """The quantized local-mass ladder (m, 4m), m = 1..min(alpha1, alpha2)."""
    if alpha1 != int(alpha1) or alpha2 != int(alpha2):
        raise InvalidParams("vortex strengths must be integers")
    if alpha1 < 1 or alpha2 < 1:
        raise InvalidParams("vortex strengths must be at least 1")
    if abs(alpha1 - alpha2) > 1:
        raise InvalidParams("strengths must differ by at most 1")
    return [(m, 4.0 * m) for m in range(1, int(min(alpha1, alpha2)) + 1)]


def quantized_mass_check(total: float, alphas: Sequence[float] = (),
                         tol: float = 1e-8) -> bool:
    """True when the total mass sits on the 8 pi N ladder.

    ``alphas`` is accepted for the caller's bookkeeping (the ladder value
    typically arises as 4 pi (sum alphas + theta/2)) but the check itself
    concerns only the total.
    """
    if total <= 0.0:
        raise InvalidParams("total mass must be positive")
    steps = total / EIGHT_PI
    nearest = round(steps)
    return nearest >= 1 and abs(steps - nearest) <= tol


def necessary_range_contains(rho: float, alpha: float) -> bool:
    """Membership in the solvable-mass union (0, 8pi(1-a^-)) U (8pi(1+a^+), inf).

    Boundaries are excluded.
    """
    if alpha <= -1.0 or alpha == 0.0:
        raise InvalidParams("range is stated for alpha > -1, alpha != 0")
    a_minus = max(0.0, -alpha)
    a_plus = max(0.0, alpha)
    lo_band = 8.0 * math.pi * (1.0 - a_minus)
    hi_band = 8.0 * math.pi * (1.0 + a_plus)
    return (0.0 < rho < lo_band) or (rho > hi_band)


# ---------------------------------------------------------------------------
# standard bubble
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BubbleSpec:
    """Peak height lam, curvature constant C > 0, center q."""

    lam: float
    C: float
    q: tuple[float, float] = (0.0, 0.0)

    def validate(self) -> None:
        if self.C <= 0.0:
            raise InvalidParams("bubble constant C must be positive")


def bubble_value(spec: BubbleSpec, y: Sequence[float]) -> float:
    """log of e^lam / (1 + C e^lam |y-q|^2)^2 at the point y."""
    spec.validate()
    dy0 = y[0] - spec.q[0]
    dy1 = y[1] - spec.q[1]
    r2 = dy0 * dy0 + dy1 * dy1
    return spec.lam - 2.0 * math.log1p(spec.C * math.exp(spec.lam) * r2)


def bubble_normalization(spec: BubbleSpec) -> float:
    """Numerical value of 8C * integral of e^I over the plane.

    Radial adaptive quadrature after centering; the closed form is 8 pi
    for every (lam, C), which the quadrature is expected to reproduce.
    """
    spec.validate()
    amp = math.exp(spec.lam)

    def integrand(r: float) -> float:
        return amp / (1.0 + spec.C * amp * r * r) ** 2 * r

    # split at the bubble scale so the adaptive rule sees the shoulder
    r_core = 1.0 / math.sqrt(spec.C * amp)
    inner, _ = quad(integrand, 0.0, 10.0 * r_core, limit=200)
    outer, _ = quad(integrand, 10.0 * r_core, math.inf, limit=200)
    return 8.0 * spec.C * TWO_PI * (inner + outer)


# ---------------------------------------------------------------------------
# height prediction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeightInputs:
    """Everything the height formula consumes, as plain numbers.

    The Green-function regular part and the limit-solution values are
    supplied by the caller: computing them for a general surface is out
    of scope, and synthetic inputs keep the evaluator testable.
    """

    rho: float
    m: int
    alpha1: int
    alpha2: int
    mass_integral: float
    C_ti: tuple[float, ...]
    pairwise_dist: tuple[tuple[float, ...], ...]
    green_regular: tuple[tuple[float, ...], ...]
    w_at_points: tuple[float, ...]
    t: float

    def validate(self) -> None:
        n = self.m
        if self.rho <= EIGHT_PI * self.m:
            raise InvalidInputs(f"need rho > 8 pi m = {EIGHT_PI * self.m:.6g}")
        if self.t <= 0.0:
            raise InvalidInputs("collapse parameter t must be positive")
        if self.mass_integral <= 0.0:
            raise InvalidInputs("mass integral must be positive")
        if len(self.C_ti) != n or len(self.w_at_points) != n:
            raise InvalidInputs(f"per-point arrays must have length m = {n}")
        if any(c <= 0.0 for c in self.C_ti):
            raise InvalidInputs("bubble constants must be positive")
        if len(self.pairwise_dist) != n or len(self.green_regular) != n:
            raise InvalidInputs(f"matrices must be {n} x {n}")
        for i in range(n):
            if len(self.pairwise_dist[i]) != n or len(self.green_regular[i]) != n:
                raise InvalidInputs(f"matrices must be {n} x {n}")
            for j in range(n):
                if i != j:
                    if self.pairwise_dist[i][j] <= 0.0:
                        raise InvalidInputs("off-diagonal distances must be positive")
                    gap = abs(self.pairwise_dist[i][j] - self.pairwise_dist[j][i])
                    if gap > 1e-12 * max(1.0, self.pairwise_dist[i][j]):
                        raise InvalidInputs("distance matrix must be symmetric")

    def as_dict(self) -> dict:
        return {
            "rho": self.rho,
            "m": self.m,
            "alpha1": self.alpha1,
            "alpha2": self.alpha2,
            "mass_integral": self.mass_integral,
            "C_ti": list(self.C_ti),
            "pairwise_dist": [list(row) for row in self.pairwise_dist],
            "green_regular": [list(row) for row in self.green_regular],
            "w_at_points": list(self.w_at_points),
            "t": self.t,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HeightInputs":
        known = {
            "rho", "m", "alpha1", "alpha2", "mass_integral", "C_ti",
            "pairwise_dist", "green_regular", "w_at_points", "t",
        }
        unknown = set(data) - known
        if unknown:
            raise InvalidInputs(f"unknown height-input keys: {sorted(unknown)}")
        missing = known - set(data)
        if missing:
            raise InvalidInputs(f"missing height-input keys: {sorted(missing)}")
        return cls(
            rho=float(data["rho"]),
            m=int(data["m"]),
            alpha1=int(data["alpha1"]),
            alpha2=int(data["alpha2"]),
            mass_integral=float(data["mass_integral"]),
            C_ti=tuple(float(c) for c in data["C_ti"]),
            pairwise_dist=tuple(tuple(float(x) for x in row)
                                for row in data["pairwise_dist"]),
            green_regular=tuple(tuple(float(x) for x in row)
                                for row in data["green_regular"]),
            w_at_points=tuple(float(w) for w in data["w_at_points"]),
            t=float(data["t"]),
        )


def predict_height(inputs: HeightInputs, i: int) -> float:
    """Leading-order peak height of bubble i at collapse parameter t.

    The log t coefficient -(2 + 2 a1 + 2 a2 - 4m) carries the whole
    t-dependence; the remaining terms are t-independent geometry data.
    """
    inputs.validate()
    if not 0 <= i < inputs.m:
        raise InvalidInputs(f"point index {i} out of range for m = {inputs.m}")
    coeff = 2.0 + 2.0 * inputs.alpha1 + 2.0 * inputs.alpha2 - 4.0 * inputs.m
    value = -coeff * math.log(inputs.t)
    value += math.log(inputs.rho / (inputs.rho - EIGHT_PI * inputs.m)
                      * inputs.mass_integral)
    value -= 2.0 * math.log(inputs.C_ti[i])
    for j in range(inputs.m):
        if j != i:
            value += 4.0 * math.log(inputs.pairwise_dist[i][j])
    for j in range(inputs.m):
        value -= EIGHT_PI * inputs.green_regular[i][j]
    value -= inputs.w_at_points[i]
    return value
