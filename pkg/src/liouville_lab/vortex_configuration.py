"""Blow-up point configurations from the vortex balance equations.

The m points e_1..e_m in the plane (complex coordinates, poles fixed at
+1 and -1) satisfy

    alpha1/(e_l - 1) + alpha2/(e_l + 1) = 2 sum_{j != l} 1/(e_l - e_j).

Newton's identities turn this into a closed recurrence for the elementary
symmetric functions of the points, whence a degree-m polynomial whose
roots are the configuration.  Both routes are kept: the polynomial is the
primary solver, an independent damped Newton iteration on the balance
equations is the cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .errors import InvalidParams, NewtonDiverged, ResidualTooLarge

Scalar = Union[Fraction, float]

_RESIDUAL_TOL = 1e-8
_DISTINCT_TOL = 1e-12


@dataclass(frozen=True)
class VortexParams:
    alpha1: float
    alpha2: float
    m: int
    extrapolation: bool = False  # permit non-integer strengths (untested regime)

    def validate(self) -> None:
        if int(self.m) != self.m:
            raise InvalidParams("point count m must be an integer")
        if not self.extrapolation:
            for name, val in (("alpha1", self.alpha1), ("alpha2", self.alpha2)):
                if val != int(val):
                    raise InvalidParams(
                        f"{name}={val} is not an integer; pass extrapolation=True "
                        "to evaluate the recurrence outside its supported regime"
                    )
        if self.alpha1 <= 0 or self.alpha2 <= 0:
            raise InvalidParams("vortex strengths must be positive")
        if abs(self.alpha1 - self.alpha2) > 1:
            raise InvalidParams("strengths must differ by at most 1")
        if not 1 <= self.m <= min(self.alpha1, self.alpha2):
            raise InvalidParams(f"point count m={self.m} must lie in [1, min(alpha1, alpha2)]")
        if self.alpha1 + self.alpha2 - 2 * (self.m - 1) <= 0:
            raise InvalidParams("sum-formula denominator must be positive")

    @property
    def exact(self) -> bool:
        return (not self.extrapolation
                and self.alpha1 == int(self.alpha1)
                and self.alpha2 == int(self.alpha2))


@dataclass(frozen=True)
class BlowupConfiguration:
    params: VortexParams
    sym: tuple[Scalar, ...]          # elementary symmetric values, k = 0..m
    poly: tuple[float, ...]          # coefficients, degree m first
    points: tuple[complex, ...]      # sorted by (real, imag)
    residual: float

    def as_dict(self) -> dict:
        return {
            "params": {
                "alpha1": self.params.alpha1,
                "alpha2": self.params.alpha2,
                "m": self.params.m,
            },
            "sym": [float(s) for s in self.sym],
            "poly": list(self.poly),
            "points": [[z.real, z.imag] for z in self.points],
            "residual": self.residual,
        }


def symmetric_functions(params: VortexParams) -> list[Scalar]:
    """Elementary symmetric values of the points, by the closed recurrence.

    Exact rational arithmetic for integer strengths; floats in the
    extrapolation regime.
    """
    params.validate()
    a1, a2, m = params.alpha1, params.alpha2, params.m
    if params.exact:
        a1, a2 = Fraction(int(a1)), Fraction(int(a2))
        one = Fraction(1)
    else:
        one = 1.0
    sym: list[Scalar] = [one, (a2 - a1) * m / (a1 + a2 - 2 * (m - 1))]
    for k in range(m - 1):
        num = ((m - k - 1) * (m - k) * sym[k]
               - (a1 - a2) * (m - k - 1) * sym[k + 1])
        den = (2 + k) * (a1 + a2 - 2 * m + k + 3)
        sym.append(num / den)
    return sym[: m + 1]


def characteristic_polynomial(sym: Sequence[Scalar], params: VortexParams) -> list[float]:
    """Coefficients (degree-m term first) of M * prod(z - e_l).

    The leading factor M = m (alpha1 + alpha2 - (m-1)) is the
    normalization under which the balance conditions close into one
    polynomial; Vieta supplies the rest from the symmetric values.
    """
    m = params.m
    if len(sym) != m + 1:
        raise InvalidParams(f"need {m + 1} symmetric values, got {len(sym)}")
    lead = params.m * (params.alpha1 + params.alpha2 - (params.m - 1))
    return [float(lead) * (-1.0) ** k * float(sym[k]) for k in range(m + 1)]


def _balance_residual(points: np.ndarray, params: VortexParams) -> np.ndarray:
    """Left-minus-right of the balance equation at every point."""
    a1, a2 = params.alpha1, params.alpha2
    res = a1 / (points - 1.0) + a2 / (points + 1.0)
    for l in range(len(points)):
        for j in range(len(points)):
            if j != l:
                res[l] -= 2.0 / (points[l] - points[j])
    return res


def _sort_points(points: Sequence[complex]) -> tuple[complex, ...]:
    # 1e-12 granularity so coordinate noise cannot scramble the order
    return tuple(sorted((complex(z) for z in points),
                        key=lambda z: (round(z.real, 12), round(z.imag, 12))))


def _aberth(coeffs: Sequence[float], max_iter: int = 200) -> np.ndarray:
    """Simultaneous root iteration; deterministic circular start."""
    c = np.asarray(coeffs, dtype=complex)
    m = len(c) - 1
    radius = 1.0 + max(abs(x) for x in c[1:]) / abs(c[0])
    z = radius * np.exp(2j * math.pi * (np.arange(m) + 0.25) / m)
    poly = np.polynomial.Polynomial(c[::-1])
    dpoly = poly.deriv()
    for _ in range(max_iter):
        ratio = poly(z) / dpoly(z)
        offc = np.array([np.sum(1.0 / (z[i] - np.delete(z, i))) for i in range(m)])
        step = ratio / (1.0 - ratio * offc)
        z = z - step
        if np.max(np.abs(step)) < 1e-14:
            break
    return z


def find_points(params: VortexParams) -> BlowupConfiguration:
    """Solve for the configuration via the characteristic polynomial.

    Companion-matrix eigenvalues first; if their balance residual misses
    the tolerance, an Aberth pass retries.  Coinciding points or points on
    the poles +-1 are rejected: the configuration must keep everything
    distinct.
    """
    params.validate()
    sym = symmetric_functions(params)
    coeffs = characteristic_polynomial(sym, params)
    roots = np.roots(coeffs)
    residual = float(np.max(np.abs(_balance_residual(roots, params))))
    if residual > _RESIDUAL_TOL:
        roots = _aberth(coeffs)
        residual = float(np.max(np.abs(_balance_residual(roots, params))))
    if residual > _RESIDUAL_TOL:
        raise ResidualTooLarge(
            f"balance residual {residual:.3e} exceeds {_RESIDUAL_TOL:.0e} "
            f"for params {params}"
        )
    scale = max(1.0, float(np.max(np.abs(roots))))
    for i in range(len(roots)):
        if min(abs(roots[i] - 1.0), abs(roots[i] + 1.0)) < _DISTINCT_TOL * scale:
            raise ResidualTooLarge("a configuration point collided with a pole")
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) < _DISTINCT_TOL * scale:
                raise ResidualTooLarge("configuration points failed to stay distinct")
    return BlowupConfiguration(
        params=params,
        sym=tuple(sym),
        poly=tuple(coeffs),
        points=_sort_points(roots),
        residual=residual,
    )


def _balance_jacobian(points: np.ndarray, params: VortexParams) -> np.ndarray:
    a1, a2 = params.alpha1, params.alpha2
    m = len(points)
    jac = np.zeros((m, m), dtype=complex)
    for l in range(m):
        jac[l, l] = -a1 / (points[l] - 1.0) ** 2 - a2 / (points[l] + 1.0) ** 2
        for j in range(m):
            if j != l:
                d = (points[l] - points[j]) ** 2
                jac[l, l] += 2.0 / d
                jac[l, j] = -2.0 / d
    return jac


def newton_oracle(params: VortexParams, start: Sequence[complex],
                  max_iter: int = 80, tol: float = 1e-12) -> list[complex]:
    """Independent damped Newton solve of the balance equations.

    The equations are holomorphic in the points, so the complex Jacobian
    solve is equivalent to Newton on the 2m real components.  Backtracking
    halves the step until the residual norm drops.  Raises NewtonDiverged
    when the iteration stalls, meets a singular Jacobian, runs against a
    pole, or escapes the configuration region (the balance terms vanish at
    infinity, so unbounded iterates would fake convergence).
    """
    params.validate()
    z = np.asarray([complex(s) for s in start], dtype=complex)
    if len(z) != params.m:
        raise InvalidParams(f"need {params.m} start points, got {len(z)}")
    for i in range(len(z)):
        if min(abs(z[i] - 1.0), abs(z[i] + 1.0)) < 1e-9:
            raise InvalidParams("start points must avoid the poles +-1")
        for j in range(i + 1, len(z)):
            if abs(z[i] - z[j]) < 1e-9:
                raise InvalidParams("start points must be pairwise distinct")

    fval = _balance_residual(z, params)
    fnorm = float(np.max(np.abs(fval)))
    for _ in range(max_iter):
        if float(np.max(np.abs(z))) > 100.0:
            raise NewtonDiverged("iterates escaped the configuration region")
        if fnorm <= tol:
            return list(_sort_points(z))
        jac = _balance_jacobian(z, params)
        try:
            step = np.linalg.solve(jac, fval)
        except np.linalg.LinAlgError as exc:
            raise NewtonDiverged(f"singular Jacobian at {z}") from exc
        lam = 1.0
        while lam > 1e-6:
            trial = z - lam * step
            if (np.min(np.abs(trial - 1.0)) < 1e-12
                    or np.min(np.abs(trial + 1.0)) < 1e-12):
                lam *= 0.5
                continue
            trial_val = _balance_residual(trial, params)
            trial_norm = float(np.max(np.abs(trial_val)))
            if trial_norm < fnorm * (1.0 - 1e-4 * lam):
                z, fval, fnorm = trial, trial_val, trial_norm
                break
            lam *= 0.5
        else:
            raise NewtonDiverged(f"backtracking stalled at residual {fnorm:.3e}")
    if fnorm <= tol:
        return list(_sort_points(z))
    raise NewtonDiverged(f"no convergence after {max_iter} iterations "
                         f"(residual {fnorm:.3e})")
