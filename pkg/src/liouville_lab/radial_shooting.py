"""Radial shooting engine for weighted Liouville equations.

Integrates the radial Cauchy problem

    -(r v'(r))' = r K(r) e^{v(r)},    v(0) = a,  v'(0) = 0,

for a weight of the form ``K(r) = scale * r^power * (eps + r^2)^p * (1 + r^2)^q``
and computes the total mass

    beta(a) = int_0^inf r K(r) e^{v(r)} dr,

its derivative in ``a`` through the linearized equation, the inversion
(Kelvin) image of a solution, and zero-structure diagnostics of the
linearized solution.

All integrations run in the log-radial variable ``t = log r``, where the
equation becomes ``v_tt = -e^{2t} K(e^t) e^v`` and the slope
``s(r) = -r v'(r)`` coincides with the cumulative mass ``M(r)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import bisect

from .errors import DivergedStep, InvalidWeight, MissingZero, NotConverged

__all__ = [
    "WeightSpec",
    "IntegrationControl",
    "RadialSolution",
    "MassResult",
    "LinearizedSolution",
    "ZeroStructure",
    "integrate_cauchy",
    "mass_of",
    "beta",
    "kelvin",
    "linearized",
    "zero_structure",
    "ode_residual",
]

# Series initialization keeps e^a * K(r0) * r0^2 below exp(-_SERIES_MARGIN),
# so the two-term start carries a relative error ~1e-16.
_SERIES_MARGIN = math.log(1e8)
_CHUNK = 3.0  # log-radius span per solve_ivp call
_SAFETY = 1e-2  # stepper runs tighter than the advertised tolerances
_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(32)
# Nodes mapped to (0, 1) once; reused by every series initialization.
_Y01 = 0.5 * (_GAUSS_NODES + 1.0)
_W01 = 0.5 * _GAUSS_WEIGHTS


@dataclass(frozen=True)
class WeightSpec:
    """Radial weight ``K(r) = scale * r^power * (eps + r^2)^p * (1 + r^2)^q``.

    The public surface uses ``eps``, ``p``, ``q`` only.  ``power`` and
    ``scale`` default to the identity factors; they exist so that the
    class is closed under the Kelvin inversion, whose image weight picks
    up a pure power of r and, for eps > 0, a positive prefactor.
    """

    eps: float
    p: float
    q: float
    power: float = 0.0
    scale: float = 1.0

    def validate(self) -> None:
        if not all(math.isfinite(x) for x in (self.eps, self.p, self.q, self.power, self.scale)):
            raise InvalidWeight("weight parameters must be finite")
        if self.eps < 0:
            raise InvalidWeight(f"eps must be non-negative, got {self.eps}")
        if self.scale <= 0:
            raise InvalidWeight(f"scale must be positive, got {self.scale}")
        if self.origin_exponent() <= -2.0:
            raise InvalidWeight(
                "weight is not integrable at the origin: "
                f"r exponent {self.origin_exponent()} <= -2"
            )

    def origin_exponent(self) -> float:
        """Exponent c with K(r) ~ const * r^c as r -> 0."""
        if self.eps == 0.0:
            return self.power + 2.0 * self.p
        return self.power

    def infinity_exponent(self) -> float:
        """Exponent d with K(r) ~ scale * r^d as r -> +inf."""
        return self.power + 2.0 * (self.p + self.q)

    def smooth_at_zero(self) -> float:
        """Value of K(r) / r^origin_exponent at r = 0."""
        if self.eps == 0.0:
            return self.scale
        return self.scale * self.eps**self.p

    def smooth_part(self, r: np.ndarray) -> np.ndarray:
        """K(r) / r^origin_exponent, a smooth positive function near 0."""
        r = np.asarray(r, dtype=float)
        out = self.scale * (1.0 + r * r) ** self.q
        if self.eps > 0.0:
            out = out * (self.eps + r * r) ** self.p
        return out

    def log_value_t(self, t: float) -> float:
        """log K(e^t), evaluated stably for very negative t."""
        r2 = math.exp(2.0 * t)
        out = math.log(self.scale) + self.origin_exponent() * t + self.q * math.log1p(r2)
        if self.eps > 0.0:
            out += self.p * math.log(self.eps + r2)
        return out

    def value(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return r**self.origin_exponent() * self.smooth_part(r)

    def kelvin_image(self, beta_value: float) -> "WeightSpec":
        """Weight of the inverted solution, ``r^(beta-4) * K(1/r)``."""
        new_power = beta_value - 4.0 - self.power - 2.0 * (self.p + self.q)
        if self.eps == 0.0:
            return WeightSpec(eps=0.0, p=0.0, q=self.q, power=new_power + 2.0 * self.p,
                              scale=self.scale)
        return WeightSpec(
            eps=1.0 / self.eps,
            p=self.p,
            q=self.q,
            power=new_power,
            scale=self.scale * self.eps**self.p,
        )


@dataclass(frozen=True)
class IntegrationControl:
    """Step-error tolerances and truncation policy for the shooting runs."""

    t_start: float = math.log(1e-6)
    # Generous cap: masses just above the decay threshold (e.g. alpha near 1
    # at large a) approach their limit slowly and need the long runway.
    t_max: float = 150.0
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    slope_margin: float = 0.5
    tail_rel_tol: float = 1e-8

    def validate(self) -> None:
        if not self.t_start < self.t_max:
            raise InvalidWeight(f"t_start {self.t_start} must be below t_max {self.t_max}")
        if self.abs_tol <= 0 or self.rel_tol <= 0 or self.tail_rel_tol <= 0:
            raise InvalidWeight("tolerances must be positive")
        if self.slope_margin <= 0:
            raise InvalidWeight("slope_margin must be positive")


class DenseTrace:
    """Piecewise dense evaluator assembled from chunked IVP solutions."""

    def __init__(self, segments: Sequence, t_lo: float, t_hi: float):
        self._segments = list(segments)
        self._ends = np.array([seg.t_max for seg in self._segments])
        self.t_lo = t_lo
        self.t_hi = t_hi

    def __call__(self, t) -> np.ndarray:
        """Evaluate the full state vector; shape (n_states,) or (n_states, n)."""
        scalar = np.isscalar(t)
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        if tt.min() < self.t_lo - 1e-9 or tt.max() > self.t_hi + 1e-9:
            raise ValueError(f"evaluation outside trace range [{self.t_lo}, {self.t_hi}]")
        tt = np.clip(tt, self.t_lo, self.t_hi)
        idx = np.searchsorted(self._ends, tt, side="left")
        idx = np.clip(idx, 0, len(self._segments) - 1)
        n_states = self._segments[0](self.t_lo).shape[0]
        out = np.empty((n_states, tt.size))
        for k in np.unique(idx):
            sel = idx == k
            out[:, sel] = np.atleast_2d(self._segments[k](tt[sel]).reshape(n_states, -1))
        return out[:, 0] if scalar else out


@dataclass
class RadialSolution:
    """Trace of one radial Cauchy solution on a log-radial grid.

    grid holds t_i = log r_i; ``slope`` is s(r_i) = -r v'(r_i) and ``mass``
    is the cumulative integral M(r_i); the two coincide up to integrator
    tolerance.  ``beta_estimate`` = M(end) + analytic tail is filled at
    integration time from the final state.
    """

    grid: np.ndarray
    v: np.ndarray
    slope: np.ndarray
    mass: np.ndarray
    weight: WeightSpec
    a: float
    converged: bool
    slope_threshold: float
    tail_estimate: float
    beta_estimate: float
    trace: DenseTrace

    @property
    def r(self) -> np.ndarray:
        return np.exp(self.grid)

    @property
    def t_end(self) -> float:
        return float(self.grid[-1])

    def v_at(self, t) -> np.ndarray:
        return self.trace(t)[0]

    def slope_at(self, t) -> np.ndarray:
        return -self.trace(t)[1]

    def mass_at(self, t) -> np.ndarray:
        return self.trace(t)[2]


@dataclass(frozen=True)
class MassResult:
    """Total mass with its truncation bookkeeping."""

    beta: float
    tail: float
    converged: bool
    r_cut: float


@dataclass
class LinearizedSolution:
    """Trace of the derivative of the solution family in its central value."""

    grid: np.ndarray
    phi: np.ndarray
    phi_prime: np.ndarray
    beta_prime: float
    phi_infty: float
    weight: WeightSpec
    a: float
    trace: DenseTrace

    def phi_at(self, t) -> np.ndarray:
        return self.trace(t)[3]

    def dphi_at(self, t) -> np.ndarray:
        """t-derivative of phi, i.e. r phi'(r)."""
        return self.trace(t)[4]


@dataclass
class ZeroStructure:
    """Zeros of phi and of phi', with the masses they enclose.

    Any field may be None when the corresponding feature does not exist
    on the computed trace (partial structure).
    """

    first_zero: Optional[float]
    last_zero: Optional[float]
    first_crit: Optional[float]
    last_crit: Optional[float]
    inner_mass: Optional[float]
    outer_mass: Optional[float]

    @property
    def complete(self) -> bool:
        return None not in (self.first_zero, self.last_zero, self.first_crit, self.last_crit)

    def require_complete(self) -> "ZeroStructure":
        if not self.complete:
            raise MissingZero("fewer zeros/critical points than a complete structure needs")
        return self


# ----------------------------------------------------------------------
# initialization and right-hand sides
# ----------------------------------------------------------------------

def _start_log_radius(weight: WeightSpec, a: float, ctrl: IntegrationControl) -> float:
    """Starting log-radius: the configured default, shrunk when eps or a demand it."""
    t0 = ctrl.t_start
    if weight.eps > 0.0:
        t0 = min(t0, math.log(1e-4) + 0.5 * math.log(weight.eps))
    c0 = weight.origin_exponent()
    h0 = weight.smooth_at_zero()
    # Keep the dimensionless series parameter e^a H(0) r0^(2+c0) tiny.
    t_series = (-a - math.log(h0) - _SERIES_MARGIN) / (2.0 + c0)
    return min(t0, t_series)


def _series_init(weight: WeightSpec, a: float, t0: float) -> tuple[float, float, float]:
    """Two-term start values (v0, w0, M0) at r0 = e^t0.

    Uses j(r) = int_0^r s K(s) ds and J(r) = int_0^r j(s)/s ds, evaluated
    by Gauss-Legendre quadrature after the substitution s = r y^(1/(2+c)),
    which removes the algebraic endpoint behavior exactly.
    """
    c0 = weight.origin_exponent()
    r0 = math.exp(t0)
    expo = 2.0 + c0
    s_vals = r0 * _Y01 ** (1.0 / expo)
    h_vals = weight.smooth_part(s_vals)
    h0 = weight.smooth_at_zero()
    # j(r0) = r0^expo / expo * int_0^1 H(r0 y^(1/expo)) dy
    j0 = r0**expo / expo * float(np.dot(_W01, h_vals))
    # J(r0) = r0^expo / expo^2 * int_0^1 H(...) * (-log y) dy; split off the
    # constant part of H so the log-singular factor integrates exactly to 1.
    log_part = float(np.dot(_W01, (h_vals - h0) * (-np.log(_Y01))))
    big_j0 = r0**expo / expo**2 * (h0 + log_part)
    ea = math.exp(a)
    return a - ea * big_j0, -ea * j0, ea * j0


def _make_rhs(weight: WeightSpec, with_linearized: bool) -> Callable:
    log_scale = math.log(weight.scale)
    c0 = weight.origin_exponent()
    q = weight.q
    p = weight.p
    eps = weight.eps

    def log_k(t: float) -> float:
        r2 = math.exp(2.0 * t)
        out = log_scale + c0 * t + q * math.log1p(r2)
        if eps > 0.0:
            out += p * math.log(eps + r2)
        return out

    if with_linearized:
        def rhs(t, y):
            expo = log_k(t) + 2.0 * t + y[0]
            g = math.exp(expo) if expo < 700.0 else math.inf
            return (y[1], -g, g, y[4], -g * y[3], g * y[3])
    else:
        def rhs(t, y):
            expo = log_k(t) + 2.0 * t + y[0]
            g = math.exp(expo) if expo < 700.0 else math.inf
            return (y[1], -g, g)
    return rhs


def _mass_flux(weight: WeightSpec, t: float, v: float) -> float:
    """r^2 K(r) e^v at t = log r: the local mass production rate."""
    expo = weight.log_value_t(t) + 2.0 * t + v
    return math.exp(expo) if expo < 700.0 else math.inf


def _tail_estimate(weight: WeightSpec, t: float, v: float, s: float) -> float:
    """Tail mass of the log-linear continuation v(r) - s log(r/r_cut).

    Integrating r K(r) e^v with that continuation past r_cut gives
    K(r_cut) e^{v} r_cut^2 / (s - 2 - d) with d the weight's power at
    infinity -- i.e. the local mass flux over the decay-rate margin.
    """
    margin = s - 2.0 - weight.infinity_exponent()
    if margin <= 0.0:
        return math.inf
    return _mass_flux(weight, t, v) / margin


def _integrate(weight: WeightSpec, a: float, ctrl: IntegrationControl,
               with_linearized: bool):
    weight.validate()
    ctrl.validate()
    if not math.isfinite(a) or abs(a) > 250.0:
        raise InvalidWeight(f"central value a={a} outside supported range")

    t0 = _start_log_radius(weight, a, ctrl)
    v0, w0, m0 = _series_init(weight, a, t0)
    if with_linearized:
        # Differentiating the start series in a: phi(r0) = 1 - e^a J(r0)
        # = 1 - (a - v0), and r phi'(r0), int r K e^v phi match w0, m0.
        y = np.array([v0, w0, m0, 1.0 - (a - v0), w0, m0])
    else:
        y = np.array([v0, w0, m0])

    rhs = _make_rhs(weight, with_linearized)
    threshold = 2.0 + weight.infinity_exponent() + ctrl.slope_margin

    segments = []
    ts_parts = []
    ys_parts = []
    t = t0
    converged = False
    while t < ctrl.t_max - 1e-12:
        t1 = min(t + _CHUNK, ctrl.t_max)
        # The ctrl tolerances bound the *returned* trace defect; drive the
        # stepper two orders tighter so per-step errors stay below them.
        sol = solve_ivp(rhs, (t, t1), y, method="DOP853",
                        rtol=_SAFETY * ctrl.rel_tol, atol=_SAFETY * ctrl.abs_tol,
                        dense_output=True)
        if sol.status == -1 or not np.all(np.isfinite(sol.y[:, -1])):
            raise DivergedStep(f"integration failed near t={sol.t[-1]:.3f}: {sol.message}")
        segments.append(sol.sol)
        ts_parts.append(sol.t if not ts_parts else sol.t[1:])
        ys_parts.append(sol.y if not ys_parts else sol.y[:, 1:])
        t = float(sol.t[-1])
        y = sol.y[:, -1]
        s = -float(y[1])
        if s > threshold:
            tail = _tail_estimate(weight, t, float(y[0]), s)
            if tail <= ctrl.tail_rel_tol * max(float(y[2]), 1e-300):
                converged = True
                break

    grid = np.concatenate(ts_parts)
    states = np.concatenate(ys_parts, axis=1)
    s_end = -float(y[1])
    tail = _tail_estimate(weight, t, float(y[0]), s_end) if s_end > threshold else math.inf
    beta_est = float(y[2]) + tail if math.isfinite(tail) else math.inf
    trace = DenseTrace(segments, t0, t)
    solution = RadialSolution(
        grid=grid,
        v=states[0].copy(),
        slope=-states[1].copy(),
        mass=states[2].copy(),
        weight=weight,
        a=a,
        converged=converged,
        slope_threshold=threshold,
        tail_estimate=tail,
        beta_estimate=beta_est,
        trace=trace,
    )
    return solution, states, trace


# ----------------------------------------------------------------------
# public operations
# ----------------------------------------------------------------------

def integrate_cauchy(weight: WeightSpec, a: float,
                     ctrl: IntegrationControl = IntegrationControl()) -> RadialSolution:
    """Integrate the radial Cauchy problem with central value ``a``.

    The run starts at a small radius with a two-term series start and
    stops once the slope exceeds the decay threshold and the estimated
    tail mass is below ``ctrl.tail_rel_tol`` times the accumulated mass,
    or at ``ctrl.t_max`` (then ``converged`` is False).
    """
    solution, _, _ = _integrate(weight, a, ctrl, with_linearized=False)
    return solution


def mass_of(sol: RadialSolution, ctrl: IntegrationControl = IntegrationControl()) -> MassResult:
    """Total mass of a computed solution, tail-corrected at its cut radius.

    The tail continuation needs a strictly positive decay margin
    s - 2(p+q+1) at the cut; without one there is no meaningful estimate
    and NotConverged is raised.  A run whose slope clears that floor but
    not the full margin (masses barely above the decay threshold, reached
    only logarithmically) still yields a corrected value, flagged
    converged=False when the tail misses ``tail_rel_tol``.
    """
    s_end = float(sol.slope[-1])
    decay_floor = 2.0 + sol.weight.infinity_exponent()
    if s_end <= decay_floor:
        raise NotConverged(
            f"slope {s_end:.6g} never cleared the decay floor {decay_floor:.6g} "
            f"by t={sol.t_end:.3g}"
        )
    tail = _tail_estimate(sol.weight, sol.t_end, float(sol.v[-1]), s_end)
    m_end = float(sol.mass[-1])
    if not math.isfinite(tail) or tail > m_end:
        raise NotConverged(
            f"tail estimate {tail:.3g} is no longer a small correction to "
            f"the accumulated mass {m_end:.6g}"
        )
    return MassResult(
        beta=m_end + tail,
        tail=tail,
        converged=bool(s_end > sol.slope_threshold and tail <= ctrl.tail_rel_tol * m_end),
        r_cut=float(math.exp(sol.t_end)),
    )


def beta(weight: WeightSpec, a: float,
         ctrl: IntegrationControl = IntegrationControl()) -> MassResult:
    """Total mass beta(a) for the given weight: integrate, then tail-correct."""
    return mass_of(integrate_cauchy(weight, a, ctrl), ctrl)


class _KelvinTrace:
    """Dense evaluator for the inverted solution, backed by the original."""

    def __init__(self, base: DenseTrace, beta_value: float):
        self._base = base
        self._beta = beta_value
        self.t_lo = -base.t_hi
        self.t_hi = -base.t_lo

    def __call__(self, t):
        scalar = np.isscalar(t)
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        states = np.atleast_2d(self._base(-tt).reshape(-1, tt.size))
        out = np.empty_like(states)
        out[0] = states[0] - self._beta * tt
        out[1] = -states[1] - self._beta
        out[2] = self._beta - states[2]
        if states.shape[0] > 3:
            out[3:] = states[3:]
        return out[:, 0] if scalar else out


def kelvin(sol: RadialSolution, beta_value: float) -> RadialSolution:
    """Inversion image ``v(1/r) + beta log(1/r)`` of a converged solution.

    The image solves the same kind of equation with the transformed weight
    ``r^(beta-4) K(1/r)`` and extends continuously to r = 0; its central
    value is estimated from the far field of the input.
    """
    if not sol.converged:
        raise NotConverged("kelvin requires a converged input solution")
    new_weight = sol.weight.kelvin_image(beta_value)
    t_hat = -sol.grid[::-1]
    v_hat = sol.v[::-1] - beta_value * t_hat
    slope_hat = beta_value - sol.slope[::-1]
    mass_hat = beta_value - sol.mass[::-1]
    a_hat = float(sol.v[-1] + beta_value * sol.grid[-1])
    trace = _KelvinTrace(sol.trace, beta_value)
    # The input's start region maps to the image's far field; the tail of
    # the image is the (tiny) mass sitting below the original start radius.
    tail_hat = float(sol.mass[0])
    return RadialSolution(
        grid=t_hat,
        v=v_hat,
        slope=slope_hat,
        mass=mass_hat,
        weight=new_weight,
        a=a_hat,
        converged=sol.converged,
        slope_threshold=2.0 + new_weight.infinity_exponent(),
        tail_estimate=tail_hat,
        beta_estimate=beta_value,
        trace=trace,
    )


def linearized(weight: WeightSpec, a: float,
               ctrl: IntegrationControl = IntegrationControl()) -> LinearizedSolution:
    """Integrate the linearized problem alongside v and return beta'(a).

    The linearized profile phi starts from phi(0)=1, phi'(0)=0 and the
    derivative of the mass is accumulated as int r K e^v phi dr, with phi
    frozen at its last value for the tail beyond the cut radius.
    """
    solution, states, trace = _integrate(weight, a, ctrl, with_linearized=True)
    if not solution.converged:
        raise NotConverged("linearized run did not reach its truncation criterion")
    phi = states[3].copy()
    psi = states[4].copy()  # t-derivative of phi = r phi'(r)
    b_end = float(states[5, -1])
    phi_end = float(phi[-1])
    beta_prime = b_end + phi_end * solution.tail_estimate
    # phi drifts like -beta'(a) log r in the far field (the t-derivative of
    # phi tends to -beta'); phi + beta' t is the convergent compensated part.
    phi_infty = phi_end + beta_prime * float(solution.grid[-1])
    return LinearizedSolution(
        grid=solution.grid,
        phi=phi,
        phi_prime=psi / np.exp(solution.grid),
        beta_prime=beta_prime,
        phi_infty=phi_infty,
        weight=weight,
        a=a,
        trace=trace,
    )


def _bisect_on(fn: Callable[[float], float], t_lo: float, t_hi: float) -> float:
    """Sign-change refinement to 1e-10 in t; ties resolve to the smaller radius."""
    return float(bisect(fn, t_lo, t_hi, xtol=1e-10))


def _scan_zeros(fn: Callable[[np.ndarray], np.ndarray], t_grid: np.ndarray) -> list[float]:
    vals = fn(t_grid)
    zeros: list[float] = []
    sign = np.sign(vals)
    for i in range(len(t_grid) - 1):
        if sign[i] == 0.0:
            zeros.append(float(t_grid[i]))
        elif sign[i] * sign[i + 1] < 0.0:
            zeros.append(_bisect_on(lambda t: float(fn(np.array([t]))[0]),
                                    float(t_grid[i]), float(t_grid[i + 1])))
    if sign[-1] == 0.0:
        zeros.append(float(t_grid[-1]))
    return zeros


def zero_structure(lin: LinearizedSolution, sol: RadialSolution,
                   n_scan: int = 4000) -> ZeroStructure:
    """Locate first/last zeros of phi and phi' and the masses they bound.

    Returns a partial structure (None fields) when fewer features exist.
    ``inner_mass`` is the mass below the first critical radius and
    ``outer_mass`` the mass above the last one.
    """
    t_grid = np.linspace(lin.grid[0], lin.grid[-1], n_scan)
    phi_zeros = _scan_zeros(lambda t: lin.trace(t)[3], t_grid)
    crit_zeros = _scan_zeros(lambda t: lin.trace(t)[4], t_grid)

    first_zero = math.exp(phi_zeros[0]) if phi_zeros else None
    last_zero = math.exp(phi_zeros[-1]) if phi_zeros else None
    first_crit = math.exp(crit_zeros[0]) if crit_zeros else None
    last_crit = math.exp(crit_zeros[-1]) if crit_zeros else None

    inner_mass = float(sol.mass_at(crit_zeros[0])) if crit_zeros else None
    outer_mass = (
        float(sol.beta_estimate - sol.mass_at(crit_zeros[-1])) if crit_zeros else None
    )
    return ZeroStructure(
        first_zero=first_zero,
        last_zero=last_zero,
        first_crit=first_crit,
        last_crit=last_crit,
        inner_mass=inner_mass,
        outer_mass=outer_mass,
    )


_GL10_NODES, _GL10_WEIGHTS = np.polynomial.legendre.leggauss(10)


def ode_residual(sol: RadialSolution) -> float:
    """Discrete defect of the returned grid against the equation.

    On each grid interval the slope-state increment is compared with the
    quadrature of the right-hand side along the trace:
    max_i |Delta w + int e^{2t} K e^v dt| / Delta t.  For an exact solution
    this vanishes; for the integrator output it reflects the per-step error.
    """
    g = sol.grid
    w_nodes = -sol.slope
    worst = 0.0
    for i in range(len(g) - 1):
        a_t, b_t = float(g[i]), float(g[i + 1])
        if b_t - a_t < 1e-13:
            continue
        mid = 0.5 * (a_t + b_t)
        half = 0.5 * (b_t - a_t)
        tt = mid + half * _GL10_NODES
        v_vals = sol.trace(tt)[0]
        flux = np.array([
            _mass_flux(sol.weight, float(t), float(v)) for t, v in zip(tt, v_vals)
        ])
        integral = half * float(np.dot(_GL10_WEIGHTS, flux))
        defect = abs(float(w_nodes[i + 1] - w_nodes[i]) + integral) / (b_t - a_t)
        worst = max(worst, defect)
    return worst
