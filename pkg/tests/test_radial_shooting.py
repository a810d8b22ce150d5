"""Tests for the radial shooting engine.

Closed forms used as oracles:
  * K == 1:          the family v = log(8 l^2 / (1 + l^2 r^2)^2) with
                     l^2 = e^a/8 has v(0) = a and total mass 4 for every a.
  * K == (1+r^2)^al: at a = log(4(al+2)) the solution is
                     v = log(4(al+2)/(1+r^2)^(al+2)) with mass 2(al+2).
  * K == r^(2p):     scale invariance forces mass 4(p+1) regardless of a.
The linearized profile of the K == 1 family at a = 0 is
phi = (1 - r^2/8)/(1 + r^2/8).
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from liouville_lab import (
    IntegrationControl,
    MissingZero,
    NotConverged,
    WeightSpec,
    beta,
    integrate_cauchy,
    kelvin,
    linearized,
    mass_of,
    ode_residual,
    zero_structure,
)

BUBBLE = WeightSpec(eps=1.0, p=0.0, q=0.0)

# frozen solver outputs (double-resolution runs agree to ~4e-12)
BETA_P2_QNEG = 7.562481145915  # eps=1, p=2, q=-0.85, a=0
BETA_SINGULAR = 2.0            # eps=0, p=-0.5, q=0: closed form 4(p+1)


# ---------------------------------------------------------------------------
# integrate_cauchy
# ---------------------------------------------------------------------------

def test_bubble_pointwise_value():
    sol = integrate_cauchy(BUBBLE, 0.0)
    r = 2.0 * math.sqrt(2.0)
    assert sol.v_at(math.log(r)) == pytest.approx(math.log(0.25), abs=1e-8)


def test_bubble_trace_supnorm():
    sol = integrate_cauchy(BUBBLE, 0.0)
    r = np.exp(sol.grid)
    exact = -2.0 * np.log1p(r**2 / 8.0)
    assert np.max(np.abs(sol.v - exact)) < 1e-8


def test_polynomial_weight_anchor_profile():
    w = WeightSpec(eps=1.0, p=1.0, q=0.0)
    sol = integrate_cauchy(w, math.log(12.0))
    assert sol.v_at(0.0) == pytest.approx(math.log(1.5), abs=1e-8)
    r = np.exp(sol.grid)
    exact = math.log(12.0) - 3.0 * np.log1p(r**2)
    assert np.max(np.abs(sol.v - exact)) < 1e-8


def test_pure_power_series_start():
    # K = r^2 near the origin: v ~ -e^0 r^4 / 16
    w = WeightSpec(eps=0.0, p=1.0, q=0.0)
    sol = integrate_cauchy(w, 0.0)
    for t in (-5.0, -4.0, -3.0):
        r = math.exp(t)
        assert sol.v_at(t) == pytest.approx(-(r**4) / 16.0, rel=1e-3, abs=1e-14)


def test_central_value_recorded():
    sol = integrate_cauchy(BUBBLE, -1.5)
    assert sol.a == -1.5
    # the first grid value is already close to a for a start radius ~1e-6
    assert sol.v[0] == pytest.approx(-1.5, abs=1e-10)


def test_invalid_weight_rejected():
    from liouville_lab import InvalidWeight

    with pytest.raises(InvalidWeight):
        WeightSpec(eps=-1.0, p=0.0, q=0.0).validate()
    with pytest.raises(InvalidWeight):
        WeightSpec(eps=0.0, p=-1.5, q=0.0).validate()


# ---------------------------------------------------------------------------
# mass_of / beta
# ---------------------------------------------------------------------------

def test_bubble_mass_is_four():
    for a in (-6.0, -1.0, 0.0, 2.5):
        assert beta(BUBBLE, a).beta == pytest.approx(4.0, abs=1e-6)


def test_anchor_masses():
    for alpha in (0.5, 1.0, 2.0, 3.0):
        w = WeightSpec(eps=1.0, p=alpha, q=0.0)
        res = beta(w, math.log(4.0 * (alpha + 2.0)))
        assert res.converged
        assert res.beta == pytest.approx(2.0 * (alpha + 2.0), abs=1e-6)


def test_mass_regression_values():
    res = beta(WeightSpec(eps=1.0, p=2.0, q=-0.85), 0.0)
    assert res.converged
    assert res.beta == pytest.approx(BETA_P2_QNEG, abs=1e-8)

    res = beta(WeightSpec(eps=0.0, p=-0.5, q=0.0), 0.0)
    assert res.converged
    assert res.beta == pytest.approx(BETA_SINGULAR, abs=1e-8)


def test_pure_power_mass_closed_form():
    # scale invariance of K = r^(2p) pins the total mass at 4(p+1)
    for p in (-0.5, 0.5, 1.0, 2.0):
        res = beta(WeightSpec(eps=0.0, p=p, q=0.0), 0.3)
        assert res.beta == pytest.approx(4.0 * (p + 1.0), abs=1e-8)


def test_mass_result_invariants():
    res = beta(WeightSpec(eps=1.0, p=3.0, q=0.0), -6.0)
    assert res.tail >= 0.0
    assert res.converged
    assert res.tail <= 1e-8 * res.beta
    assert res.r_cut > 0.0


def test_not_converged_when_cut_short():
    ctrl = IntegrationControl(t_max=0.0)  # stop before the slope can build up
    sol = integrate_cauchy(BUBBLE, 0.0, ctrl)
    assert not sol.converged
    with pytest.raises(NotConverged):
        mass_of(sol, ctrl)


def test_weight_splitting_integer_shift():
    # (eps+r^2)^p (1+r^2)^q depends only on p+q when eps=1
    a = 0.7
    b1 = beta(WeightSpec(eps=1.0, p=2.0, q=0.0), a).beta
    b2 = beta(WeightSpec(eps=1.0, p=0.0, q=2.0), a).beta
    b3 = beta(WeightSpec(eps=1.0, p=1.0, q=1.0), a).beta
    assert b1 == pytest.approx(b2, abs=1e-8)
    assert b1 == pytest.approx(b3, abs=1e-8)


# ---------------------------------------------------------------------------
# kelvin
# ---------------------------------------------------------------------------

def test_kelvin_bubble_center_value():
    sol = integrate_cauchy(BUBBLE, 0.0)
    hat = kelvin(sol, mass_of(sol).beta)
    assert hat.a == pytest.approx(2.0 * math.log(8.0), abs=1e-6)


def test_kelvin_fixed_point_at_unit_radius():
    w = WeightSpec(eps=1.0, p=2.0, q=0.0)
    sol = integrate_cauchy(w, 1.3)
    hat = kelvin(sol, mass_of(sol).beta)
    assert hat.v_at(0.0) == pytest.approx(sol.v_at(0.0), abs=1e-9)


def test_kelvin_anchor_self_dual():
    # at the alpha=1 anchor the inversion maps the solution onto itself
    w = WeightSpec(eps=1.0, p=1.0, q=0.0)
    a = math.log(12.0)
    sol = integrate_cauchy(w, a)
    hat = kelvin(sol, mass_of(sol).beta)
    assert hat.a == pytest.approx(a, abs=1e-6)
    assert hat.weight.p == pytest.approx(1.0)
    assert hat.weight.q == pytest.approx(0.0)
    assert abs(hat.weight.power) < 1e-8


def test_kelvin_involution():
    w = WeightSpec(eps=1.0, p=1.5, q=0.0)
    sol = integrate_cauchy(w, 0.4)
    b = mass_of(sol).beta
    back = kelvin(kelvin(sol, b), b)
    # compare on the overlap of the two grids
    lo = max(sol.grid[0], back.grid[0])
    hi = min(sol.grid[-1], back.grid[-1])
    ts = np.linspace(lo, hi, 200)
    err = np.abs(back.trace(ts)[0] - sol.trace(ts)[0])
    assert np.max(err) < 1e-8
    assert back.weight.power == pytest.approx(sol.weight.power, abs=1e-10)
    assert back.weight.eps == pytest.approx(sol.weight.eps, abs=1e-12)


def test_kelvin_requires_converged_input():
    ctrl = IntegrationControl(t_max=0.0)
    sol = integrate_cauchy(BUBBLE, 0.0, ctrl)
    with pytest.raises(NotConverged):
        kelvin(sol, 4.0)


# ---------------------------------------------------------------------------
# linearized
# ---------------------------------------------------------------------------

def test_linearized_bubble_profile():
    lin = linearized(BUBBLE, 0.0)
    r = np.exp(lin.grid)
    exact = (1.0 - r**2 / 8.0) / (1.0 + r**2 / 8.0)
    assert np.max(np.abs(lin.phi - exact)) < 1e-8
    assert lin.beta_prime == pytest.approx(0.0, abs=1e-6)
    assert lin.phi_infty == pytest.approx(-1.0, abs=1e-6)


def test_linearized_initial_conditions():
    lin = linearized(WeightSpec(eps=1.0, p=2.0, q=0.0), 0.5)
    assert lin.phi[0] == pytest.approx(1.0, abs=1e-8)
    assert abs(lin.phi_prime[0]) < 1e-4  # phi' ~ r near the origin


def test_beta_prime_negative_on_mid_branch():
    lin = linearized(WeightSpec(eps=1.0, p=2.0, q=0.0), math.log(16.0))
    assert lin.beta_prime < 0.0


@pytest.mark.parametrize(
    "weight,a",
    [
        (WeightSpec(eps=1.0, p=2.0, q=0.0), -2.0),
        (WeightSpec(eps=1.0, p=0.5, q=0.0), 1.0),
        (WeightSpec(eps=1.0, p=2.0, q=-0.85), 0.0),
        (WeightSpec(eps=0.5, p=1.0, q=0.5), 0.8),
    ],
)
def test_beta_prime_matches_finite_difference(weight, a):
    lin = linearized(weight, a)
    h = 1e-4
    fd = (beta(weight, a + h).beta - beta(weight, a - h).beta) / (2.0 * h)
    scale = max(abs(fd), 1e-3)
    assert abs(lin.beta_prime - fd) <= 1e-4 * scale


# ---------------------------------------------------------------------------
# zero_structure
# ---------------------------------------------------------------------------

def test_bubble_zero_structure_partial():
    sol = integrate_cauchy(BUBBLE, 0.0)
    lin = linearized(BUBBLE, 0.0)
    zs = zero_structure(lin, sol)
    assert zs.first_zero == pytest.approx(math.sqrt(8.0), abs=1e-6)
    # phi decreases monotonically through its single zero: no critical points
    assert zs.first_crit is None
    assert zs.last_crit is None
    with pytest.raises(MissingZero):
        zs.require_complete()


def _minimizer_of(weight: WeightSpec, lo: float, hi: float) -> float:
    from scipy.optimize import brentq

    return float(brentq(lambda a: linearized(weight, a).beta_prime, lo, hi, xtol=1e-8))


def test_zero_structure_at_interior_minimizer():
    w = WeightSpec(eps=1.0, p=2.0, q=0.0)
    a_star = _minimizer_of(w, math.log(16.0), 15.0)
    sol = integrate_cauchy(w, a_star)
    b = mass_of(sol).beta
    lin = linearized(w, a_star)
    zs = zero_structure(lin, sol).require_complete()
    assert zs.first_zero < zs.first_crit <= zs.last_crit < zs.last_zero
    assert zs.inner_mass > 4.0
    assert zs.outer_mass > 2.0 * b - 4.0 * (w.p + 1.0)


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

REPRESENTATIVE = [
    (WeightSpec(eps=1.0, p=0.0, q=0.0), 0.0),
    (WeightSpec(eps=1.0, p=1.0, q=0.0), math.log(12.0)),
    (WeightSpec(eps=1.0, p=3.0, q=0.0), -6.0),
    (WeightSpec(eps=1.0, p=0.5, q=0.0), 2.0),
    (WeightSpec(eps=1.0, p=2.0, q=-0.85), 0.0),
    (WeightSpec(eps=0.0, p=-0.5, q=0.0), 0.0),
    (WeightSpec(eps=0.0, p=1.0, q=0.0), 0.0),
    (WeightSpec(eps=1e-8, p=2.0, q=-0.85), 10.0),
    (WeightSpec(eps=1.0, p=2.0, q=0.0), -30.0),
    (WeightSpec(eps=1.0, p=2.0, q=0.0), 30.0),
]


@pytest.mark.parametrize("weight,a", REPRESENTATIVE)
def test_ode_residual_bound(weight, a):
    sol = integrate_cauchy(weight, a)
    assert ode_residual(sol) <= 10.0 * IntegrationControl().abs_tol


@pytest.mark.parametrize("weight,a", REPRESENTATIVE)
def test_slope_mass_identity(weight, a):
    sol = integrate_cauchy(weight, a)
    assert np.max(np.abs(sol.slope - sol.mass)) <= 10.0 * IntegrationControl().abs_tol


@pytest.mark.parametrize("weight,a", REPRESENTATIVE)
def test_mass_monotone(weight, a):
    sol = integrate_cauchy(weight, a)
    assert np.all(np.diff(sol.mass) >= -1e-12)
    # strictly decaying wherever the slope is appreciably positive
    active = sol.slope[:-1] > 1e-8
    assert np.all(np.diff(sol.v)[active] < 0.0)


@settings(max_examples=20, deadline=None)
@given(a=st.floats(min_value=-8.0, max_value=4.0))
def test_flat_weight_mass_property(a):
    assert beta(BUBBLE, a).beta == pytest.approx(4.0, abs=1e-6)


@settings(max_examples=15, deadline=None)
@given(
    alpha=st.floats(min_value=1.0, max_value=3.0),
    k=st.integers(min_value=0, max_value=2),
    a=st.floats(min_value=-3.0, max_value=3.0),
)
def test_weight_splitting_property(alpha, k, a):
    b1 = beta(WeightSpec(eps=1.0, p=alpha, q=0.0), a).beta
    b2 = beta(WeightSpec(eps=1.0, p=alpha - k, q=float(k)), a).beta
    assert b1 == pytest.approx(b2, abs=1e-8)


@settings(max_examples=15, deadline=None)
@given(
    p=st.floats(min_value=0.0, max_value=3.0),
    a=st.floats(min_value=-4.0, max_value=3.0),
)
def test_tail_nonnegative_property(p, a):
    res = beta(WeightSpec(eps=1.0, p=p, q=0.0), a)
    assert res.tail >= 0.0
    assert res.beta >= 0.0
