"""Tests for the blow-up configuration solver.

Hand-checked cases:
  * (1,1,1): single point at 0 (symmetric cancellation, empty sum).
  * (2,2,2): points +-i/sqrt(3); at e = i/sqrt(3) the left side
    4e/(e^2-1) = -3e matches the right side 2/(e - conj(e)) = -3e.
  * (2,1,1): single point -1/3 from 2/(-4/3) + 1/(2/3) = 0.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from liouville_lab import InvalidParams, NewtonDiverged
from liouville_lab.vortex_configuration import (
    BlowupConfiguration,
    VortexParams,
    characteristic_polynomial,
    find_points,
    newton_oracle,
    symmetric_functions,
)

ALL_PARAMS = [
    VortexParams(a1, a2, m)
    for a1 in range(1, 6)
    for a2 in range(1, 6)
    if abs(a1 - a2) <= 1
    for m in range(1, min(a1, a2) + 1)
]


def set_distance(a, b) -> float:
    return max(
        max(min(abs(x - y) for y in b) for x in a),
        max(min(abs(x - y) for x in a) for y in b),
    )


# ---------------------------------------------------------------------------
# parameter validation
# ---------------------------------------------------------------------------

def test_param_validation():
    for bad in (
        VortexParams(3, 1, 1),      # strengths differ by 2
        VortexParams(2, 2, 3),      # more points than min strength
        VortexParams(2, 2, 0),      # no points
        VortexParams(-1, 1, 1),     # negative strength
        VortexParams(2.5, 2.5, 2),  # non-integer without the flag
    ):
        with pytest.raises(InvalidParams):
            bad.validate()
    VortexParams(2.5, 2.5, 2, extrapolation=True).validate()


# ---------------------------------------------------------------------------
# symmetric functions (exact rational arithmetic)
# ---------------------------------------------------------------------------

def test_symmetric_values_hand_cases():
    assert symmetric_functions(VortexParams(1, 1, 1)) == [1, 0]
    assert symmetric_functions(VortexParams(2, 2, 2)) == [1, 0, Fraction(1, 3)]
    assert symmetric_functions(VortexParams(2, 1, 1)) == [1, Fraction(-1, 3)]


def test_symmetric_values_are_exact_fractions():
    sym = symmetric_functions(VortexParams(5, 4, 4))
    assert all(isinstance(s, Fraction) for s in sym)
    assert sym[0] == 1
    assert sym[1] == Fraction(-4, 3)


def test_sum_formula_seed():
    for p in ALL_PARAMS:
        sym = symmetric_functions(p)
        expected = Fraction(p.alpha2 - p.alpha1) * p.m / (p.alpha1 + p.alpha2 - 2 * (p.m - 1))
        assert sym[1] == expected


# ---------------------------------------------------------------------------
# characteristic polynomial
# ---------------------------------------------------------------------------

def test_polynomial_hand_cases():
    p = VortexParams(2, 2, 2)
    assert characteristic_polynomial(symmetric_functions(p), p) == [6.0, 0.0, 2.0]
    p = VortexParams(1, 1, 1)
    assert characteristic_polynomial(symmetric_functions(p), p) == [2.0, 0.0]
    p = VortexParams(2, 1, 1)
    assert characteristic_polynomial(symmetric_functions(p), p) == [3.0, 1.0]


def test_polynomial_coefficients_real():
    for p in ALL_PARAMS:
        coeffs = characteristic_polynomial(symmetric_functions(p), p)
        assert all(isinstance(c, float) for c in coeffs)


# ---------------------------------------------------------------------------
# find_points
# ---------------------------------------------------------------------------

def test_single_point_at_origin():
    cfg = find_points(VortexParams(1, 1, 1))
    assert cfg.points == (0j,)
    assert cfg.residual == 0.0


def test_conjugate_pair_configuration():
    cfg = find_points(VortexParams(2, 2, 2))
    e = 1.0 / math.sqrt(3.0)
    assert cfg.residual <= 1e-12
    assert abs(cfg.points[0] - complex(0.0, -e)) <= 1e-12
    assert abs(cfg.points[1] - complex(0.0, +e)) <= 1e-12


def test_asymmetric_single_point():
    cfg = find_points(VortexParams(2, 1, 1))
    assert cfg.residual <= 1e-12
    assert abs(cfg.points[0] - (-1.0 / 3.0)) <= 1e-12


@pytest.mark.parametrize("params", ALL_PARAMS, ids=lambda p: f"{p.alpha1}-{p.alpha2}-{p.m}")
def test_configuration_invariants(params):
    cfg = find_points(params)
    assert cfg.residual <= 1e-8
    # Vieta consistency of the point sum
    total = sum(cfg.points)
    assert abs(total - complex(float(cfg.sym[1]))) <= 1e-10
    # points sorted and distinct, away from the poles
    keys = [(round(z.real, 12), round(z.imag, 12)) for z in cfg.points]
    assert keys == sorted(keys)
    for z in cfg.points:
        assert min(abs(z - 1.0), abs(z + 1.0)) > 1e-6
    # conjugate-pair structure of real-coefficient roots
    conj = [complex(z.real, -z.imag) for z in cfg.points]
    assert set_distance(cfg.points, conj) <= 1e-10


def test_symmetric_strengths_give_symmetric_sets():
    for a in range(1, 6):
        for m in range(1, a + 1):
            cfg = find_points(VortexParams(a, a, m))
            negated = [-z for z in cfg.points]
            assert set_distance(cfg.points, negated) <= 1e-10


def test_as_dict_round_trip():
    cfg = find_points(VortexParams(2, 2, 2))
    d = cfg.as_dict()
    assert d["params"] == {"alpha1": 2, "alpha2": 2, "m": 2}
    assert d["sym"] == [1.0, 0.0, pytest.approx(1.0 / 3.0)]
    assert len(d["points"]) == 2
    assert d["residual"] <= 1e-12


# ---------------------------------------------------------------------------
# newton oracle
# ---------------------------------------------------------------------------

def test_oracle_converges_from_stated_starts():
    pts = newton_oracle(VortexParams(2, 2, 2), [0.5 + 0.5j, -0.5 - 0.5j])
    cfg = find_points(VortexParams(2, 2, 2))
    assert set_distance(pts, cfg.points) <= 1e-8

    pts = newton_oracle(VortexParams(1, 1, 1), [0.2])
    assert abs(pts[0]) <= 1e-10


def test_oracle_recovers_perturbed_configuration():
    cfg = find_points(VortexParams(3, 3, 3))
    start = [z + 0.01 * (1 + 1j) for z in cfg.points]
    pts = newton_oracle(VortexParams(3, 3, 3), start)
    assert set_distance(pts, cfg.points) <= 1e-8


def test_oracle_rejects_bad_starts():
    with pytest.raises(InvalidParams):
        newton_oracle(VortexParams(2, 2, 2), [1.0 + 0j, 0.5j])  # on a pole
    with pytest.raises(InvalidParams):
        newton_oracle(VortexParams(2, 2, 2), [0.5j, 0.5j])      # coincident
    with pytest.raises(InvalidParams):
        newton_oracle(VortexParams(2, 2, 2), [0.5j])            # wrong count


def test_oracle_equivalence_random_starts():
    rng = np.random.default_rng(20260814)
    for params in ALL_PARAMS:
        cfg = find_points(params)
        for _ in range(20):
            start = rng.uniform(-2, 2, params.m) + 1j * rng.uniform(-2, 2, params.m)
            try:
                pts = newton_oracle(params, list(start))
            except (NewtonDiverged, InvalidParams):
                continue
            assert set_distance(pts, cfg.points) <= 1e-7


def test_extrapolated_strengths_still_balance():
    cfg = find_points(VortexParams(2.5, 2.5, 2, extrapolation=True))
    assert cfg.residual <= 1e-8
    assert isinstance(cfg.sym[1], float)
