"""Exception hierarchy shared by all modules.

Two branches matter for the command line front end: ``ValidationError``
(bad inputs, exit code 1) and ``NumericalError`` (a computation that was
set up correctly but failed to converge or lost its branch, exit code 2).
"""

from __future__ import annotations


class LiouvilleLabError(Exception):
    """Base class for all package errors."""


class ValidationError(LiouvilleLabError):
    """Inputs violate a documented precondition."""


class InvalidWeight(ValidationError):
    """Radial weight parameters are outside the admissible set."""


class InvalidParams(ValidationError):
    """Configuration parameters are outside the admissible set."""


class InvalidInputs(ValidationError):
    """Composite input record violates its invariants."""


class EmptyWindow(ValidationError):
    """A requested parameter window is empty."""


class NumericalError(LiouvilleLabError):
    """A well-posed computation failed numerically."""


class DivergedStep(NumericalError):
    """Adaptive step size underflowed; the ODE became effectively stiff."""


class NotConverged(NumericalError):
    """The integration never met its truncation criterion."""


class NoInteriorMin(NumericalError):
    """The sampled curve is monotone; no interior minimizer exists."""


class NoSolution(NumericalError):
    """A target value lies outside the sampled image of the curve."""


class NoBracket(NumericalError):
    """No sign change was found in the scanned parameter window."""


class MissingZero(NumericalError):
    """Fewer zeros/critical points exist than a complete structure needs."""


class ResidualTooLarge(NumericalError):
    """Root finding finished but the configuration residual is too large."""


class NewtonDiverged(NumericalError):
    """Damped Newton iteration failed to reduce the residual."""


class SingularJacobian(NumericalError):
    """The Newton linearization could not be factorized."""


class BranchLost(NumericalError):
    """A continuation run lost its solution branch mid-schedule."""
