"""Exception hierarchy shared by all numerical modules."""


class KoshError(Exception):
    """Base class for every error raised by this package."""


class BracketFailure(KoshError):
    """No sign change was found on the root bracket (n - 1/2, n)."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class PoleAtP(KoshError, ZeroDivisionError):
    """The Moebius map (p + t)/(p - t) was evaluated at its pole t = p."""


class NearPole(KoshError):
    """A kernel evaluation landed within the pole-proximity radius."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class InsufficientTable(KoshError):
    """An eigenvalue table is too short for the requested tail tolerance."""


class DivergesAtZero(KoshError, ValueError):
    """An exponential sum was requested at a non-positive argument."""


class SlowConvergence(KoshError):
    """A series cannot reach the requested tolerance with the available terms."""


class QuadFailure(KoshError):
    """Quadrature could not produce a trustworthy value."""


class MaxSubdivisions(QuadFailure):
    """Adaptive quadrature hit its panel limit before meeting the tolerance."""


class PoleMisdeclared(QuadFailure):
    """The remainder after pole subtraction is still singular."""


class UnknownPreset(KoshError, ValueError):
    """A test-function preset name or parameter was not recognized."""


class HypothesisViolation(KoshError, ValueError):
    """A test function does not meet the growth hypothesis of a formula."""
