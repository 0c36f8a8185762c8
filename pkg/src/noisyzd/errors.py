"""Exception hierarchy shared by every module."""


class NoisyZDError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(NoisyZDError, ValueError):
    """A probability, payoff or strategy parameter is outside its domain."""


class SingularNoiseError(InvalidParameterError):
    """tau == r, so the 2x2 blocks of the effective column cannot be inverted."""


class PDOrderingError(InvalidParameterError):
    """Expected payoffs violate T_E > R_E > P_E > S_E."""


class NonUniqueStationaryError(NoisyZDError):
    """The transition matrix has more than one stationary distribution."""


class DegenerateChainError(NoisyZDError):
    """D(p, q, 1) vanishes, so determinant payoffs are undefined."""


class DegeneratePinError(NoisyZDError):
    """Pinning closed forms are 0/0 (p1 = 1 and p4 = 0, or A = 0)."""


class InfeasibleError(NoisyZDError):
    """A synthesized strategy has components outside [0, 1].

    ``violations`` maps a constraint label (e.g. ``"p3<0"``) to the
    offending value.
    """

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = dict(violations or {})


class InternalConsistencyError(NoisyZDError):
    """A closed form disagrees with the determinant route."""
