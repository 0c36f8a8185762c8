"""Noisy stage game: perception-error structure, signals and stage payoffs.

State and outcome conventions used throughout the package:

* action profiles (states) are ordered ``CC, CD, DC, DD`` with X's action first;
* signal profiles are ordered ``gg, gb, bg, bb`` with X's signal first;
* a player's private outcome is ``(own action, own signal)`` ordered
  ``Cg, Cb, Dg, Db``, which indexes the memory-one strategy vector.
"""

from dataclasses import dataclass
import itertools
import math

import numpy as np

from .errors import InvalidParameterError, PDOrderingError, SingularNoiseError

ACTIONS = ("C", "D")
SIGNALS = ("g", "b")
STATES = ("CC", "CD", "DC", "DD")
SIGNAL_PROFILES = ("gg", "gb", "bg", "bb")
OUTCOMES = ("Cg", "Cb", "Dg", "Db")

_SUM_TOL = 1e-12


def outcome_index(action, signal):
    """Index of the private outcome ``(action, signal)`` in ``OUTCOMES``."""
    return 2 * ACTIONS.index(action) + SIGNALS.index(signal)


@dataclass(frozen=True)
class NoiseModel:
    """Perception-error probabilities.

    ``tau``: neither player errs; ``epsilon``: exactly one given player errs;
    ``r``: both err.  ``tau + 2 * epsilon + r == 1``.
    """

    tau: float
    epsilon: float
    r: float

    def __post_init__(self):
        for name in ("tau", "epsilon", "r"):
            value = getattr(self, name)
            if not (math.isfinite(value) and -_SUM_TOL <= value <= 1 + _SUM_TOL):
                raise InvalidParameterError(f"{name}={value!r} is not a probability")
        total = self.tau + 2 * self.epsilon + self.r
        if abs(total - 1.0) > _SUM_TOL:
            raise InvalidParameterError(f"tau + 2*epsilon + r = {total!r}, expected 1")
        if abs(self.tau - self.r) <= _SUM_TOL:
            raise SingularNoiseError(f"tau == r == {self.tau!r}")
        if self.tau < self.r:
            raise InvalidParameterError(f"tau={self.tau!r} < r={self.r!r}")

    @classmethod
    def from_pair(cls, epsilon, r):
        """Build from (epsilon, r) with tau inferred."""
        epsilon, r = float(epsilon), float(r)
        return cls(tau=1.0 - 2.0 * epsilon - r, epsilon=epsilon, r=r)

    @classmethod
    def from_strength(cls, strength, one_sided_share=2.0 / 3.0):
        """Build from the aggregate strength ``s = epsilon + r``.

        The default split puts two thirds of ``s`` on the one-sided error,
        which keeps ``tau > epsilon > r`` for ``s < 3/8``.
        """
        strength = float(strength)
        if not 0.0 <= one_sided_share <= 1.0:
            raise InvalidParameterError(f"one_sided_share={one_sided_share!r}")
        epsilon = one_sided_share * strength
        return cls.from_pair(epsilon, strength - epsilon)

    @classmethod
    def noise_free(cls):
        return cls(1.0, 0.0, 0.0)

    @property
    def strength(self):
        """epsilon + r: probability that a given player's signal is wrong."""
        return self.epsilon + self.r

    @property
    def correct(self):
        """tau + epsilon: probability that a given player's signal is right."""
        return self.tau + self.epsilon

    @property
    def gap(self):
        """tau - r, the determinant of each 2x2 effective-column block."""
        return self.tau - self.r


@dataclass(frozen=True)
class SignalDistribution:
    """pi(omega | a) stored as an array indexed ``[state, omega_X, omega_Y]``."""

    table: np.ndarray

    def prob(self, state, signals):
        """pi(signals | state), e.g. ``prob("CD", "bg")``."""
        return float(
            self.table[STATES.index(state), SIGNALS.index(signals[0]), SIGNALS.index(signals[1])]
        )

    @property
    def probs(self):
        """Mapping ``(state, signal profile) -> probability``."""
        return {
            (a, w): self.prob(a, w) for a in STATES for w in SIGNAL_PROFILES
        }

    def flat(self, state):
        """The four probabilities of ``state`` in ``SIGNAL_PROFILES`` order."""
        return self.table[STATES.index(state)].reshape(4)


def build_signal_distribution(noise):
    """Signal tables for all four action profiles.

    Under CC the table is ``[[tau, eps], [eps, r]]``.  When X defects, the
    correct signal for Y flips, so Y's columns swap; when Y defects, X's
    rows swap.
    """
    cc = np.array([[noise.tau, noise.epsilon], [noise.epsilon, noise.r]])
    table = np.empty((4, 2, 2))
    table[0] = cc
    table[1] = cc[::-1, :]  # CD: X should see b
    table[2] = cc[:, ::-1]  # DC: Y should see b
    table[3] = cc[::-1, ::-1]
    table.setflags(write=False)
    return SignalDistribution(table)


@dataclass(frozen=True)
class StagePayoffs:
    """Realized stage payoffs u(a, omega), parameterized by G and L."""

    G: float
    L: float

    def __post_init__(self):
        if not (self.G > 0 and self.L > 0):
            raise InvalidParameterError(f"G and L must be positive, got G={self.G!r}, L={self.L!r}")

    def realized(self, action, signal):
        return {
            ("C", "g"): 1.0,
            ("C", "b"): -self.L,
            ("D", "g"): 1.0 + self.G,
            ("D", "b"): 0.0,
        }[(action, signal)]

    def by_outcome(self):
        """Realized payoffs in ``OUTCOMES`` order."""
        return np.array([self.realized(o[0], o[1]) for o in OUTCOMES])


@dataclass(frozen=True)
class ExpectedPayoffs:
    """Signal-averaged stage payoffs under CC, CD, DC, DD (from X's side)."""

    R: float
    S: float
    T: float
    P: float

    @property
    def u_x(self):
        return np.array([self.R, self.S, self.T, self.P])

    @property
    def u_y(self):
        return np.array([self.R, self.T, self.S, self.P])

    @property
    def is_pd(self):
        return self.T > self.R > self.P > self.S

    def require_pd(self):
        if not self.is_pd:
            raise PDOrderingError(
                f"T_E > R_E > P_E > S_E fails for (R, S, T, P) = {self.as_tuple()}"
            )
        return self

    def as_tuple(self):
        return (self.R, self.S, self.T, self.P)

    def as_dict(self):
        return {"R_E": self.R, "S_E": self.S, "T_E": self.T, "P_E": self.P}


def expected_stage_payoffs(payoffs, noise, require_pd=False):
    """Average the realized payoffs over the signal distribution.

    The sum runs explicitly over all four signal profiles for each action
    profile.  With ``require_pd`` a violated PD ordering raises
    :class:`PDOrderingError`; otherwise check ``result.is_pd``.
    """
    dist = build_signal_distribution(noise)
    values = []
    for a_idx, state in enumerate(STATES):
        total = 0.0
        for wx, wy in itertools.product(range(2), range(2)):
            total += payoffs.realized(state[0], SIGNALS[wx]) * dist.table[a_idx, wx, wy]
        values.append(float(total))
    result = ExpectedPayoffs(*values)
    if require_pd:
        result.require_pd()
    return result


def closed_form_payoffs(payoffs, strength):
    """Closed-form expected payoffs as a function of ``s = epsilon + r``."""
    G, L, s = payoffs.G, payoffs.L, strength
    return ExpectedPayoffs(
        R=1 - (L + 1) * s,
        S=-L + (1 + L) * s,
        T=(1 + G) * (1 - s),
        P=(1 + G) * s,
    )


def resolve_expected(payoffs, noise):
    """Accept either StagePayoffs (averaged under ``noise``) or ExpectedPayoffs."""
    if isinstance(payoffs, ExpectedPayoffs):
        return payoffs
    if isinstance(payoffs, StagePayoffs):
        return expected_stage_payoffs(payoffs, noise)
    return ExpectedPayoffs(*map(float, payoffs))
