"""Closed-form construction of noisy ZD strategies.

All constructions set X's effective column equal to a combination of the
expected payoff vectors and invert the two 2x2 blocks.  Every coefficient
used here depends on the noise only through ``s = epsilon + r`` (via
``a = tau + epsilon = 1 - s``, ``b = s`` and ``tau - r = 1 - 2s``).
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import (
    DegenerateChainError,
    DegeneratePinError,
    InfeasibleError,
    InternalConsistencyError,
    InvalidParameterError,
)
from .game_model import resolve_expected
from .markov import MemoryOneStrategy
from .policy import DEFAULT
from .zd_core import (
    LinearRelation,
    decode_effective_column,
    determinant_score,
    verify_linear_relation,
)

COMPONENTS = ("p1", "p2", "p3", "p4")
# p = BASE + phi * slope for the (chi, Delta) family
EXTORTION_BASE = np.array([1.0, 1.0, 0.0, 0.0])
# slopes with |k| below this count as zero in the sign conditions
_SLOPE_EPS = 1e-12

# fixed opponents for the construction-time pinning cross-check
_CROSSCHECK_OPPONENTS = tuple(
    tuple(row) for row in np.random.default_rng(20150717).uniform(0.05, 0.95, size=(3, 4))
)


@dataclass(frozen=True)
class DerivedCoefficients:
    """Noise/payoff combinations shared by the closed forms.

    ``a = tau + eps``, ``b = eps + r`` and ``d = tau - r``.
    """

    a: float
    b: float
    d: float
    A: float
    F1: float
    F2: float
    J1: float
    J2: float

    def B(self, p1, p4):
        return (1.0 - p1 + p4) * self.d

    def C(self, chi, expected):
        return (expected.T - expected.R) + chi * (expected.R - expected.S)


def derived_coefficients(noise, payoffs):
    e = resolve_expected(payoffs, noise)
    a, b, d = noise.correct, noise.strength, noise.gap
    return DerivedCoefficients(
        a=a,
        b=b,
        d=d,
        A=a * (e.R - e.P) + b * (e.S - e.T),
        F1=a * e.R - b * e.S - d * e.P,
        F2=a * e.R - b * e.T - d * e.P,
        J1=b * e.R - a * e.S + d * e.P,
        J2=b * e.R - a * e.T + d * e.P,
    )


def _to_unit_interval(values, tol):
    """Clamp values within ``tol`` of [0, 1]; raise with labels otherwise."""
    violations = {}
    for label, x in zip(COMPONENTS, values):
        if x < -tol:
            violations[f"{label}<0"] = float(x)
        elif x > 1.0 + tol:
            violations[f"{label}>1"] = float(x)
    if violations:
        raise InfeasibleError(
            "strategy components outside [0, 1]: "
            + ", ".join(f"{k} ({v:.6g})" for k, v in violations.items()),
            violations,
        )
    return MemoryOneStrategy(tuple(np.clip(np.asarray(values, dtype=float), 0.0, 1.0)))


def solve_nzd(target, noise, tol=DEFAULT.feasibility):
    """Strategy whose effective column equals ``target``.

    The solution of the two 2x2 systems is unique; :class:`InfeasibleError`
    is raised when it is not a probability vector.
    """
    return _to_unit_interval(decode_effective_column(target, noise), tol)


@dataclass(frozen=True)
class PinningSolution:
    strategy: MemoryOneStrategy
    beta: float
    gamma: float
    pinned_sY: float

    @property
    def relation(self):
        return LinearRelation(0.0, self.beta, self.gamma)

    def as_dict(self):
        return {
            "p": self.strategy.to_list(),
            "alpha": 0.0,
            "beta": self.beta,
            "gamma": self.gamma,
            "pinned_sY": self.pinned_sY,
        }


def pinning_raw(p1, p4, noise, payoffs):
    """Unchecked pinning closed forms: ``(p2, p3, beta, gamma, pinned_sY)``."""
    e = resolve_expected(payoffs, noise)
    c = derived_coefficients(noise, e)
    a, b, d, A = c.a, c.b, c.d, c.A
    B = c.B(p1, p4)
    if abs(B) < DEFAULT.singular:
        raise DegeneratePinError("p1 = 1 and p4 = 0: the pinned payoff is 0/0")
    if abs(A) < DEFAULT.singular:
        raise DegeneratePinError("A = 0 for these payoffs and noise")
    p2 = (p1 * (a * e.T + b * (e.S - e.R) - a * e.P) - (1.0 + p4) * (e.T - e.R)) / A
    p3 = (p4 * (a * (e.R - e.S) + b * (e.P - e.T)) + (1.0 - p1) * (e.P - e.S)) / A
    beta = d * (p1 - p2) / (e.R - e.T)
    gamma = p1 - 1.0 + beta * (b * e.T - a * e.R) / d
    pinned = ((1.0 - p1) * (a * e.P - b * e.S) + p4 * (a * e.R - b * e.T)) / B
    return p2, p3, beta, gamma, pinned


def pinning_strategy(p1, p4, noise, payoffs, tol=DEFAULT, crosscheck=True):
    """Pinning strategy with free parameters ``p1`` and ``p4``.

    Raises :class:`DegeneratePinError` at ``(p1, p4) = (1, 0)`` and
    :class:`InfeasibleError` when p2 or p3 leaves [0, 1].  The pinned value
    is checked against the determinant route for a fixed opponent unless
    ``crosscheck`` is false.
    """
    for name, x in (("p1", p1), ("p4", p4)):
        if not 0.0 <= x <= 1.0:
            raise InvalidParameterError(f"{name}={x!r} is not a probability")
    e = resolve_expected(payoffs, noise)
    p2, p3, beta, gamma, pinned = pinning_raw(p1, p4, noise, e)
    strategy = _to_unit_interval((p1, p2, p3, p4), tol.feasibility)
    solution = PinningSolution(strategy, beta, gamma, pinned)

    check = verify_linear_relation(strategy, noise, e, solution.relation, tol.residual)
    if not check.enforced:
        raise InternalConsistencyError(
            f"pinning column misses beta*U_Y + gamma by {check.residual:.3g}"
        )
    if crosscheck:
        _crosscheck_pin(solution, noise, e, tol)
    return solution


def _crosscheck_pin(solution, noise, expected, tol):
    for q in _CROSSCHECK_OPPONENTS:
        try:
            s_y = determinant_score(solution.strategy, q, noise, expected.u_y, tol.singular)
        except DegenerateChainError:
            continue
        if abs(s_y - solution.pinned_sY) > tol.pin_crosscheck:
            raise InternalConsistencyError(
                f"pinned_sY={solution.pinned_sY!r} but the determinant route gives {s_y!r}"
            )
        return


@dataclass(frozen=True)
class ExtortionSpec:
    """(chi, Delta)-extortion parameters; the baseline is ``l = P_E + delta``."""

    chi: float
    delta: float
    phi: float
    l: float = field(default=math.nan)

    def __post_init__(self):
        if not self.chi >= 1.0:
            raise InvalidParameterError(f"chi={self.chi!r} must be >= 1")
        if not self.delta >= 0.0:
            raise InvalidParameterError(f"delta={self.delta!r} must be >= 0")
        if not self.phi > 0.0:
            raise InvalidParameterError(f"phi={self.phi!r} must be > 0")

    @classmethod
    def for_payoffs(cls, chi, delta, phi, expected):
        return cls(chi, delta, phi, expected.P + delta)

    @property
    def relation(self):
        """s_X - l = chi (s_Y - l) as alpha, beta, gamma."""
        return LinearRelation(1.0, -self.chi, (self.chi - 1.0) * self.l)


def extortion_relation(chi, delta, payoffs, noise=None):
    e = resolve_expected(payoffs, noise)
    return LinearRelation(1.0, -chi, (chi - 1.0) * (e.P + delta))


def extortion_slopes(chi, delta, noise, payoffs):
    """Per-unit-phi slopes ``k`` with ``p = (1, 1, 0, 0) + phi * k``."""
    e = resolve_expected(payoffs, noise)
    c = derived_coefficients(noise, e)
    shift = (chi - 1.0) * delta
    w = (e.T - e.P) - chi * (e.S - e.P)
    return np.array([
        (c.F1 - chi * c.F2) / c.d + shift,
        -(c.J1 - chi * c.J2) / c.d + shift,
        c.a * w / c.d + shift,
        -c.b * w / c.d + shift,
    ])


def max_phi(chi, delta, noise, payoffs):
    """Largest phi keeping every component of the (chi, Delta) strategy in [0, 1].

    Each component is affine in phi and starts on the boundary (1 for p1, p2;
    0 for p3, p4), so a component moving outward makes every phi > 0
    infeasible and 0.0 is returned.  ``math.inf`` means no component moves.
    """
    k = extortion_slopes(chi, delta, noise, payoffs)
    bound = math.inf
    for i, slope in enumerate(k.tolist()):
        inward = -slope if EXTORTION_BASE[i] == 1.0 else slope
        if inward < -_SLOPE_EPS:
            return 0.0
        if inward > _SLOPE_EPS:
            bound = min(bound, 1.0 / inward)
    return bound


def weak_extortion_strategy(chi, delta, phi, noise, payoffs, tol=DEFAULT.feasibility):
    """(chi, Delta)-extortion strategy for a given phi.

    Enforces ``s_X - l = chi (s_Y - l)`` with ``l = P_E + delta``.  Raises
    :class:`InfeasibleError` naming the components that leave [0, 1].
    """
    e = resolve_expected(payoffs, noise).require_pd()
    ExtortionSpec.for_payoffs(chi, delta, phi, e)
    p = EXTORTION_BASE + phi * extortion_slopes(chi, delta, noise, e)
    return _to_unit_interval(p, tol)


def extortion_target(chi, delta, phi, payoffs, noise=None):
    """phi [(U_X - l) - chi (U_Y - l)], the effective column to realize."""
    e = resolve_expected(payoffs, noise)
    l = e.P + delta
    return phi * ((e.u_x - l) - chi * (e.u_y - l))


@dataclass(frozen=True)
class StrongExtortionResult:
    feasible: bool
    chi: float
    strategy: MemoryOneStrategy = None
    phi: float = None
    certificate: dict = None

    def as_dict(self):
        out = {"feasible": self.feasible, "chi": self.chi}
        if self.feasible:
            out["p"] = self.strategy.to_list()
            out["phi"] = self.phi
        else:
            out["certificate"] = self.certificate
        return out


def strong_extortion_feasibility(noise, payoffs, chi):
    """Try the Delta = 0 extortion (baseline ``l = P_E``).

    With any noise, row 4 of the system reads ``b p3 + a p4 = 0`` with
    ``a, b > 0``, so ``p3 = p4 = 0``; row 3 then needs
    ``0 = phi [(T_E - P_E) - chi (S_E - P_E)] > 0``.  The returned
    certificate carries these values.
    """
    if not chi > 1.0:
        raise InvalidParameterError(f"chi={chi!r} must be > 1")
    e = resolve_expected(payoffs, noise).require_pd()
    a, b = noise.correct, noise.strength
    row3_rhs = (e.T - e.P) - chi * (e.S - e.P)
    if b > 0.0:
        k = extortion_slopes(chi, 0.0, noise, e)
        certificate = {
            "violated": ["row3", "row4"],
            "row4": {"coefficients": [b, a], "rhs": 0.0, "implies": {"p3": 0.0, "p4": 0.0}},
            "row3": {"lhs_at_p3_p4_zero": 0.0, "rhs_per_unit_phi": float(row3_rhs)},
            "p4_per_unit_phi": float(k[3]),
        }
        return StrongExtortionResult(False, chi, certificate=certificate)
    phi = max_phi(chi, 0.0, noise, e)
    if not phi > 0.0:
        k = extortion_slopes(chi, 0.0, noise, e)
        bad = [
            label for label, base, slope in zip(COMPONENTS, EXTORTION_BASE, k)
            if (slope > _SLOPE_EPS if base == 1.0 else slope < -_SLOPE_EPS)
        ]
        return StrongExtortionResult(False, chi, certificate={"violated": bad})
    phi = float(phi) / 2.0 if math.isfinite(phi) else 1.0
    strategy = weak_extortion_strategy(chi, 0.0, phi, noise, e)
    return StrongExtortionResult(True, chi, strategy=strategy, phi=phi)


def fullcoop_payoffs(chi, delta, payoffs, noise=None):
    """(s_X, s_Y) of a (chi, Delta)-extortioner against q = (1, 1, 1, 1)."""
    e = resolve_expected(payoffs, noise).require_pd()
    R, S, T, P = e.R, e.S, e.T, e.P
    C = (T - R) + chi * (R - S)
    s_x = (chi * (R * (T - S) - P * (T - R)) - (chi - 1.0) * (T - R) * delta + P * (T - R)) / C
    # the companion for s_Y follows from s_X - l = chi (s_Y - l)
    s_y = ((P + delta) * C + (T - S) * (R - P - delta)) / C
    return s_x, s_y
