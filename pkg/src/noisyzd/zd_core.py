"""Determinant form of the stationary payoffs and the linear-relation test.

After adding column 1 of ``M - I`` to columns 2 and 3, column 2 depends
only on X's strategy and column 3 only on Y's.  Replacing column 4 by a
payoff vector ``f`` gives ``D(p, q, f)``, and ``D(p, q, f) / D(p, q, 1)`` is
the stationary expectation of ``f``.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateChainError, InvalidParameterError
from .game_model import resolve_expected
from .markov import as_strategy, build_transition_matrix
from .policy import DEFAULT


def effective_column_x(p, noise):
    """X's column: probability X cooperates next from each state, minus 1 on CC and CD."""
    p1, p2, p3, p4 = as_strategy(p)
    a, b = noise.correct, noise.strength
    return np.array([
        a * p1 + b * p2 - 1.0,
        b * p1 + a * p2 - 1.0,
        a * p3 + b * p4,
        b * p3 + a * p4,
    ])


def effective_column_y(q, noise):
    """Y's column, with the CD and DC rows exchanged relative to X's."""
    q1, q2, q3, q4 = as_strategy(q)
    a, b = noise.correct, noise.strength
    return np.array([
        a * q1 + b * q2 - 1.0,
        a * q3 + b * q4,
        b * q1 + a * q2 - 1.0,
        b * q3 + a * q4,
    ])


def decode_effective_column(column, noise):
    """Invert :func:`effective_column_x` without any range check.

    Both 2x2 blocks are ``[[a, b], [b, a]]`` with determinant ``tau - r``.
    """
    c = np.asarray(column, dtype=float)
    a, b, d = noise.correct, noise.strength, noise.gap
    x1, x2 = c[0] + 1.0, c[1] + 1.0
    x3, x4 = c[2], c[3]
    return np.array([
        (a * x1 - b * x2) / d,
        (a * x2 - b * x1) / d,
        (a * x3 - b * x4) / d,
        (a * x4 - b * x3) / d,
    ])


def determinant_matrix(p, q, noise, f):
    """The 4x4 matrix whose determinant is D(p, q, f)."""
    m = build_transition_matrix(p, q, noise)
    first = m[:, 0] - np.array([1.0, 0.0, 0.0, 0.0])
    return np.column_stack([
        first,
        effective_column_x(p, noise),
        effective_column_y(q, noise),
        np.asarray(f, dtype=float),
    ])


def payoff_determinant(p, q, noise, f):
    return float(np.linalg.det(determinant_matrix(p, q, noise, f)))


def determinant_score(p, q, noise, f, singular_tol=DEFAULT.singular):
    """Stationary expectation of ``f`` as ``D(p, q, f) / D(p, q, 1)``."""
    base = determinant_matrix(p, q, noise, np.ones(4))
    denom = float(np.linalg.det(base))
    if abs(denom) < singular_tol:
        raise DegenerateChainError(f"|D(p, q, 1)| = {abs(denom):.3g} < {singular_tol:g}")
    base[:, 3] = np.asarray(f, dtype=float)
    return float(np.linalg.det(base)) / denom


def determinant_payoffs(p, q, noise, payoffs, singular_tol=DEFAULT.singular):
    """(s_X, s_Y) by the determinant route."""
    expected = resolve_expected(payoffs, noise)
    return (
        determinant_score(p, q, noise, expected.u_x, singular_tol),
        determinant_score(p, q, noise, expected.u_y, singular_tol),
    )


@dataclass(frozen=True)
class LinearRelation:
    """alpha * s_X + beta * s_Y + gamma = 0."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if self.alpha == 0 and self.beta == 0 and self.gamma == 0:
            raise InvalidParameterError("a linear relation needs a nonzero coefficient")

    def target(self, expected):
        return self.alpha * expected.u_x + self.beta * expected.u_y + self.gamma

    def scaled(self, factor):
        """The same relation with every coefficient multiplied by ``factor``."""
        return LinearRelation(factor * self.alpha, factor * self.beta, factor * self.gamma)

    def evaluate(self, s_x, s_y):
        return self.alpha * s_x + self.beta * s_y + self.gamma

    def as_dict(self):
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma}


class RelationCheck(NamedTuple):
    enforced: bool
    residual: float


def verify_linear_relation(p, noise, payoffs, relation, tol=DEFAULT.residual):
    """Does X's effective column equal ``alpha U_X + beta U_Y + gamma 1``?

    If it does (max deviation <= ``tol``) the relation holds for every
    opponent that leaves the chain with a unique stationary distribution.
    """
    expected = resolve_expected(payoffs, noise)
    deviation = effective_column_x(p, noise) - relation.target(expected)
    residual = float(np.max(np.abs(deviation)))
    return RelationCheck(residual <= tol, residual)


def fit_linear_relation(p, noise, payoffs):
    """Least-squares fit of X's effective column onto span{U_X, U_Y, 1}.

    Returns ``(relation, residual)``, or ``(None, residual)`` when the
    column is (numerically) zero, e.g. for p = (1, 1, 0, 0).
    """
    expected = resolve_expected(payoffs, noise)
    column = effective_column_x(p, noise)
    basis = np.column_stack([expected.u_x, expected.u_y, np.ones(4)])
    coef = np.linalg.lstsq(basis, column, rcond=None)[0]
    residual = float(np.max(np.abs(basis @ coef - column)))
    if np.max(np.abs(column)) < 1e-14:
        return None, residual
    return LinearRelation(*map(float, coef)), residual
