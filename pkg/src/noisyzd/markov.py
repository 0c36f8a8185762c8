"""Transition matrix of the noisy repeated game and its stationary oracles."""

from dataclasses import dataclass
import math

import numpy as np

from .errors import InvalidParameterError, NonUniqueStationaryError
from .game_model import build_signal_distribution, resolve_expected
from .policy import DEFAULT

_POWER_TOL = 1e-12
_POWER_MAX_ITER = 10**6
_COND_LIMIT = 1e12


@dataclass(frozen=True)
class MemoryOneStrategy:
    """Cooperation probabilities after private outcomes Cg, Cb, Dg, Db."""

    p: tuple

    def __post_init__(self):
        values = tuple(float(x) for x in self.p)
        if len(values) != 4:
            raise InvalidParameterError(f"memory-one strategy needs 4 entries, got {len(values)}")
        for i, x in enumerate(values):
            if not (math.isfinite(x) and 0.0 <= x <= 1.0):
                raise InvalidParameterError(f"component {i + 1} = {x!r} is not a probability")
        object.__setattr__(self, "p", values)

    def __iter__(self):
        return iter(self.p)

    def __getitem__(self, i):
        return self.p[i]

    def __len__(self):
        return 4

    def as_array(self):
        return np.array(self.p)

    def to_list(self):
        return list(self.p)


def as_strategy(obj):
    if isinstance(obj, MemoryOneStrategy):
        return obj
    return MemoryOneStrategy(tuple(obj))


def build_transition_matrix(p, q, noise):
    """4x4 state transition matrix over CC, CD, DC, DD.

    Entry ``(a, a')`` sums, over the four signal profiles, pi(omega | a)
    times the probability that each player independently chooses its part
    of ``a'`` given its own private outcome.
    """
    p = as_strategy(p).as_array().reshape(2, 2)
    q = as_strategy(q).as_array().reshape(2, 2)
    table = build_signal_distribution(noise).table
    # cooperation probability per (state, own signal)
    cx = p[[0, 0, 1, 1]]
    cy = q[[0, 1, 0, 1]]
    x_moves = np.stack([cx, 1.0 - cx], axis=-1)
    y_moves = np.stack([cy, 1.0 - cy], axis=-1)
    m = np.einsum("auv,aui,avj->aij", table, x_moves, y_moves)
    return m.reshape(4, 4)


def check_stochastic(m, tol=1e-10):
    m = np.asarray(m, dtype=float)
    if m.shape != (4, 4):
        raise InvalidParameterError(f"expected a 4x4 matrix, got shape {m.shape}")
    if np.any(m < -tol) or np.any(m > 1 + tol):
        raise InvalidParameterError("transition matrix has entries outside [0, 1]")
    if np.max(np.abs(m.sum(axis=1) - 1.0)) > tol:
        raise InvalidParameterError("transition matrix rows do not sum to 1")
    return m


def _power_iteration(m):
    v = np.full(m.shape[0], 1.0 / m.shape[0])
    for _ in range(_POWER_MAX_ITER):
        nxt = v @ m
        if np.max(np.abs(nxt - v)) < _POWER_TOL:
            return nxt
        v = nxt
    return v


def stationary_distribution(m, rank_tol=DEFAULT.stationary_rank):
    """Unique normalized left fixed vector of ``m``.

    Raises :class:`NonUniqueStationaryError` when the second-smallest
    singular value of ``M - I`` is below ``rank_tol``.
    """
    m = check_stochastic(m)
    n = m.shape[0]
    sv = np.linalg.svd(m - np.eye(n), compute_uv=False)
    if sv[-2] < rank_tol:
        raise NonUniqueStationaryError(
            f"fixed-vector space has dimension > 1 (second-smallest singular value {sv[-2]:.3g})"
        )
    # (M^T - I) v = 0 with sum(v) = 1, solved as an overdetermined system
    system = np.vstack([m.T - np.eye(n), np.ones(n)])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    if np.linalg.cond(system) < _COND_LIMIT:
        v = np.linalg.lstsq(system, rhs, rcond=None)[0]
    else:
        v = _power_iteration(m)
    v = np.clip(v, 0.0, None)
    return v / v.sum()


def stationary_payoffs(p, q, noise, payoffs, rank_tol=DEFAULT.stationary_rank):
    """Long-run payoffs (s_X, s_Y) from the stationary distribution."""
    expected = resolve_expected(payoffs, noise)
    v = stationary_distribution(build_transition_matrix(p, q, noise), rank_tol)
    total = v.sum()
    return float(v @ expected.u_x / total), float(v @ expected.u_y / total)


def spectral_gap(m):
    """1 - |lambda_2|, where lambda_2 has the second-largest modulus."""
    moduli = np.sort(np.abs(np.linalg.eigvals(check_stochastic(m))))[::-1]
    return float(1.0 - moduli[1])
