"""Numeric tolerances shared by the library, the tests and the CLI."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    # max |effective column - target| for a relation to count as enforced
    residual: float = 1e-9
    # determinant route vs eigenvector route
    oracle: float = 1e-8
    # |D(p, q, 1)| below this is a degenerate chain
    singular: float = 1e-12
    # slack on [0, 1] before a probability is rejected (then clamped)
    feasibility: float = 1e-9
    # second-smallest singular value of M - I below this => non-unique
    stationary_rank: float = 1e-9
    # Delta-boundary bisection width
    bisection: float = 1e-6
    # pinned_sY vs determinant_score against a random opponent
    pin_crosscheck: float = 1e-7

    def override(self, **changes):
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


DEFAULT = Tolerances()
