"""Monte Carlo play of the noisy repeated game.

Each stage consumes exactly three uniforms from a single PCG64 stream, in
the order (signal profile, X's next action, Y's next action).  When the
initial state is given as cooperation probabilities, two extra uniforms
(X then Y) are drawn before stage 1.
"""

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .errors import InvalidParameterError
from .game_model import STATES, build_signal_distribution
from .markov import as_strategy

_CHUNK = 1 << 16


@dataclass(frozen=True)
class SimConfig:
    p: object
    q: object
    noise: object
    payoffs: object  # StagePayoffs
    stages: int = 10**6
    seed: int = 0
    initial_state: Union[str, Tuple[float, float]] = "CC"
    batches: int = 100
    burn_in: float = 0.01

    def __post_init__(self):
        if int(self.stages) < 1:
            raise InvalidParameterError("stages must be >= 1")
        if not 0.0 <= self.burn_in < 1.0:
            raise InvalidParameterError("burn_in must be in [0, 1)")
        if isinstance(self.initial_state, str) and self.initial_state not in STATES:
            raise InvalidParameterError(f"unknown initial state {self.initial_state!r}")


@dataclass(frozen=True)
class SimResult:
    mean_x: float
    mean_y: float
    se_x: float
    se_y: float
    occupancy: Tuple[float, float, float, float]
    recorded_stages: int

    def as_dict(self):
        return {
            "mean_x": self.mean_x,
            "mean_y": self.mean_y,
            "se_x": self.se_x,
            "se_y": self.se_y,
            "occupancy": list(self.occupancy),
            "recorded_stages": self.recorded_stages,
        }


def _batch_se(values, batches):
    n = len(values)
    k = min(batches, n)
    if k < 2:
        return 0.0
    means = np.array([chunk.mean() for chunk in np.array_split(values, k)])
    return float(means.std(ddof=1) / np.sqrt(k))


def _initial_state(config, rng):
    if isinstance(config.initial_state, str):
        return STATES.index(config.initial_state)
    x0, y0 = config.initial_state
    ux, uy = rng.random(2)
    return (0 if ux < x0 else 2) + (0 if uy < y0 else 1)


def simulate(config):
    """Play ``config.stages`` stages and report batch-means statistics.

    The first ``burn_in`` fraction of stages is discarded before computing
    the means, the standard errors and the state occupancy.
    """
    p = as_strategy(config.p).to_list()
    q = as_strategy(config.q).to_list()
    table = build_signal_distribution(config.noise).table
    # cumulative thresholds over signal profiles gg, gb, bg, bb per state
    cum = [np.cumsum(table[a].ravel())[:3].tolist() for a in range(4)]
    realized = config.payoffs.by_outcome()

    rng = np.random.Generator(np.random.PCG64(config.seed))
    state = _initial_state(config, rng)
    n = int(config.stages)
    # code = 4 * state + signal profile, enough to recover both payoffs
    codes = bytearray(n)
    t = 0
    while t < n:
        size = min(_CHUNK, n - t)
        draws = rng.random((size, 3)).tolist()
        for u_sig, u_x, u_y in draws:
            c0, c1, c2 = cum[state]
            k = 0 if u_sig < c0 else 1 if u_sig < c1 else 2 if u_sig < c2 else 3
            codes[t] = 4 * state + k
            ox = (state & 2) | (k >> 1)  # X's private outcome index
            oy = ((state & 1) << 1) | (k & 1)
            state = (0 if u_x < p[ox] else 2) + (0 if u_y < q[oy] else 1)
            t += 1

    codes = np.frombuffer(bytes(codes), dtype=np.uint8)[int(config.burn_in * n):].astype(np.intp)
    states = codes // 4
    signals = codes % 4
    out_x = (states & 2) | (signals >> 1)
    out_y = ((states & 1) << 1) | (signals & 1)
    pay_x = realized[out_x]
    pay_y = realized[out_y]
    occupancy = np.bincount(states, minlength=4) / states.size
    return SimResult(
        mean_x=float(pay_x.mean()),
        mean_y=float(pay_y.mean()),
        se_x=_batch_se(pay_x, config.batches),
        se_y=_batch_se(pay_y, config.batches),
        occupancy=tuple(float(x) for x in occupancy),
        recorded_stages=int(states.size),
    )
