"""Zero-determinant strategies for repeated Prisoner's Dilemma games with perception noise."""

from .errors import (
    DegenerateChainError,
    DegeneratePinError,
    InfeasibleError,
    InternalConsistencyError,
    InvalidParameterError,
    NonUniqueStationaryError,
    PDOrderingError,
    SingularNoiseError,
)
from .game_model import (
    ExpectedPayoffs,
    NoiseModel,
    StagePayoffs,
    build_signal_distribution,
    expected_stage_payoffs,
)
from .markov import (
    MemoryOneStrategy,
    build_transition_matrix,
    spectral_gap,
    stationary_distribution,
    stationary_payoffs,
)
from .policy import DEFAULT, Tolerances
from .scan import scan_extortion, scan_pinning
from .sim_oracle import SimConfig, SimResult, simulate
from .synthesis import (
    ExtortionSpec,
    PinningSolution,
    fullcoop_payoffs,
    max_phi,
    pinning_strategy,
    solve_nzd,
    strong_extortion_feasibility,
    weak_extortion_strategy,
)
from .zd_core import (
    LinearRelation,
    determinant_payoffs,
    determinant_score,
    effective_column_x,
    effective_column_y,
    verify_linear_relation,
)

__version__ = "0.1.0"
