import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noisyzd import (
    InvalidParameterError,
    NoiseModel,
    PDOrderingError,
    SingularNoiseError,
    StagePayoffs,
    build_signal_distribution,
    expected_stage_payoffs,
)
from noisyzd.game_model import STATES, SIGNAL_PROFILES, closed_form_payoffs


def test_noise_free_signals_are_exact():
    dist = build_signal_distribution(NoiseModel.noise_free())
    assert dist.prob("CC", "gg") == 1.0
    assert dist.prob("CC", "gb") == dist.prob("CC", "bg") == dist.prob("CC", "bb") == 0.0
    # each player always sees the other's true action
    assert dist.prob("CD", "bg") == 1.0
    assert dist.prob("DC", "gb") == 1.0
    assert dist.prob("DD", "bb") == 1.0


def test_table_pattern():
    dist = build_signal_distribution(NoiseModel(0.9, 0.04, 0.02))
    assert dist.prob("CC", "gb") == pytest.approx(0.04)
    assert dist.prob("DC", "bg") == pytest.approx(0.02)
    expected = {
        "CC": [[0.9, 0.04], [0.04, 0.02]],
        "CD": [[0.04, 0.02], [0.9, 0.04]],
        "DC": [[0.04, 0.9], [0.02, 0.04]],
        "DD": [[0.02, 0.04], [0.04, 0.9]],
    }
    for i, state in enumerate(STATES):
        np.testing.assert_allclose(dist.table[i], expected[state])


def test_probs_mapping_covers_all_pairs():
    probs = build_signal_distribution(NoiseModel(0.9, 0.04, 0.02)).probs
    assert len(probs) == 16
    for state in STATES:
        assert sum(probs[(state, w)] for w in SIGNAL_PROFILES) == pytest.approx(1.0, abs=1e-12)


noise_pairs = st.tuples(
    st.floats(0.0, 0.2), st.floats(0.0, 0.2)
).filter(lambda er: 2 * er[0] + er[1] < 0.9)


@given(noise_pairs)
def test_signal_rows_normalized(er):
    dist = build_signal_distribution(NoiseModel.from_pair(*er))
    np.testing.assert_allclose(dist.table.sum(axis=(1, 2)), 1.0, atol=1e-12)


@given(noise_pairs, st.floats(0.05, 3.0), st.floats(0.05, 3.0))
def test_brute_force_matches_closed_form(er, G, L):
    payoffs = StagePayoffs(G, L)
    noise = NoiseModel.from_pair(*er)
    got = expected_stage_payoffs(payoffs, noise)
    want = closed_form_payoffs(payoffs, noise.strength)
    np.testing.assert_allclose(got.as_tuple(), want.as_tuple(), atol=1e-12)


@settings(max_examples=50)
@given(st.floats(0.0, 0.3), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_payoffs_depend_only_on_strength(s, share1, share2):
    payoffs = StagePayoffs(0.7, 0.3)
    a = expected_stage_payoffs(payoffs, NoiseModel.from_strength(s, share1))
    b = expected_stage_payoffs(payoffs, NoiseModel.from_strength(s, share2))
    np.testing.assert_allclose(a.as_tuple(), b.as_tuple(), atol=1e-12)


def test_marginals_depend_only_on_strength():
    s = 0.12
    for share in (0.5, 0.7, 1.0):
        table = build_signal_distribution(NoiseModel.from_strength(s, share)).table
        x_marginal = table.sum(axis=2)
        y_marginal = table.sum(axis=1)
        np.testing.assert_allclose(x_marginal, [[1 - s, s], [s, 1 - s], [1 - s, s], [s, 1 - s]])
        np.testing.assert_allclose(y_marginal, [[1 - s, s], [1 - s, s], [s, 1 - s], [s, 1 - s]])


@pytest.mark.parametrize(
    "s, want",
    [
        (0.0, (1.0, -0.5, 1.5, 0.0)),
        (0.14, (0.79, -0.29, 1.29, 0.21)),
        (0.06, (0.91, -0.41, 1.41, 0.09)),
    ],
)
def test_expected_payoff_values(s, want):
    got = expected_stage_payoffs(StagePayoffs(0.5, 0.5), NoiseModel.from_strength(s))
    np.testing.assert_allclose(got.as_tuple(), want, atol=1e-12)


def test_noise_free_limit_is_classic_pd():
    got = expected_stage_payoffs(StagePayoffs(1.3, 0.4), NoiseModel.noise_free())
    assert got.as_tuple() == (1.0, -0.4, 2.3, 0.0)


def test_brute_force_sum_by_hand():
    # explicit enumeration, independent of the table layout
    noise = NoiseModel(0.8, 0.07, 0.06)
    payoffs = StagePayoffs(0.5, 0.5)
    correct = {"C": "g", "D": "b"}
    err = {"g": "b", "b": "g"}
    prob = {(False, False): noise.tau, (True, False): noise.epsilon,
            (False, True): noise.epsilon, (True, True): noise.r}
    got = expected_stage_payoffs(payoffs, noise)
    for state, value in zip(STATES, got.as_tuple()):
        total = 0.0
        for ex, ey in itertools.product((False, True), repeat=2):
            wx = correct[state[1]]
            wx = err[wx] if ex else wx
            total += prob[(ex, ey)] * payoffs.realized(state[0], wx)
        assert value == pytest.approx(total, abs=1e-14)


def test_pd_ordering_flagged():
    # with heavy noise R_E < P_E
    bad = expected_stage_payoffs(StagePayoffs(0.5, 0.5), NoiseModel.from_strength(0.4))
    assert not bad.is_pd
    with pytest.raises(PDOrderingError):
        expected_stage_payoffs(StagePayoffs(0.5, 0.5), NoiseModel.from_strength(0.4), require_pd=True)


@pytest.mark.parametrize("args", [(0.5, 0.3, 0.0), (1.1, -0.05, 0.0), (0.9, 0.05, 0.05)])
def test_invalid_noise_rejected(args):
    with pytest.raises(InvalidParameterError):
        NoiseModel(*args)


def test_tau_equal_r_is_singular():
    with pytest.raises(SingularNoiseError):
        NoiseModel(0.25, 0.25, 0.25)


def test_default_split_keeps_ordering():
    n = NoiseModel.from_strength(0.3)
    assert n.tau > n.epsilon > n.r > 0
    assert n.epsilon == pytest.approx(0.2)


@pytest.mark.parametrize("G, L", [(0.0, 1.0), (1.0, -0.5)])
def test_stage_payoffs_must_be_positive(G, L):
    with pytest.raises(InvalidParameterError):
        StagePayoffs(G, L)


def test_realized_mapping():
    u = StagePayoffs(0.5, 0.25)
    assert [u.realized(a, w) for a, w in [("C", "g"), ("C", "b"), ("D", "g"), ("D", "b")]] == [
        1.0, -0.25, 1.5, 0.0,
    ]
