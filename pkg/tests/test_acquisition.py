import numpy as np
import pytest
from hypothesis import given, strategies as st

from sawei.acquisition import (
    ConfidenceCoefficient,
    HedgeState,
    beta_t,
    default_portfolio_arms,
    eval_bounds,
    eval_ei,
    eval_pi,
    eval_wei,
    hedge_probabilities,
    hedge_select,
    hedge_update,
    standard_normal,
)
from sawei.errors import DomainError

finite = st.floats(min_value=-50, max_value=50)
pos_std = st.floats(min_value=1e-6, max_value=50)


def test_standard_normal_reference_values():
    pdf, cdf = standard_normal(0.0)
    assert pdf == pytest.approx(0.398942, abs=1e-6)
    assert cdf == 0.5
    pdf, cdf = standard_normal(8.0)
    assert pdf < 1e-12 and cdf == pytest.approx(1.0, abs=1e-12)
    _, cdf = standard_normal(-1.959964)
    assert cdf == pytest.approx(0.025000, abs=1e-6)


def test_wei_reference_values():
    assert eval_wei(0.0, 1.0, 0.0, 0.5) == pytest.approx(0.199471, abs=1e-6)
    assert eval_wei(0.0, 1.0, 0.0, 1.0) == 0.0
    assert eval_wei(0.0, 2.0, 2.0, 0.3) == pytest.approx(0.843566, abs=1e-6)


def test_ei_reference_values():
    assert eval_ei(0.0, 1.0, 0.0) == pytest.approx(0.398942, abs=1e-6)
    assert eval_ei(1.0, 0.0, 5.0) == 0.0
    assert eval_ei(0.0, 2.0, 2.0) == pytest.approx(2.166631, abs=1e-5)


def test_pi_reference_values():
    assert eval_pi(0.0, 1.0, 0.0) == 0.5
    assert eval_pi(50.0, 1.0, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert eval_pi(0.0, 1.0, 1.0) == pytest.approx(0.841345, abs=1e-6)
    # degenerate posterior: step on the mean
    assert eval_pi(1.0, 0.0, 0.5) == 0.0
    assert eval_pi(0.5, 0.0, 0.5) == 1.0


@given(mean=finite, std=pos_std, f_min=finite)
def test_wei_half_is_ei_over_two(mean, std, f_min):
    assert abs(eval_wei(mean, std, f_min, 0.5) - eval_ei(mean, std, f_min) / 2) <= 1e-12


@given(mean=finite, std=pos_std, f_min=finite,
       a=st.floats(min_value=0, max_value=1), b=st.floats(min_value=0, max_value=1))
def test_wei_affine_in_alpha(mean, std, f_min, a, b):
    mid = 0.5 * (a + b)
    lhs = eval_wei(mean, std, f_min, mid)
    rhs = 0.5 * (eval_wei(mean, std, f_min, a) + eval_wei(mean, std, f_min, b))
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)


@given(mean=finite, std=st.floats(min_value=0, max_value=50), f_min=finite)
def test_ranges(mean, std, f_min):
    assert eval_ei(mean, std, f_min) >= 0
    assert eval_wei(mean, std, f_min, 0.0) >= 0
    assert 0.0 <= eval_pi(mean, std, f_min) <= 1.0


def test_beta_t_values():
    assert beta_t(ConfidenceCoefficient(d=1, t=1)) == 0.0
    assert beta_t(ConfidenceCoefficient(d=8, t=1)) == pytest.approx(4.158883, abs=1e-6)
    assert beta_t(ConfidenceCoefficient(d=8, t=16)) == pytest.approx(15.249238, abs=1e-6)
    with pytest.raises(DomainError):
        beta_t(ConfidenceCoefficient(d=1, t=1, beta=2.0))


def test_eval_bounds():
    assert eval_bounds(1.0, 0.5, 2.0) == (2.0, 0.0)
    assert eval_bounds(3.0, 0.0, 10.0) == (3.0, 3.0)
    ucb, lcb = eval_bounds(0.0, 1.0, 4.158883)
    assert ucb == pytest.approx(4.158883) and lcb == pytest.approx(-4.158883)
    assert ucb >= lcb


def test_hedge_probabilities():
    state = HedgeState(eta=1.0, gains=np.array([1.0, 0.0]),
                       arms=default_portfolio_arms()[:2])
    p = hedge_probabilities(state)
    assert p[0] == pytest.approx(0.731059, abs=1e-6)
    assert p.sum() == pytest.approx(1.0, abs=1e-12)

    uniform = HedgeState(eta=1.0, gains=np.zeros(9))
    assert np.allclose(hedge_probabilities(uniform), 1 / 9, atol=1e-12)

    sharp = HedgeState(eta=100.0, gains=np.array([1.0, 0.0]),
                       arms=default_portfolio_arms()[:2])
    assert hedge_probabilities(sharp)[0] > 1 - 1e-6


def test_hedge_shift_invariance():
    rng = np.random.default_rng(0)
    gains = rng.normal(size=9)
    p1 = hedge_probabilities(HedgeState(eta=1.3, gains=gains))
    p2 = hedge_probabilities(HedgeState(eta=1.3, gains=gains + 17.5))
    assert np.max(np.abs(p1 - p2)) <= 1e-9


def test_hedge_update_additive():
    state = HedgeState(eta=1.0, gains=np.zeros(2), arms=default_portfolio_arms()[:2])
    state = hedge_update(state, [1.0, -1.0])
    assert np.array_equal(state.gains, [1.0, -1.0])
    same = hedge_update(state, [0.0, 0.0])
    assert np.array_equal(same.gains, state.gains)


def test_hedge_rigged_rounds():
    state = HedgeState(eta=1.0, gains=np.zeros(2), arms=default_portfolio_arms()[:2])
    for _ in range(50):
        state = hedge_update(state, [1.0, 0.0])
    assert hedge_probabilities(state)[0] > 0.8


def test_hedge_select_deterministic_given_rng():
    state = HedgeState(eta=1.0, gains=np.array([0.3, -0.2, 0.1]),
                       arms=default_portfolio_arms()[:3])
    picks1 = [hedge_select(state, np.random.default_rng(9)) for _ in range(5)]
    picks2 = [hedge_select(state, np.random.default_rng(9)) for _ in range(5)]
    assert picks1 == picks2
