from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from gameminer.bargaining import (
    MenuParams, StrategyMap,
    both_contracts_equilibrium, compare_restriction, dual_offer_profit_bound, generate_candidate_menu,
    one_contract_equilibrium, spe_payment_upper_bound, synthesize_dual_offer,
)
from gameminer.equilibrium import enumerate_nash, grid_oracle_points
from gameminer.game_core import (
    A, B, Contract, Game, apply_contract, expected_payoff, expected_transfer,
    is_nash, profile_of, shift_contract,
)
from gameminer.mining import NO_STRICT, grid_maxagg, maxagg, min_best_response_payoff, mining_feasibility

SETTINGS = settings(max_examples=100, deadline=None)
HEAVY = settings(max_examples=50, deadline=None)

small = st.integers(min_value=-4, max_value=4)


def matrices(rows, cols, values=small):
    return st.lists(st.lists(values, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


@st.composite
def games(draw, rows=2, cols=2):
    return Game(draw(matrices(rows, cols)), draw(matrices(rows, cols)))


@st.composite
def mixed(draw, n):
    weights = draw(st.lists(st.integers(min_value=0, max_value=6), min_size=n, max_size=n))
    assume(sum(weights) > 0)
    return tuple(F(w, sum(weights)) for w in weights)


def _spread(game):
    vals = [v for m in (game.payoff_A, game.payoff_B) for row in m for v in row]
    return max(vals) - min(vals)


@SETTINGS
@given(games(3, 3), small)
def test_equilibria_are_exact_best_responses(game, c):
    eqs = enumerate_nash(game)
    assert all(is_nash(game, e) for e in eqs)
    assert enumerate_nash(game.shifted(c, -c)) == eqs


@SETTINGS
@given(games(2, 3), matrices(2, 3), st.fractions(min_value=-5, max_value=5, max_denominator=7))
def test_shifted_contract_keeps_equilibria(game, transfers, x):
    c = Contract(A, transfers)
    post = apply_contract(game, c)
    shifted = apply_contract(game, shift_contract(c, x))
    eqs = enumerate_nash(post.effective)
    assert enumerate_nash(shifted.effective) == eqs
    for e in eqs:
        assert expected_payoff(shifted.effective, e, A) == expected_payoff(post.effective, e, A) - x
        assert expected_payoff(shifted.effective, e, B) == expected_payoff(post.effective, e, B)


@SETTINGS
@given(games(2, 3), mixed(2), mixed(3), st.fractions(min_value=0, max_value=1))
def test_payoffs_are_bilinear(game, x1, y, t):
    x0 = (1, 0)
    blend = tuple(t * a + (1 - t) * b for a, b in zip(x1, x0))
    lhs = expected_payoff(game, profile_of(blend, y), A)
    rhs = t * expected_payoff(game, profile_of(x1, y), A) + (1 - t) * expected_payoff(game, profile_of(x0, y), A)
    assert lhs == rhs


@pytest.mark.slow
@HEAVY
@given(games(3, 3), st.integers(min_value=0, max_value=2), st.lists(matrices(3, 3), min_size=50, max_size=50))
def test_strict_dominance_blocks_single_contract_gain(game, col, contracts):
    # make col strictly dominant for B
    UB = [[v + (9 if j == col else 0) for j, v in enumerate(row)] for row in game.payoff_B]
    g = game.with_payoffs(game.payoff_A, UB)
    assert mining_feasibility(g, A).feasible == NO_STRICT
    assert maxagg(g, A).value == max(row[col] for row in g.payoff_A)
    best_base = max(expected_payoff(g, e, A) for e in enumerate_nash(g))
    for transfers in contracts:
        c = Contract(A, transfers)
        post = apply_contract(g, c)
        for e in enumerate_nash(post.effective):
            gain = expected_payoff(post.effective, e, A) - best_base
            assert not (gain > 0 and expected_transfer(c, e) > 0)


@SETTINGS
@given(games(2, 2))
def test_equilibrium_payoffs_between_bounds(game):
    for e in enumerate_nash(game):
        assert min_best_response_payoff(game, A) <= expected_payoff(game, e, A) <= maxagg(game, A).value
    assert grid_maxagg(game, A, 6) <= maxagg(game, A).value


@SETTINGS
@given(games(2, 2))
def test_grid_maxagg_close_to_lp(game):
    n = 200
    for p in (A, B):
        gap = maxagg(game, p).value - grid_maxagg(game, p, n)
        assert 0 <= gap <= 2 * _spread(game) / n


@pytest.mark.slow
@HEAVY
@given(games(3, 3))
def test_grid_maxagg_on_three_actions(game):
    n = 200
    for p in (A, B):
        best = maxagg(game, p)
        gap = best.value - grid_maxagg(game, p, n)
        assert gap >= 0
        # a witness on the grid is found exactly
        if all((q * n).denominator == 1 for q in best.witness.of(p).probs):
            assert gap == 0


@pytest.mark.slow
@SETTINGS
@given(st.one_of(games(2, 2), games(2, 3), games(3, 3)))
def test_grid_oracle_agrees_with_enumeration(game):
    n = 60
    hits = grid_oracle_points(game, n)
    for e in enumerate_nash(game):
        d = hits.distance_to(e)
        assert d is not None and d <= F(1, n)


@HEAVY
@given(games(2, 2))
def test_one_contract_conserves_and_respects_bound(game):
    menu = generate_candidate_menu(game, MenuParams(steps=2))
    out = one_contract_equilibrium(game, menu)
    base = expected_payoff(game, out.final_profile, A) + expected_payoff(game, out.final_profile, B)
    assert out.payoff_A + out.payoff_B + out.payoff_G == base
    assert out.payoff_G == expected_transfer(out.contract_A, out.final_profile) + \
        expected_transfer(out.contract_B, out.final_profile)
    assert 0 <= out.payoff_G <= spe_payment_upper_bound(game)


@HEAVY
@given(st.one_of(games(2, 2), games(2, 3)))
def test_restriction_never_hurts_the_miner(game):
    menu = generate_candidate_menu(game, MenuParams(steps=2))
    restricted, unrestricted, ok = compare_restriction(game, menu, StrategyMap())
    assert ok and restricted >= unrestricted
    out = both_contracts_equilibrium(game, menu)
    out.check_conservation(game)
    assert out.payoff_G == unrestricted


@HEAVY
@given(games(2, 2))
def test_dual_offer_within_bound(game):
    dual = synthesize_dual_offer(game)
    if dual is None:
        return
    assert 0 < dual.miner_profit <= dual_offer_profit_bound(game)
    assert all(dual.accept_dominant)
