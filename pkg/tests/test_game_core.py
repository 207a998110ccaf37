from fractions import Fraction as F

import pytest

from gameminer.errors import ContractError, DimensionError
from gameminer.game_core import (
    A, B,
    Contract, Game, MixedStrategy,
    action_payoffs, apply_contract, apply_contracts, apply_two, describe_profile,
    dominant_strategies, dominant_strategy, expected_payoff, expected_transfer,
    is_nash, null_contract, other, own_view, payoff_spread, profile_of,
    pure_best_responses, pure_profile, shift_contract, to_scalar,
)


def test_to_scalar_is_exact():
    assert to_scalar(0.1) == F(1, 10)
    assert to_scalar("2.01") == F(201, 100)
    assert to_scalar("3/2") == F(3, 2)


def test_game_shape_and_default_labels():
    g = Game([[1, 2, 3], [4, 5, 6]], [[0, 0, 0], [0, 0, 0]])
    assert g.shape == (2, 3)
    assert g.row_labels == ("0", "1")
    assert g.col_labels == ("0", "1", "2")
    assert isinstance(g.payoff_A[0][0], F)


def test_game_rejects_ragged_matrices():
    with pytest.raises(DimensionError) as e:
        Game([[1, 2], [3]], [[0, 0], [0, 0]])
    assert e.value.axis == "column"
    with pytest.raises(DimensionError):
        Game([[1, 2]], [[0, 0], [0, 0]])
    with pytest.raises(DimensionError):
        Game([[1]], [[1]], ("x", "y"))


def test_mixed_strategy_validation():
    with pytest.raises(ValueError):
        MixedStrategy(A, (F(1, 2), F(1, 3)))
    with pytest.raises(ValueError):
        MixedStrategy(A, (F(3, 2), F(-1, 2)))
    s = MixedStrategy(B, ("1/4", "3/4"))
    assert s.support == (0, 1)
    assert not s.is_pure


def test_other():
    assert other(A) == B
    assert other(B) == A
    with pytest.raises(ValueError):
        other("G")


def test_expected_payoff_cell_phone(cell_phone):
    g = cell_phone.game
    prof = profile_of((F(2, 3), F(1, 3)), (0, 1))
    assert expected_payoff(g, prof, A) == F(5, 3)
    assert expected_payoff(g, prof, B) == F(1, 3)


def test_own_view_transposes_for_b():
    g = Game([[1, 2], [3, 4]], [[5, 6], [7, 8]])
    assert own_view(g, A) == g.payoff_A
    assert own_view(g, B) == ((5, 7), (6, 8))


def test_best_responses_and_nash(cell_phone):
    g = cell_phone.game
    assert pure_best_responses(g, A, MixedStrategy.pure(B, 2, 1)) == {0}
    # B is indifferent against (2/3, 1/3)
    assert pure_best_responses(g, B, MixedStrategy(A, (F(2, 3), F(1, 3)))) == {0, 1}
    assert action_payoffs(g, B, MixedStrategy(A, (F(2, 3), F(1, 3)))) == (F(1, 3), F(1, 3))
    assert is_nash(g, pure_profile(g, 0, 0))
    assert not is_nash(g, pure_profile(g, 1, 1))


def test_action_payoffs_rejects_own_strategy():
    g = Game([[1]], [[1]])
    with pytest.raises(ValueError):
        action_payoffs(g, A, MixedStrategy.pure(A, 1, 0))


def test_apply_two_subtracts_transfers(cell_phone):
    g = cell_phone.game
    post = apply_contract(g, cell_phone.contract("eps100"))
    assert post.effective.payoff_A == ((F(-1, 2), F(151, 100)), (0, F(3, 2)))
    assert post.effective.payoff_B == g.payoff_B
    assert post.contract_B is None


def test_apply_two_checks_payers_and_shapes(cell_phone):
    g = cell_phone.game
    cA = null_contract(g, A)
    with pytest.raises(ContractError):
        apply_two(g, None, cA)
    with pytest.raises(ContractError):
        apply_contracts(g, [cA, cA])
    with pytest.raises(DimensionError):
        apply_two(g, Contract(A, [[1, 2, 3], [4, 5, 6]]), None)
    with pytest.raises(ContractError):
        Contract("G", [[0]])


def test_expected_transfer_and_shift():
    c = Contract(A, [[1, 2], [3, 4]])
    prof = profile_of((F(1, 2), F(1, 2)), (1, 0))
    assert expected_transfer(c, prof) == 2
    assert expected_transfer(shift_contract(c, F(1, 3)), prof) == F(7, 3)
    assert expected_transfer(None, prof) == 0


def test_dominance_modes(sequential):
    g = sequential.game
    assert dominant_strategy(g, B, "strict") == 0
    assert dominant_strategy(g, A, "strict") is None
    weak = Game([[1, 0], [0, 1]], [[1, 1], [0, 1]])
    assert dominant_strategy(weak, B, "strict") is None
    assert dominant_strategies(weak, B, "weak") == (1,)
    with pytest.raises(ValueError):
        dominant_strategies(weak, B, "very")


def test_payoff_spread(aggregate_flow):
    assert payoff_spread(aggregate_flow.game) == 5


def test_describe_profile(cell_phone):
    g = cell_phone.game
    assert describe_profile(g, pure_profile(g, 0, 1)) == "(H, L)"
    assert describe_profile(g, profile_of((F(2, 3), F(1, 3)), (0, 1))) == "((2/3,1/3), L)"


def test_profile_key_prefers_low_index_mass():
    first = profile_of((1, 0), (1, 0))
    mixed = profile_of((F(1, 2), F(1, 2)), (1, 0))
    last = profile_of((0, 1), (0, 1))
    assert sorted([last, mixed, first], key=lambda p: p.key()) == [first, mixed, last]
