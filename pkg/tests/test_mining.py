from fractions import Fraction as F

import pytest

from gameminer import mining
from gameminer.equilibrium import EquilibriumSet, unique_nash
from gameminer.errors import BestResponseError, ContractError, UniquenessError
from gameminer.game_core import (
    A, B, Contract, Game, apply_contract, expected_payoff, expected_transfer,
    own_view, profile_of, pure_profile,
)
from gameminer.mining import (
    FEASIBLE, NO_STRICT, NO_WEAK,
    SynthesisParams, aggregate_payoff_set, best_response_region_lp, column_optima,
    grid_maxagg, maxagg, maxminagg, min_best_response_payoff, mining_feasibility,
    synthesize_contract, synthesize_epsilon_contract, synthesize_indifference_contract,
)

THIRDS = (F(2, 3), F(1, 3))


def test_best_response_region_lp(cell_phone):
    g = cell_phone.game
    # B's reply L needs at least 1/3 on A's L
    res = best_response_region_lp([2, 1], own_view(g, B), 1, "max")
    assert res.value == F(5, 3)
    assert res.point == THIRDS


def test_maxagg_cell_phone(cell_phone):
    g = cell_phone.game
    assert [o.value for o in column_optima(g, A)] == [1, F(5, 3)]
    best = maxagg(g, A)
    assert best.value == F(5, 3)
    assert best.witness == profile_of(THIRDS, (0, 1))
    assert best.contract.payer == A
    assert best.contract.transfers == ((F(-2, 3), F(1, 3)), (F(-5, 3), F(-2, 3)))
    assert maxagg(g, B).value == F(1, 2)


def test_maxagg_aggregate_flow(aggregate_flow):
    g = aggregate_flow.game
    a = maxagg(g, A)
    assert a.value == 2
    assert a.witness == pure_profile(g, 2, 2)
    b = maxagg(g, B)
    assert b.value == 2
    assert b.witness == pure_profile(g, 0, 0)
    # x is never a best reply for B
    assert len(column_optima(g, A)) == 2


def test_min_best_response_payoff(cell_phone, aggregate_flow):
    assert min_best_response_payoff(cell_phone.game, A) == 1
    assert min_best_response_payoff(cell_phone.game, B) == F(1, 3)
    assert min_best_response_payoff(aggregate_flow.game, A) == -1


def test_grid_maxagg_matches_lp_on_grid_witness(cell_phone):
    assert grid_maxagg(cell_phone.game, A, 60) == F(5, 3)
    assert grid_maxagg(cell_phone.game, A, 10) <= F(5, 3)


def test_aggregate_payoff_set_checks_payer(cell_phone):
    g = cell_phone.game
    with pytest.raises(ContractError):
        aggregate_payoff_set(g, cell_phone.contract("eps100"), B)
    outs = aggregate_payoff_set(g, cell_phone.contract("eps100"), A)
    assert len(outs) == 1
    assert outs[0].value == expected_payoff(g, outs[0].witness, A)


def test_indifference_contract(cell_phone):
    g = cell_phone.game
    c = synthesize_indifference_contract(g, A, F(1, 2), pure_profile(g, 0, 0))
    assert c.transfers == ((F(1, 2), F(3, 2)), (F(-1, 2), F(1, 2)))
    post = apply_contract(g, c)
    assert set(v for row in post.effective.payoff_A for v in row) == {F(1, 2)}
    with pytest.raises(BestResponseError):
        synthesize_indifference_contract(g, A, 1, pure_profile(g, 1, 0))


def test_epsilon_contract_cell_phone(cell_phone):
    g = cell_phone.game
    ec = synthesize_epsilon_contract(g, A, F(1, 100))
    assert ec.certificate == profile_of(THIRDS, (F(1, 51), F(50, 51)))
    assert ec.value == F(28, 17)
    assert ec.K == 4
    assert ec.value >= maxagg(g, A).value - ec.K * ec.epsilon
    assert expected_transfer(ec.contract, ec.certificate) == 0
    assert unique_nash(apply_contract(g, ec.contract).effective) == ec.certificate


def test_epsilon_contract_converges(cell_phone):
    g = cell_phone.game
    coarse = synthesize_epsilon_contract(g, A, F(1, 10))
    fine = synthesize_epsilon_contract(g, A, F(1, 1000))
    assert coarse.value < fine.value < F(5, 3)


def test_epsilon_contract_pure_witness(cell_phone):
    g = cell_phone.game
    ec = synthesize_epsilon_contract(g, B, F(1, 100))
    assert ec.certificate == pure_profile(g, 0, 0)
    assert ec.value == F(1, 2)
    assert ec.K == 0


def test_epsilon_contract_rejects_certificate_off_witness(cell_phone, monkeypatch):
    g = cell_phone.game
    off = EquilibriumSet((pure_profile(g, 0, 0),), degenerate=False, complete=True)
    monkeypatch.setattr(mining, "enumerate_nash", lambda game: off)
    with pytest.raises(UniquenessError) as e:
        synthesize_epsilon_contract(g, A, F(1, 100))
    assert "witness" in str(e.value)
    assert e.value.equilibria == off.equilibria


def test_epsilon_contract_needs_tie_pattern(aggregate_flow):
    with pytest.raises(UniquenessError) as e:
        synthesize_epsilon_contract(aggregate_flow.game, A, F(1, 100))
    assert e.value.equilibria


def test_epsilon_must_be_positive(cell_phone):
    with pytest.raises(ValueError):
        synthesize_epsilon_contract(cell_phone.game, A, 0)
    with pytest.raises(ValueError):
        SynthesisParams(epsilon=-1)


def test_eps100_contract_limit_split(cell_phone):
    g = cell_phone.game
    eps100 = cell_phone.contract("eps100")
    post = apply_contract(g, eps100)
    assert unique_nash(post.effective) == profile_of(THIRDS, (F(1, 51), F(50, 51)))
    limit = profile_of(THIRDS, (0, 1))
    assert expected_transfer(eps100, limit) == F(4, 25)
    assert expected_payoff(post.effective, limit, A) == F(113, 75)
    assert expected_payoff(post.effective, limit, B) == F(1, 3)


def test_synthesize_contract_variants(cell_phone):
    g = cell_phone.game
    target = pure_profile(g, 0, 0)
    c = synthesize_contract(g, A, SynthesisParams(target=target))
    assert c.transfers == ((0, 1), (-1, 0))
    ec = synthesize_epsilon_contract(g, A, F(1, 100))
    split = synthesize_contract(g, A, SynthesisParams(division=F(3, 2)))
    post = apply_contract(g, split)
    assert expected_payoff(post.effective, ec.certificate, A) == F(3, 2)
    assert synthesize_contract(g, A, SynthesisParams()) == ec.contract


def test_maxminagg(cell_phone):
    g = cell_phone.game
    flat = maxagg(g, A).contract
    lower, upper = maxminagg(g, A, [flat])
    # the flat contract has a bad equilibrium, so the null contract wins
    assert lower.value == 1
    assert upper == F(5, 3)
    ec = synthesize_epsilon_contract(g, A, F(1, 100))
    lower, _ = maxminagg(g, A, [flat, ec.contract])
    assert lower.value == F(28, 17)
    with pytest.raises(ContractError):
        maxminagg(g, A, [Contract(B, [[0, 0], [0, 0]])])


def test_mining_feasibility(cell_phone, sequential):
    v = mining_feasibility(cell_phone.game, B)
    assert v.feasible == NO_STRICT and v.dominant_action == 0
    assert not v.ok
    assert mining_feasibility(cell_phone.game, A).ok
    assert mining_feasibility(sequential.game, A).feasible == NO_STRICT
    weak = Game([[1, 0], [0, 1]], [[1, 1], [0, 1]])
    assert mining_feasibility(weak, A).feasible == NO_WEAK
    assert mining_feasibility(weak, B).feasible == FEASIBLE
