# gameminer/mining.py
"""
Single-contractor analysis: what one player and the miner can split.

maxagg is the best base payoff a player can reach while the opponent
best-responds; it is attained as an equilibrium by a contract that makes
the payer indifferent everywhere. maxminagg is approached from below by
contracts whose post-contract game has a single equilibrium.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT_EPSILON, EPSILON_PULL
from .equilibrium import compositions, enumerate_nash
from .errors import BestResponseError, ContractError, UniquenessError
from .game_core import (
    A,
    Contract, Game, MixedStrategy, StrategyProfile,
    apply_contract, expected_payoff, expected_transfer, from_own_view,
    dominant_strategy, is_best_response, null_contract, other, own_view,
    payoff_spread, pure_best_responses, shift_contract, to_scalar,
)
from .lp import EQ, GE, LinearProgram, LPResult, solve_lp
from .utils import parallel_map

log = logging.getLogger(__name__)

__all__ = [
    "AggregateOutcome", "SynthesisParams", "MiningVerdict", "EpsilonContract",
    "aggregate_payoff_set", "maxagg", "column_optima", "maxminagg",
    "min_best_response_payoff", "synthesize_indifference_contract",
    "shift_contract", "synthesize_epsilon_contract", "synthesize_contract",
    "mining_feasibility", "grid_maxagg", "best_response_region_lp",
]


# ----------- Types -----------

@dataclass(frozen=True)
class AggregateOutcome:
    value: Fraction
    witness: StrategyProfile
    contract: Contract


@dataclass(frozen=True)
class SynthesisParams:
    epsilon: Fraction = DEFAULT_EPSILON
    division: Optional[Fraction] = None
    target: Optional[StrategyProfile] = None

    def __post_init__(self):
        object.__setattr__(self, "epsilon", to_scalar(self.epsilon))
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.division is not None:
            object.__setattr__(self, "division", to_scalar(self.division))


FEASIBLE = "yes"
NO_STRICT = "no_strict_dominance"
NO_WEAK = "no_weak_dominance_every_NE"


@dataclass(frozen=True)
class MiningVerdict:
    feasible: str
    detail: str
    dominant_action: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.feasible == FEASIBLE


@dataclass(frozen=True)
class EpsilonContract:
    contract: Contract
    certificate: StrategyProfile  # the unique equilibrium of the post-contract game
    value: Fraction               # payer's base payoff there
    K: Fraction                   # value >= maxagg - K*epsilon
    epsilon: Fraction


# ----------- LP over best-response regions -----------

def best_response_region_lp(objective: Sequence[Fraction], responder_view, target: int,
                            sense: str = "max") -> LPResult:
    """Optimize objective·σ over mixed σ such that `target` is a best reply to σ.

    responder_view is the responder's payoffs indexed [own action][mixer action].
    """
    n = len(objective)
    cons = [((Fraction(1),) * n, EQ, Fraction(1))]
    for k, row in enumerate(responder_view):
        if k != target:
            cons.append((tuple(u - w for u, w in zip(responder_view[target], row)), GE, Fraction(0)))
    return solve_lp(LinearProgram(tuple(objective), tuple(cons), sense))


def _profile(game: Game, player: str, own: Sequence[Fraction], opp_action: int) -> StrategyProfile:
    opp = other(player)
    mine = MixedStrategy(player, tuple(own))
    theirs = MixedStrategy.pure(opp, game.actions(opp), opp_action)
    return StrategyProfile(mine, theirs) if player == A else StrategyProfile(theirs, mine)


def column_optima(game: Game, player: str) -> List[AggregateOutcome]:
    """Per opponent pure reply b, the best base payoff with b a best reply; infeasible b skipped."""
    opp = other(player)
    U = own_view(game, player)
    V = own_view(game, opp)
    out = []
    for b in range(game.actions(opp)):
        res = best_response_region_lp([row[b] for row in U], V, b, "max")
        if not res.optimal:
            continue
        witness = _profile(game, player, res.point, b)
        contract = synthesize_indifference_contract(game, player, res.value, witness)
        out.append(AggregateOutcome(res.value, witness, contract))
    return out


def maxagg(game: Game, player: str) -> AggregateOutcome:
    best = None
    for outcome in column_optima(game, player):
        if best is None or outcome.value > best.value:
            best = outcome
    log.debug("maxagg_%s = %s", player, best.value)
    return best


def min_best_response_payoff(game: Game, player: str) -> Fraction:
    """Smallest payoff of `player` over profiles where `player` best-responds."""
    U = own_view(game, player)
    vals = []
    for a in range(game.actions(player)):
        res = best_response_region_lp(U[a], U, a, "min")
        if res.optimal:
            vals.append(res.value)
    return min(vals)


def grid_maxagg(game: Game, player: str, n: int) -> Fraction:
    """Brute-force maxagg over the n-division grid of the player's mixed strategies."""
    opp = other(player)
    X = compositions(game.actions(player), n).astype(object)
    U = np.array(own_view(game, player), dtype=object)
    V = np.array(own_view(game, opp), dtype=object).T  # [own action][opp action]
    replies = X.dot(V)
    own = X.dot(U)
    best = None
    for p in range(len(X)):
        top = max(replies[p])
        for b in range(replies.shape[1]):
            if replies[p][b] == top and (best is None or own[p][b] > best):
                best = own[p][b]
    return Fraction(best) / n


# ----------- Aggregate payoff set / maxminagg -----------

def _check_payer(contract: Contract, player: str):
    if contract.payer != player:
        raise ContractError(f"contract is paid by {contract.payer}, expected {player}")


def aggregate_payoff_set(game: Game, contract: Contract, player: str) -> List[AggregateOutcome]:
    """Base-game payoff of the payer at each equilibrium of the post-contract game."""
    _check_payer(contract, player)
    post = apply_contract(game, contract)
    return [
        AggregateOutcome(expected_payoff(game, eq, player), eq, contract)
        for eq in enumerate_nash(post.effective)
    ]


def _worst(game: Game, contract: Contract, player: str) -> Optional[AggregateOutcome]:
    outs = aggregate_payoff_set(game, contract, player)
    if not outs:
        return None
    return min(outs, key=lambda o: o.value)


def maxminagg(game: Game, player: str, menu: Sequence[Contract]) -> Tuple[AggregateOutcome, Fraction]:
    """(best worst-equilibrium payoff over menu ∪ {null}, maxagg)."""
    contracts = [null_contract(game, player)]
    for c in menu:
        _check_payer(c, player)
        if c not in contracts:
            contracts.append(c)
    worst = parallel_map(lambda c: _worst(game, c, player), contracts)
    lower = None
    for w in worst:
        if w is not None and (lower is None or w.value > lower.value):
            lower = w
    upper = maxagg(game, player).value
    return lower, upper


# ----------- Contract synthesis -----------

def synthesize_indifference_contract(game: Game, player: str, division, target: StrategyProfile) -> Contract:
    """Contract leaving `player` with effective payoff `division` at every outcome.

    The payer is indifferent everywhere, so target is an equilibrium as long
    as the opponent already best-responds to it in the base game.
    """
    opp = other(player)
    if not is_best_response(game, opp, target.of(opp), target.of(player)):
        raise BestResponseError(
            f"target strategy of {opp} is not a best response to {player}'s target strategy"
        )
    flat = Contract(player, game.payoff(player))
    return shift_contract(flat, -to_scalar(division))


def _from_effective(game: Game, player: str, E) -> Contract:
    U = own_view(game, player)
    D = [[u - e for u, e in zip(urow, erow)] for urow, erow in zip(U, E)]
    return Contract(player, from_own_view(tuple(map(tuple, D)), player))


def synthesize_epsilon_contract(game: Game, player: str, epsilon) -> EpsilonContract:
    """Contract with a certified unique equilibrium within K·epsilon of maxagg.

    Pure witness with a unique reply: the witness row gets +epsilon.
    Two-row mixed witness where the opponent ties between the witness column
    and one other column t: one row earns +epsilon on the witness column, the
    other +EPSILON_PULL on t, remaining rows drop by EPSILON_PULL. The
    opponent then puts epsilon/(EPSILON_PULL+epsilon) on t.
    """
    eps = to_scalar(epsilon)
    if eps <= 0:
        raise ValueError(f"epsilon must be > 0, got {eps}")
    opp = other(player)
    best = maxagg(game, player)
    own = best.witness.of(player)
    b_star = best.witness.of(opp).support[0]
    U = own_view(game, player)
    V = own_view(game, opp)
    m, n = game.actions(player), game.actions(opp)
    replies = pure_best_responses(game, opp, own)
    zero = Fraction(0)
    kappa = EPSILON_PULL

    if own.is_pure and replies == {b_star}:
        a_star = own.support[0]
        E = [[eps if a == a_star else zero for _ in range(n)] for a in range(m)]
        K = Fraction(0)
    elif len(own.support) == 2 and len(replies) == 2 and b_star in replies:
        (t,) = replies - {b_star}
        a1, a2 = own.support
        gap = {a: V[t][a] - V[b_star][a] for a in (a1, a2)}
        a_up, a_down = (a1, a2) if gap[a1] > gap[a2] else (a2, a1)
        E = [[-kappa] * n for _ in range(m)]
        E[a_up] = [zero] * n
        E[a_down] = [zero] * n
        E[a_up][b_star] = eps
        E[a_down][t] = kappa
        K = payoff_spread(game) / kappa
    else:
        survivors = aggregate_payoff_set(game, best.contract, player)
        raise UniquenessError(
            f"no tie-breaking pattern for the maxagg witness of {player} "
            f"(support {own.support}, opponent replies {sorted(replies)})",
            [o.witness for o in survivors],
        )

    contract = _from_effective(game, player, E)
    post = apply_contract(game, contract)
    eqs = enumerate_nash(post.effective)
    if not eqs.complete or len(eqs) != 1:
        raise UniquenessError(
            f"epsilon contract for {player} does not have a certified unique equilibrium "
            f"({len(eqs)} found, degenerate={eqs.degenerate})",
            eqs.equilibria,
        )
    cert = eqs.equilibria[0]
    if cert.of(player) != own:
        raise UniquenessError(
            f"certified equilibrium moves {player} off the maxagg witness; the K bound does not apply",
            eqs.equilibria,
        )
    # move the split so the miner takes nothing at the certified equilibrium
    contract = shift_contract(contract, -expected_transfer(contract, cert))
    value = expected_payoff(game, cert, player)
    log.debug("epsilon contract for %s at eps=%s: value %s (maxagg %s)", player, eps, value, best.value)
    return EpsilonContract(contract, cert, value, K, eps)


def synthesize_contract(game: Game, player: str, params: SynthesisParams) -> Contract:
    """Indifference contract when params names a target, epsilon contract otherwise."""
    if params.target is not None:
        division = params.division
        if division is None:
            division = expected_payoff(game, params.target, player)
        return synthesize_indifference_contract(game, player, division, params.target)
    ec = synthesize_epsilon_contract(game, player, params.epsilon)
    if params.division is None:
        return ec.contract
    # contract currently leaves the payer `value`; move the rest to the miner
    return shift_contract(ec.contract, ec.value - params.division)


# ----------- Feasibility -----------

def mining_feasibility(game: Game, player: str) -> MiningVerdict:
    opp = other(player)
    labels = game.labels(opp)
    strict = dominant_strategy(game, opp, "strict")
    if strict is not None:
        return MiningVerdict(
            NO_STRICT,
            f"{opp} strictly dominant: {labels[strict]}; single-contract mining infeasible for {player}",
            strict,
        )
    weak = dominant_strategy(game, opp, "weak")
    if weak is not None:
        return MiningVerdict(
            NO_WEAK,
            f"{opp} weakly dominant: {labels[weak]}; no contract makes {player} and the miner "
            f"both strictly better off at every equilibrium",
            weak,
        )
    return MiningVerdict(FEASIBLE, f"{opp} has no dominant action")
