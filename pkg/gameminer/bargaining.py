# gameminer/bargaining.py
"""
Bargaining between the two players and a monopolist miner.

Equilibrium searches run over finite contract menus (generate_candidate_menu
or fixtures); the payment bounds are exact LP values over all contracts.

Market structures:
  one_contract     miner accepts at most one offer
  both_contracts   miner may take both offers; players coordinate or join the exclusive deal
  sequential       players contract in turn, miner accepts everything
  miner_offers     miner designs a pair of offers, players accept or reject
"""
import itertools
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .config import DEFAULT_EPSILON, DEFAULT_MARGIN, DEFAULT_MENU_STEPS, MINER_TIE_ORDER
from .equilibrium import EquilibriumSet, SelectionPolicy, enumerate_nash, select_equilibrium
from .errors import ContractError, InvariantViolation, SelectionError, UniquenessError
from .game_core import (
    A, B, PLAYERS,
    Contract, Game, PostContractGame, StrategyProfile,
    apply_two, describe_profile, expected_payoff, expected_transfer,
    null_contract, other, own_view, pure_profile, shift_contract, to_scalar,
)
from .lp import GE, LinearProgram, solve_lp
from .mining import (
    best_response_region_lp, column_optima, grid_maxagg, maxagg, min_best_response_payoff,
    synthesize_epsilon_contract,
)
from .utils import fmt_scalar, parallel_map

log = logging.getLogger(__name__)

ONE = "one_contract"
BOTH = "both_contracts"
SEQUENTIAL = "sequential"
MINER_OFFERS = "miner_offers"
STRUCTURES = (ONE, BOTH, SEQUENTIAL, MINER_OFFERS)

# menu provenance tags
NULL = "null"
INDIFFERENCE = "indifference"
EPSILON = "epsilon"
SHIFT = "shift"
FIXTURE = "fixture"
GRID = "grid"


# ----------- Strategy map -----------

@dataclass(frozen=True)
class StrategyMap:
    """Post-contract behavior: a selection policy applied to the equilibrium set."""
    policy: SelectionPolicy = field(default_factory=SelectionPolicy)

    def play(self, post: PostContractGame) -> StrategyProfile:
        return self.play_with_set(post)[0]

    def play_with_set(self, post: PostContractGame) -> Tuple[StrategyProfile, EquilibriumSet]:
        eqs = enumerate_nash(post.effective)
        if not eqs.equilibria:
            raise SelectionError("support enumeration found no equilibrium to select")
        return select_equilibrium(eqs, post, self.policy), eqs


# ----------- Menus -----------

@dataclass(frozen=True)
class MenuEntry:
    contract: Contract
    tag: str
    label: str
    maximizer: bool = False  # aggregate-maximizing contract or one of its shifts


@dataclass(frozen=True)
class ContractMenu:
    entries_A: Tuple[MenuEntry, ...]
    entries_B: Tuple[MenuEntry, ...]

    def entries(self, player: str) -> Tuple[MenuEntry, ...]:
        return self.entries_A if player == A else self.entries_B

    def contracts(self, player: str) -> Tuple[Contract, ...]:
        return tuple(e.contract for e in self.entries(player))

    def size(self, player: str) -> int:
        return len(self.entries(player))

    def hat(self, player: str) -> Optional[MenuEntry]:
        """The unshifted aggregate maximizer, if the menu carries one."""
        for e in self.entries(player):
            if e.maximizer and e.tag != SHIFT:
                return e
        return None

    def validate(self, game: Game):
        for player in PLAYERS:
            for e in self.entries(player):
                if e.contract.payer != player:
                    raise ContractError(f"menu entry {e.label!r} of {player} is paid by {e.contract.payer}")
                apply_two(game, e.contract if player == A else None, e.contract if player == B else None)

    @classmethod
    def build(cls, game: Game, entries_A: Sequence[MenuEntry] = (), entries_B: Sequence[MenuEntry] = ()) -> "ContractMenu":
        """Null contract first, duplicates (by transfers) dropped, first occurrence wins."""
        sides = []
        for player, entries in ((A, entries_A), (B, entries_B)):
            out = [MenuEntry(null_contract(game, player), NULL, "null")]
            seen = {out[0].contract}
            for e in entries:
                if e.contract not in seen:
                    seen.add(e.contract)
                    out.append(e)
            sides.append(tuple(out))
        menu = cls(*sides)
        menu.validate(game)
        return menu

    @classmethod
    def from_contracts(cls, game: Game, contracts_A: Sequence[Contract] = (),
                       contracts_B: Sequence[Contract] = (), tag: str = FIXTURE) -> "ContractMenu":
        wrap = lambda cs: [MenuEntry(c, tag, f"{tag}{i}") for i, c in enumerate(cs, start=1)]
        return cls.build(game, wrap(contracts_A), wrap(contracts_B))

    @classmethod
    def null_only(cls, game: Game) -> "ContractMenu":
        return cls.build(game)


@dataclass(frozen=True)
class MenuParams:
    epsilon: Fraction = DEFAULT_EPSILON
    steps: int = DEFAULT_MENU_STEPS
    restrict: bool = False  # only aggregate maximizers and their shifts
    fixtures: Tuple[Tuple[str, Contract], ...] = ()
    bound: Optional[Fraction] = None  # top payment level; spe_payment_upper_bound by default
    grid: int = 0  # > 0 adds the grid-derived maximizer at that many divisions

    def __post_init__(self):
        object.__setattr__(self, "epsilon", to_scalar(self.epsilon))
        if self.steps < 0:
            raise ValueError(f"steps must be >= 0, got {self.steps}")
        if self.grid < 0:
            raise ValueError(f"grid must be >= 0, got {self.grid}")


def generate_candidate_menu(game: Game, params: MenuParams = MenuParams()) -> ContractMenu:
    bound = params.bound if params.bound is not None else spe_payment_upper_bound(game)
    sides = {}
    for player in PLAYERS:
        opp = other(player)
        best = maxagg(game, player)
        items: List[MenuEntry] = []
        families: List[MenuEntry] = []
        for outcome in column_optima(game, player):
            is_hat = outcome.witness == best.witness
            if params.restrict and not is_hat:
                continue
            col = game.labels(opp)[outcome.witness.of(opp).support[0]]
            e = MenuEntry(outcome.contract, INDIFFERENCE, f"indiff@{col}" + ("*" if is_hat else ""), is_hat)
            items.append(e)
            families.append(e)
        if not params.restrict:
            try:
                ec = synthesize_epsilon_contract(game, player, params.epsilon)
            except UniquenessError as exc:
                log.debug("no epsilon contract for %s: %s", player, exc)
            else:
                e = MenuEntry(ec.contract, EPSILON, f"eps={fmt_scalar(ec.epsilon)}")
                items.append(e)
                families.append(e)
        if bound > 0:
            for fam in families:
                for k in range(1, params.steps + 1):
                    level = bound * k / params.steps
                    items.append(MenuEntry(shift_contract(fam.contract, level), SHIFT,
                                           f"{fam.label}+{fmt_scalar(level)}", fam.maximizer))
        if params.grid:
            # indifference at the grid estimate of maxagg; the miner keeps the grid gap
            value = grid_maxagg(game, player, params.grid)
            flat = Contract(player, game.payoff(player))
            items.append(MenuEntry(shift_contract(flat, -value), GRID, f"grid{params.grid}", True))
        for name, c in params.fixtures:
            if c.payer == player:
                items.append(MenuEntry(c, FIXTURE, name))
        sides[player] = items
    menu = ContractMenu.build(game, sides[A], sides[B])
    log.debug("menu sizes: A=%d B=%d", menu.size(A), menu.size(B))
    return menu


# ----------- Settlements -----------

@dataclass(frozen=True)
class Settlement:
    """What happens after both contracts are applied, under the strategy map."""
    profile: StrategyProfile
    base_A: Fraction
    base_B: Fraction
    transfer_A: Fraction
    transfer_B: Fraction
    degenerate: bool = False

    @property
    def payoff_A(self) -> Fraction:
        return self.base_A - self.transfer_A

    @property
    def payoff_B(self) -> Fraction:
        return self.base_B - self.transfer_B

    @property
    def payoff_G(self) -> Fraction:
        return self.transfer_A + self.transfer_B

    def payoff(self, who: str) -> Fraction:
        return {A: self.payoff_A, B: self.payoff_B}.get(who, self.payoff_G)


class _Market:
    """Memoized settlements of one game under one strategy map."""

    def __init__(self, game: Game, smap: StrategyMap):
        self.game = game
        self.smap = smap
        self._cache: Dict[Tuple, Settlement] = {}

    def _compute(self, key) -> Settlement:
        cA, cB = key
        post = apply_two(self.game, cA, cB)
        prof, eqs = self.smap.play_with_set(post)
        return Settlement(
            prof,
            expected_payoff(self.game, prof, A),
            expected_payoff(self.game, prof, B),
            expected_transfer(cA, prof),
            expected_transfer(cB, prof),
            eqs.degenerate,
        )

    def warm(self, keys):
        todo = [k for k in dict.fromkeys(keys) if k not in self._cache]
        for k, s in zip(todo, parallel_map(self._compute, todo)):
            self._cache[k] = s

    def settle(self, cA: Optional[Contract], cB: Optional[Contract]) -> Settlement:
        key = (cA, cB)
        if key not in self._cache:
            self._cache[key] = self._compute(key)
        return self._cache[key]


def _miner_choice(options: Sequence[Tuple[str, Settlement]]) -> Tuple[str, Settlement]:
    """Highest total transfer; exact ties follow MINER_TIE_ORDER."""
    ranked = sorted(options, key=lambda o: MINER_TIE_ORDER.index(o[0]))
    best = ranked[0]
    for opt in ranked[1:]:
        if opt[1].payoff_G > best[1].payoff_G:
            best = opt
    return best


# ----------- Outcomes -----------

@dataclass(frozen=True)
class OfferCell:
    i_A: int
    i_B: int
    accepted: str
    payoff_A: Fraction
    payoff_B: Fraction
    payoff_G: Fraction


@dataclass(frozen=True)
class BargainingOutcome:
    structure: str
    accepted: str                      # null | A | B | both
    contract_A: Optional[Contract]
    contract_B: Optional[Contract]
    final_profile: StrategyProfile
    payoff_A: Fraction
    payoff_B: Fraction
    payoff_G: Fraction
    trace: Tuple[str, ...] = ()
    offers: Tuple[Optional[str], Optional[str]] = (None, None)
    offer_equilibria: Tuple[OfferCell, ...] = ()
    offer_matrix: Tuple[OfferCell, ...] = ()
    flags: Tuple[str, ...] = ()

    @property
    def contracts_in_force(self) -> Dict[str, Optional[Contract]]:
        return {A: self.contract_A, B: self.contract_B}

    def check_conservation(self, game: Game):
        base = expected_payoff(game, self.final_profile, A) + expected_payoff(game, self.final_profile, B)
        total = self.payoff_A + self.payoff_B + self.payoff_G
        if total != base:
            raise InvariantViolation(
                f"{self.structure}: payoffs sum to {total}, base payoffs at the final profile sum to {base}"
            )
        g = expected_transfer(self.contract_A, self.final_profile) + expected_transfer(self.contract_B, self.final_profile)
        if g != self.payoff_G:
            raise InvariantViolation(f"{self.structure}: miner payoff {self.payoff_G} != transfers {g}")


def _outcome(game: Game, structure: str, accepted: str, cA, cB, s: Settlement, **extra) -> BargainingOutcome:
    if s.degenerate:
        # selection ran on a degenerate post-contract game; values may sit on a continuum
        extra["flags"] = tuple(extra.get("flags", ())) + ("degenerate",)
    out = BargainingOutcome(structure, accepted, cA, cB, s.profile, s.payoff_A, s.payoff_B, s.payoff_G, **extra)
    out.check_conservation(game)
    return out


# ----------- Aggregate payoff function / delta table -----------

def aggregate_payoff_fn(game: Game, contract: Optional[Contract], player: str, smap: StrategyMap) -> Fraction:
    """Player's base payoff at the mapped equilibrium with `contract` in force.

    The contract may belong to either player; for the opponent's it is the
    player's payoff in the game the opponent contracted into.
    """
    if contract is None:
        post = apply_two(game, None, None)
    elif contract.payer == A:
        post = apply_two(game, contract, None)
    else:
        post = apply_two(game, None, contract)
    return expected_payoff(game, smap.play(post), player)


@dataclass(frozen=True)
class DeltaRow:
    player: str
    m_own: Fraction        # m_i(D̂_i)
    m_against: Fraction    # m_i(D̂_j)
    m_null: Fraction       # m_i(D_0)
    m_pessimal: Fraction   # m_i(D̲_j)
    delta_own: Fraction    # m_i(D̂_i) - m_i(D_0)
    delta_pair: Fraction   # m_i(D̂_i) - m_i(D̂_j)
    delta_pessimal: Fraction


@dataclass(frozen=True)
class DeltaTable:
    rows: Tuple[DeltaRow, DeltaRow]
    equilibrium_game: str  # base | A | B
    predicted_payment: Fraction

    def row(self, player: str) -> DeltaRow:
        return self.rows[0] if player == A else self.rows[1]


def _hat(game: Game, menu: ContractMenu, player: str, smap: StrategyMap) -> Contract:
    e = menu.hat(player)
    if e is not None:
        return e.contract
    best = None
    for c in menu.contracts(player):
        m = aggregate_payoff_fn(game, c, player, smap)
        if best is None or m > best[0]:
            best = (m, c)
    return best[1]


def delta_table(game: Game, menu: ContractMenu, smap: StrategyMap) -> DeltaTable:
    hats = {p: _hat(game, menu, p, smap) for p in PLAYERS}
    rows = []
    for i in PLAYERS:
        j = other(i)
        m_own = aggregate_payoff_fn(game, hats[i], i, smap)
        m_against = aggregate_payoff_fn(game, hats[j], i, smap)
        m_null = aggregate_payoff_fn(game, None, i, smap)
        m_pess = min(aggregate_payoff_fn(game, c, i, smap) for c in menu.contracts(j))
        rows.append(DeltaRow(i, m_own, m_against, m_null, m_pess,
                             m_own - m_null, m_own - m_against, m_own - m_pess))
    dA, dB = rows[0].delta_pair, rows[1].delta_pair
    if max(dA, dB) <= 0:
        eq_game = "base"
    else:
        eq_game = A if dA >= dB else B
    # the loser's willingness to pay is what the winner must match
    payment = max(Fraction(0), min(dA, dB))
    return DeltaTable(tuple(rows), eq_game, payment)


# ----------- Bounds -----------

def spe_payment_upper_bound(game: Game) -> Fraction:
    """Largest payment any player would make to the miner in one-contract bargaining."""
    return max(maxagg(game, i).value - min_best_response_payoff(game, i) for i in PLAYERS)


def _min_opponent_payoff_at_replies(game: Game, responder: str, measured: str) -> Fraction:
    """min of `measured`'s payoff over profiles where `responder` best-responds."""
    R = own_view(game, responder)
    M = own_view(game, measured)
    if measured != responder:
        M = tuple(zip(*M))  # index by responder's action
    vals = []
    for a in range(game.actions(responder)):
        res = best_response_region_lp(M[a], R, a, "min")
        if res.optimal:
            vals.append(res.value)
    return min(vals)


def max_welfare(game: Game) -> Fraction:
    return max(a + b for ra, rb in zip(game.payoff_A, game.payoff_B) for a, b in zip(ra, rb))


def dual_offer_profit_bound(game: Game, opponent_term: bool = False) -> Fraction:
    """Ceiling on miner profit from any dual offer.

    max(U_A + U_B) minus B's worst payoff with B best-responding minus A's
    worst payoff with A best-responding. opponent_term measures B's payoff
    in the last term instead.
    """
    top = max_welfare(game)
    second = min_best_response_payoff(game, B)
    third = _min_opponent_payoff_at_replies(game, A, B) if opponent_term else min_best_response_payoff(game, A)
    return top - second - third


# ----------- One contract -----------

def _offer_equilibria(cells: Dict[Tuple[int, int], OfferCell], nA: int, nB: int) -> List[OfferCell]:
    out = []
    for iA in range(nA):
        for iB in range(nB):
            c = cells[(iA, iB)]
            if c.payoff_A < max(cells[(k, iB)].payoff_A for k in range(nA)):
                continue
            if c.payoff_B < max(cells[(iA, k)].payoff_B for k in range(nB)):
                continue
            out.append(c)
    return out


def _headline(eqs: List[OfferCell]) -> OfferCell:
    # best for the miner, then lowest offer indices
    return sorted(eqs, key=lambda c: (-c.payoff_G, c.i_A, c.i_B))[0]


def one_contract_equilibrium(game: Game, menu: ContractMenu, smap: StrategyMap = StrategyMap()) -> BargainingOutcome:
    """Offer-stage equilibrium when the miner accepts at most one offer."""
    market = _Market(game, smap)
    CA, CB = menu.contracts(A), menu.contracts(B)
    market.warm([(None, None)] + [(c, None) for c in CA] + [(None, c) for c in CB])

    picks = {}
    cells = {}
    for iA, iB in itertools.product(range(len(CA)), range(len(CB))):
        options = [("null", market.settle(None, None)),
                   ("A", market.settle(CA[iA], None)),
                   ("B", market.settle(None, CB[iB]))]
        who, s = _miner_choice(options)
        picks[(iA, iB)] = (who, s)
        cells[(iA, iB)] = OfferCell(iA, iB, who, s.payoff_A, s.payoff_B, s.payoff_G)

    eqs = _offer_equilibria(cells, len(CA), len(CB))
    trace = [f"stage 3: post-contract play by {smap.policy}",
             f"stage 1: {len(eqs)} pure offer equilibria over {len(CA)}x{len(CB)} offers"]
    flags = []
    if eqs:
        head = _headline(eqs)
        who, s = picks[(head.i_A, head.i_B)]
        iA, iB = head.i_A, head.i_B
        offers = (menu.entries(A)[iA].label, menu.entries(B)[iB].label)
        matrix = ()
        cA = CA[iA] if who == A else None
        cB = CB[iB] if who == B else None
    else:
        flags.append("no_pure_offer_equilibrium")
        who, s = "null", market.settle(None, None)
        offers = (None, None)
        matrix = tuple(cells[k] for k in sorted(cells))
        cA = cB = None
    trace.insert(1, f"stage 2: miner accepts {who} (transfer {fmt_scalar(s.payoff_G)})")
    log.info("one contract: miner accepts %s, payoffs A=%s B=%s G=%s", who,
             fmt_scalar(s.payoff_A), fmt_scalar(s.payoff_B), fmt_scalar(s.payoff_G))
    return _outcome(game, ONE, who, cA, cB, s, trace=tuple(trace), offers=offers,
                    offer_equilibria=tuple(eqs), offer_matrix=matrix, flags=tuple(flags))


# ----------- Both contracts -----------

def _shave(contract: Contract, profile: StrategyProfile, pays: Fraction) -> Contract:
    """contract shifted so its payer transfers exactly `pays` at profile."""
    return shift_contract(contract, pays - expected_transfer(contract, profile))


def _coordinated(game: Game, menu: ContractMenu, market: _Market, exclusive: BargainingOutcome):
    """Offer pair both players prefer to the exclusive outcome once each pays nothing at the joint play.

    The miner accepts such a pair only if neither shaved contract alone pays
    her more than zero. Returns (i_A, i_B, contract_A, contract_B) or None.
    """
    CA, CB = menu.contracts(A), menu.contracts(B)
    best = None
    for iA, iB in itertools.product(range(1, len(CA)), range(1, len(CB))):
        prof = market.settle(CA[iA], CB[iB]).profile
        vA, vB = expected_payoff(game, prof, A), expected_payoff(game, prof, B)
        if vA <= exclusive.payoff_A or vB <= exclusive.payoff_B:
            continue
        if best is not None and vA + vB <= best[0]:
            continue
        zA, zB = _shave(CA[iA], prof, Fraction(0)), _shave(CB[iB], prof, Fraction(0))
        if market.settle(zA, None).payoff_G > 0 or market.settle(None, zB).payoff_G > 0:
            continue
        best = (vA + vB, iA, iB, zA, zB)
    return best[1:] if best else None


def _join(game: Game, menu: ContractMenu, market: _Market, exclusive: BargainingOutcome):
    """Contract the left-out player adds, shaved so the miner's total stays at the exclusive transfer.

    Returns (menu index, shaved contract) or None when no entry strictly helps.
    """
    winner = exclusive.accepted
    joiner = other(winner)
    held = exclusive.contracts_in_force[winner]
    g = exclusive.payoff_G
    current = exclusive.payoff_A if joiner == A else exclusive.payoff_B
    mine = menu.contracts(joiner)
    pair = (lambda c, h: (c, h)) if joiner == A else (lambda c, h: (h, c))
    market.warm([pair(c, held) for c in mine[1:]])

    best = None
    for k in range(1, len(mine)):
        prof = market.settle(*pair(mine[k], held)).profile
        pays = g - expected_transfer(held, prof)
        gain = expected_payoff(game, prof, joiner) - pays
        if gain <= current or (best is not None and gain <= best[0]):
            continue
        shaved = _shave(mine[k], prof, pays)
        # accepting the shaved contract alone must not beat the exclusive deal
        if market.settle(*pair(shaved, None)).payoff_G > g:
            continue
        best = (gain, k, shaved)
    return best[1:] if best else None


def both_contracts_equilibrium(game: Game, menu: ContractMenu, smap: StrategyMap = StrategyMap()) -> BargainingOutcome:
    """Outcome when the miner may accept both offers.

    Starts from the one-contract outcome. If some offer pair makes both
    players strictly better off with no net payment at the joint play, they
    coordinate on it and the miner is left with zero. Otherwise the player
    the miner turned down adds its best contract, shifted so the miner's
    total is unchanged; the miner accepts it since she loses nothing.
    """
    exclusive = one_contract_equilibrium(game, menu, smap)
    market = _Market(game, smap)
    market.warm([(a, b) for a in menu.contracts(A)[1:] for b in menu.contracts(B)[1:]])
    trace = [f"exclusive outcome: miner accepts {exclusive.accepted} (transfer {fmt_scalar(exclusive.payoff_G)})"]
    keep = dict(offer_equilibria=exclusive.offer_equilibria, offer_matrix=exclusive.offer_matrix,
                flags=tuple(f for f in exclusive.flags if f != "degenerate"))

    co = _coordinated(game, menu, market, exclusive)
    if co is not None:
        iA, iB, cA, cB = co
        offers = (menu.entries(A)[iA].label, menu.entries(B)[iB].label)
        trace.append(f"both players prefer {offers[0]!r} with {offers[1]!r} at zero net transfer")
        trace.append("miner accepts both (transfer 0)")
        log.info("both contracts: players coordinate on %s / %s", *offers)
        return _outcome(game, BOTH, "both", cA, cB, market.settle(cA, cB),
                        trace=tuple(trace), offers=offers, **keep)

    if exclusive.accepted in PLAYERS:
        pb = _join(game, menu, market, exclusive)
        if pb is not None:
            k, shaved = pb
            joiner = other(exclusive.accepted)
            label = menu.entries(joiner)[k].label
            if joiner == A:
                cA, cB, offers = shaved, exclusive.contract_B, (label, exclusive.offers[1])
            else:
                cA, cB, offers = exclusive.contract_A, shaved, (exclusive.offers[0], label)
            trace.append(f"{joiner} adds {label!r}, shifted to keep the miner at {fmt_scalar(exclusive.payoff_G)}")
            trace.append(f"miner accepts both (transfer {fmt_scalar(exclusive.payoff_G)})")
            log.info("both contracts: %s joins with %s", joiner, label)
            return _outcome(game, BOTH, "both", cA, cB, market.settle(cA, cB),
                            trace=tuple(trace), offers=offers, **keep)

    trace.append("no contract improves on the exclusive outcome")
    return replace(exclusive, structure=BOTH, trace=tuple(trace))


def _contract_payoff(market: _Market, player: str, mine: Contract, theirs: Optional[Contract], miner: str) -> Fraction:
    cA, cB = (mine, theirs) if player == A else (theirs, mine)
    if miner == "passive":
        return market.settle(cA, cB).payoff(player)
    options = [("null", market.settle(None, None)),
               ("A", market.settle(cA, None)),
               ("B", market.settle(None, cB)),
               ("both", market.settle(cA, cB))]
    return _miner_choice(options)[1].payoff(player)


def best_contract_response(game: Game, player: str, opponent_contract: Optional[Contract],
                           menu: ContractMenu, smap: StrategyMap = StrategyMap(),
                           miner: str = "choosy") -> Tuple[Contract, ...]:
    """Best responses in the contract stage: player's offers maximizing its payoff given the opponent's offer.

    miner="choosy" lets the miner accept any subset of offers; "passive"
    puts every offer in force.
    """
    if miner not in ("choosy", "passive"):
        raise ValueError(f"miner must be 'choosy' or 'passive', not {miner!r}")
    market = _Market(game, smap)
    vals = [(c, _contract_payoff(market, player, c, opponent_contract, miner)) for c in menu.contracts(player)]
    top = max(v for _, v in vals)
    return tuple(c for c, v in vals if v == top)


def compare_restriction(game: Game, menu: ContractMenu, smap: StrategyMap = StrategyMap()) -> Tuple[Fraction, Fraction, bool]:
    restricted = one_contract_equilibrium(game, menu, smap).payoff_G
    unrestricted = both_contracts_equilibrium(game, menu, smap).payoff_G
    return restricted, unrestricted, restricted >= unrestricted


# ----------- Sequential -----------

def sequential_equilibrium(game: Game, menu: ContractMenu, smap: StrategyMap = StrategyMap(),
                           first_mover: str = A) -> BargainingOutcome:
    second = other(first_mover)
    market = _Market(game, smap)
    first_menu, second_menu = menu.contracts(first_mover), menu.contracts(second)
    pair = (lambda f, s: (f, s)) if first_mover == A else (lambda f, s: (s, f))
    market.warm([pair(f, s) for f in first_menu for s in second_menu])

    best = None
    for i_f, f in enumerate(first_menu):
        replies = [market.settle(*pair(f, s)).payoff(second) for s in second_menu]
        i_s = replies.index(max(replies))  # lowest index on ties
        s = market.settle(*pair(f, second_menu[i_s]))
        if best is None or s.payoff(first_mover) > best[2].payoff(first_mover):
            best = (i_f, i_s, s)
    i_f, i_s, s = best
    labels = {first_mover: menu.entries(first_mover)[i_f].label, second: menu.entries(second)[i_s].label}
    cA, cB = pair(first_menu[i_f], second_menu[i_s])
    trace = (f"{first_mover} moves first with {labels[first_mover]!r}",
             f"{second} replies with {labels[second]!r}",
             "miner accepts both")
    log.info("sequential, %s first: %s", first_mover, describe_profile(game, s.profile))
    return _outcome(game, SEQUENTIAL, "both", cA, cB, s, trace=trace, offers=(labels[A], labels[B]))


def first_mover_value(game: Game, menu: ContractMenu, smap: StrategyMap = StrategyMap()) -> Tuple[Fraction, Fraction]:
    """(A's gain from moving first, B's gain from moving first)."""
    a_first = sequential_equilibrium(game, menu, smap, A)
    b_first = sequential_equilibrium(game, menu, smap, B)
    return a_first.payoff_A - b_first.payoff_A, b_first.payoff_B - a_first.payoff_B


# ----------- Miner offers -----------

@dataclass(frozen=True)
class DualOffer:
    offer_A: Contract
    offer_B: Contract
    margin: Fraction
    predicted: Tuple[Tuple[str, StrategyProfile], ...]  # (both|A|B|base, profile)
    miner_profit: Fraction
    acceptance: Tuple[Fraction, Fraction]  # worst gain from accepting, per player

    def predicted_profile(self, which: str) -> StrategyProfile:
        return dict(self.predicted)[which]

    @property
    def accept_dominant(self) -> Tuple[bool, bool]:
        return self.acceptance[0] >= 0, self.acceptance[1] >= 0

    @property
    def strict(self) -> bool:
        return min(self.acceptance) >= self.margin


ACCEPT_LABELS = ("accept", "reject")


def _four_games(game: Game, offer_A: Contract, offer_B: Contract):
    return (("both", offer_A, offer_B), ("A", offer_A, None), ("B", None, offer_B), ("base", None, None))


def build_acceptance_game(game: Game, dual: DualOffer, smap: StrategyMap = StrategyMap()) -> Game:
    """2x2 accept/reject game; entries are effective payoffs at the mapped equilibria."""
    market = _Market(game, smap)
    s = {name: market.settle(cA, cB) for name, cA, cB in _four_games(game, dual.offer_A, dual.offer_B)}
    UA = [[s["both"].payoff_A, s["A"].payoff_A], [s["B"].payoff_A, s["base"].payoff_A]]
    UB = [[s["both"].payoff_B, s["A"].payoff_B], [s["B"].payoff_B, s["base"].payoff_B]]
    return Game(UA, UB, ACCEPT_LABELS, ACCEPT_LABELS)


def evaluate_dual_offer(game: Game, offer_A: Contract, offer_B: Contract,
                        margin=DEFAULT_MARGIN, smap: StrategyMap = StrategyMap()) -> DualOffer:
    market = _Market(game, smap)
    settled = {name: market.settle(cA, cB) for name, cA, cB in _four_games(game, offer_A, offer_B)}
    predicted = tuple((name, settled[name].profile) for name in ("both", "A", "B", "base"))
    profit = settled["both"].payoff_G
    acc = Game(
        [[settled["both"].payoff_A, settled["A"].payoff_A], [settled["B"].payoff_A, settled["base"].payoff_A]],
        [[settled["both"].payoff_B, settled["A"].payoff_B], [settled["B"].payoff_B, settled["base"].payoff_B]],
    )
    gain_A = min(acc.payoff_A[0][k] - acc.payoff_A[1][k] for k in range(2))
    gain_B = min(acc.payoff_B[k][0] - acc.payoff_B[k][1] for k in range(2))
    return DualOffer(offer_A, offer_B, to_scalar(margin), predicted, profit, (gain_A, gain_B))


def _triple_lp(game: Game, t_ab, t_a, t_b, eta: Fraction, v0: Tuple[Fraction, Fraction]):
    """LP over (D_A, D_B) entries making the three targets the forced outcomes."""
    m, n = game.shape
    UA, UB = game.payoff_A, game.payoff_B
    (a_s, b_s), (a1, b1), (a2, b2) = t_ab, t_a, t_b
    nv = 2 * m * n
    ia = lambda a, b: a * n + b
    ib = lambda a, b: m * n + a * n + b
    cons = []

    def ge(terms, rhs):
        coeffs = [Fraction(0)] * nv
        for idx, c in terms:
            coeffs[idx] += c
        cons.append((tuple(coeffs), GE, rhs))

    # E_A(r,b) - E_A(a,b) = U_A(r,b) - U_A(a,b) - D_A(r,b) + D_A(a,b) >= eta
    reply_A = lambda b: a1 if b == b1 else a_s
    rows_A = {a1, a_s}
    for b in range(n):
        r = reply_A(b)
        for a in range(m):
            if a != r:
                ge([(ia(r, b), -1), (ia(a, b), 1)], eta - UA[r][b] + UA[a][b])
    for a in range(m):
        if a in rows_A:
            continue
        for r in rows_A:
            for b in range(n):
                ge([(ia(r, b), -1), (ia(a, b), 1)], eta - UA[r][b] + UA[a][b])

    reply_B = lambda a: b2 if a == a2 else b_s
    cols_B = {b2, b_s}
    for a in range(m):
        r = reply_B(a)
        for b in range(n):
            if b != r:
                ge([(ib(a, r), -1), (ib(a, b), 1)], eta - UB[a][r] + UB[a][b])
    for b in range(n):
        if b in cols_B:
            continue
        for r in cols_B:
            for a in range(m):
                ge([(ib(a, r), -1), (ib(a, b), 1)], eta - UB[a][r] + UB[a][b])

    # acceptance: U - D >= reference + eta  <=>  -D >= reference + eta - U
    ge([(ia(a1, b1), -1)], v0[0] + eta - UA[a1][b1])
    ge([(ia(a_s, b_s), -1)], UA[a2][b2] + eta - UA[a_s][b_s])
    ge([(ib(a2, b2), -1)], v0[1] + eta - UB[a2][b2])
    ge([(ib(a_s, b_s), -1)], UB[a1][b1] + eta - UB[a_s][b_s])

    objective = [Fraction(0)] * nv
    objective[ia(a_s, b_s)] = Fraction(1)
    objective[ib(a_s, b_s)] = Fraction(1)
    res = solve_lp(LinearProgram(tuple(objective), tuple(cons), "max", ((None, None),) * nv))
    if not res.optimal:
        return None
    D_A = [[res.point[ia(a, b)] for b in range(n)] for a in range(m)]
    D_B = [[res.point[ib(a, b)] for b in range(n)] for a in range(m)]
    return Contract(A, D_A), Contract(B, D_B)


def _strict_reply(values: Sequence[Fraction], k: int, eta: Fraction) -> bool:
    return all(values[k] - v >= eta for j, v in enumerate(values) if j != k)


def synthesize_dual_offer(game: Game, margin=DEFAULT_MARGIN, smap: StrategyMap = StrategyMap()) -> Optional[DualOffer]:
    """Best pair of miner offers over pure target triples, or None if no profitable triple is feasible.

    Triples are tried in order of their profit ceiling; search stops once no
    remaining ceiling beats the best verified offer.
    """
    eta = to_scalar(margin)
    if eta <= 0:
        raise ValueError(f"margin must be > 0, got {eta}")
    m, n = game.shape
    UA, UB = game.payoff_A, game.payoff_B
    base = smap.play(apply_two(game, None, None))
    v0 = (expected_payoff(game, base, A), expected_payoff(game, base, B))
    cells = [(a, b) for a in range(m) for b in range(n)]

    triples = []
    for t_ab, t_a, t_b in itertools.product(cells, repeat=3):
        (a_s, b_s), (a1, b1), (a2, b2) = t_ab, t_a, t_b
        if (b1 == b_s and a1 != a_s) or (a2 == a_s and b2 != b_s):
            continue
        if not _strict_reply(UB[a1], b1, eta):
            continue
        if not _strict_reply([UA[a][b2] for a in range(m)], a2, eta):
            continue
        ceiling = UA[a_s][b_s] - UA[a2][b2] - eta + UB[a_s][b_s] - UB[a1][b1] - eta
        if ceiling <= 0:
            continue  # staying out pays the miner 0
        triples.append((ceiling, t_ab, t_a, t_b))
    triples.sort(key=lambda t: (-t[0], t[1:]))

    best: Optional[DualOffer] = None
    for ceiling, t_ab, t_a, t_b in triples:
        if best is not None and ceiling <= best.miner_profit:
            break
        offers = _triple_lp(game, t_ab, t_a, t_b, eta, v0)
        if offers is None:
            continue
        dual = evaluate_dual_offer(game, offers[0], offers[1], eta, smap)
        want = {"both": t_ab, "A": t_a, "B": t_b}
        if any(dual.predicted_profile(k) != pure_profile(game, *t) for k, t in want.items()):
            log.debug("triple %s/%s/%s rejected: mapped equilibria differ from targets", t_ab, t_a, t_b)
            continue
        if dual.predicted_profile("base") != base or not all(dual.accept_dominant):
            continue
        if dual.miner_profit > 0 and (best is None or dual.miner_profit > best.miner_profit):
            best = dual
    if best is not None:
        log.info("dual offer: miner profit %s", fmt_scalar(best.miner_profit))
    return best


_SEARCH = object()


def miner_offers_equilibrium(game: Game, margin=DEFAULT_MARGIN, smap: StrategyMap = StrategyMap(),
                             dual=_SEARCH) -> BargainingOutcome:
    """Outcome when the miner designs both offers; pass dual to skip the search."""
    market = _Market(game, smap)
    if dual is _SEARCH:
        dual = synthesize_dual_offer(game, margin, smap)
    if dual is None:
        s = market.settle(None, None)
        return _outcome(game, MINER_OFFERS, "null", None, None, s,
                        trace=("no dual offer certified; players stay in the base game",),
                        flags=("no_dual_offer",))
    s = market.settle(dual.offer_A, dual.offer_B)
    trace = ("miner offers a contract to each player",
             "accept is dominant for both players",
             f"miner profit {fmt_scalar(dual.miner_profit)}")
    return _outcome(game, MINER_OFFERS, "both", dual.offer_A, dual.offer_B, s, trace=trace)


# ----------- Welfare -----------

@dataclass(frozen=True)
class WelfareComparison:
    efficient: Fraction  # max of U_A + U_B
    base: Fraction       # mapped equilibrium without contracts
    by_structure: Tuple[Tuple[str, Fraction], ...]

    def value(self, structure: str) -> Fraction:
        return dict(self.by_structure)[structure]

    def loss(self, structure: str) -> Fraction:
        return self.efficient - self.value(structure)


def social_welfare(out: BargainingOutcome) -> Fraction:
    """Both players plus the miner; transfers cancel, so this is U_A + U_B at the final profile."""
    return out.payoff_A + out.payoff_B + out.payoff_G


def compare_welfare(game: Game, menu: ContractMenu, smap: StrategyMap = StrategyMap(),
                    margin=DEFAULT_MARGIN) -> WelfareComparison:
    outcomes = (
        (ONE, one_contract_equilibrium(game, menu, smap)),
        (BOTH, both_contracts_equilibrium(game, menu, smap)),
        (f"{SEQUENTIAL}:{A}", sequential_equilibrium(game, menu, smap, A)),
        (f"{SEQUENTIAL}:{B}", sequential_equilibrium(game, menu, smap, B)),
        (MINER_OFFERS, miner_offers_equilibrium(game, margin, smap)),
    )
    base = smap.play(apply_two(game, None, None))
    base_welfare = expected_payoff(game, base, A) + expected_payoff(game, base, B)
    comparison = WelfareComparison(max_welfare(game), base_welfare,
                                   tuple((name, social_welfare(out)) for name, out in outcomes))
    log.debug("welfare by structure: %s", ", ".join(f"{k}={fmt_scalar(v)}" for k, v in comparison.by_structure))
    return comparison
