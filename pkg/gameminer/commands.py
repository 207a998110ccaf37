# gameminer/commands.py
"""The analyze / bargain / oracle commands as library calls returning Reports."""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .bargaining import (
    BOTH, MINER_OFFERS, ONE, SEQUENTIAL,
    BargainingOutcome, ContractMenu, DualOffer, MenuEntry, MenuParams, StrategyMap,
    FIXTURE, build_acceptance_game, both_contracts_equilibrium, compare_restriction, compare_welfare,
    delta_table, dual_offer_profit_bound, evaluate_dual_offer, first_mover_value,
    generate_candidate_menu, miner_offers_equilibrium, one_contract_equilibrium,
    sequential_equilibrium, spe_payment_upper_bound, synthesize_dual_offer,
)
from .config import DEFAULT_EPSILON, DEFAULT_GRID, DEFAULT_MARGIN, DEFAULT_MENU_STEPS
from .equilibrium import SelectionPolicy, enumerate_nash, grid_oracle_points
from .errors import InvariantViolation, UniquenessError
from .fileformat import GameFile
from .game_core import (
    A, B, PLAYERS,
    Game, describe_profile, dominant_strategies, dominant_strategy, is_nash,
    other, payoff_spread,
)
from .mining import (
    grid_maxagg, maxagg, maxminagg, mining_feasibility, synthesize_epsilon_contract,
)
from .report import Report, contract_json, matrix_json, num, profile_json

log = logging.getLogger(__name__)

# cli spelling -> structure
STRUCTURE_NAMES = {"one": ONE, "both": BOTH, "sequential": SEQUENTIAL, "miner-offers": MINER_OFFERS}


@dataclass
class Options:
    menu_epsilon: Optional[Fraction] = None
    menu_steps: Optional[int] = None
    menu_grid: int = 0
    restrict: bool = False
    fixtures_only: bool = False
    policy: SelectionPolicy = field(default_factory=SelectionPolicy)
    first: str = A
    margin: Fraction = DEFAULT_MARGIN
    bound_opponent_term: bool = False
    grid: int = DEFAULT_GRID


def build_menu(gf: GameFile, opts: Options) -> ContractMenu:
    """Generated menu plus file fixtures; command-line settings win over the file's."""
    game = gf.game
    if opts.fixtures_only or gf.menu.fixtures_only:
        wrap = lambda p: [MenuEntry(c, FIXTURE, n) for n, c in gf.contracts if c.payer == p]
        return ContractMenu.build(game, wrap(A), wrap(B))
    eps = next(v for v in (opts.menu_epsilon, gf.menu.epsilon, DEFAULT_EPSILON) if v is not None)
    steps = next(v for v in (opts.menu_steps, gf.menu.steps, DEFAULT_MENU_STEPS) if v is not None)
    params = MenuParams(eps, steps, opts.restrict or gf.menu.restrict, gf.contracts, grid=opts.menu_grid)
    return generate_candidate_menu(game, params)


def _outcome_json(game: Game, out: BargainingOutcome) -> dict:
    d = {
        "structure": out.structure,
        "accepted": out.accepted,
        "offers": {A: out.offers[0], B: out.offers[1]},
        "final_profile": profile_json(game, out.final_profile, with_payoffs=False),
        "payoffs": {"A": num(out.payoff_A), "B": num(out.payoff_B), "G": num(out.payoff_G)},
        "contracts_in_force": {p: contract_json(c) for p, c in out.contracts_in_force.items()},
        "trace": list(out.trace),
    }
    if out.flags:
        d["flags"] = list(out.flags)
    if out.offer_equilibria:
        d["offer_equilibria"] = [_cell(c) for c in out.offer_equilibria]
    if out.offer_matrix:
        d["offer_matrix"] = [_cell(c) for c in out.offer_matrix]
    return d


def _conserved(game: Game, out: BargainingOutcome) -> bool:
    try:
        out.check_conservation(game)
    except InvariantViolation:
        return False
    return True


def _cell(c) -> dict:
    return {"i_A": c.i_A, "i_B": c.i_B, "accepted": c.accepted,
            "A": num(c.payoff_A), "B": num(c.payoff_B), "G": num(c.payoff_G)}


# ----------- analyze -----------

def cmd_analyze(gf: GameFile, opts: Options) -> Report:
    game = gf.game
    rep = Report("analyze", gf.path)
    rep.add("game", {
        "shape": list(game.shape),
        "labels": {p: list(game.labels(p)) for p in PLAYERS},
        "payoff_A": matrix_json(game.payoff_A),
        "payoff_B": matrix_json(game.payoff_B),
    })

    eqs = enumerate_nash(game)
    rep.add("equilibria", {
        "degenerate": eqs.degenerate,
        "complete": eqs.complete,
        "profiles": [profile_json(game, e) for e in eqs],
    })
    rep.check("equilibria are exact best responses", all(is_nash(game, e) for e in eqs))

    dom = {}
    for p in PLAYERS:
        strict = dominant_strategy(game, p, "strict")
        dom[p] = {
            "strict": None if strict is None else game.labels(p)[strict],
            "weak": [game.labels(p)[k] for k in dominant_strategies(game, p, "weak")],
        }
    rep.add("dominance", dom)

    menu = build_menu(gf, opts)
    agg, mm, feas, eps = {}, {}, {}, {}
    for p in PLAYERS:
        best = maxagg(game, p)
        agg[p] = {"value": num(best.value), "witness": profile_json(game, best.witness, with_payoffs=False),
                  "contract": contract_json(best.contract)}
        lower, upper = maxminagg(game, p, menu.contracts(p))
        mm[p] = {"lower": num(lower.value), "witness": describe_profile(game, lower.witness),
                 "upper": num(upper), "menu_size": menu.size(p)}
        rep.check(f"maxminagg_{p} lower <= upper", lower.value <= upper)
        v = mining_feasibility(game, p)
        feas[p] = {"verdict": v.feasible, "detail": v.detail}
        try:
            ec = synthesize_epsilon_contract(game, p, opts.menu_epsilon or gf.menu.epsilon or DEFAULT_EPSILON)
        except UniquenessError as exc:
            eps[p] = {"error": str(exc), "survivors": [describe_profile(game, s) for s in exc.equilibria]}
        else:
            eps[p] = {"epsilon": num(ec.epsilon), "value": num(ec.value), "K": num(ec.K),
                      "equilibrium": profile_json(game, ec.certificate, with_payoffs=False),
                      "contract": contract_json(ec.contract)}
            rep.check(f"epsilon_{p} within K*epsilon of maxagg", ec.value >= best.value - ec.K * ec.epsilon)
    rep.add("maxagg", agg)
    rep.add("maxminagg", mm)
    rep.add("feasibility", feas)
    rep.add("epsilon_contracts", eps)
    rep.add("bounds", {
        "spe_payment_upper_bound": num(spe_payment_upper_bound(game)),
        "dual_offer_profit_bound": num(dual_offer_profit_bound(game, opts.bound_opponent_term)),
    })
    return rep


# ----------- bargain -----------

def _dual_json(game: Game, dual: DualOffer, smap: StrategyMap) -> dict:
    acc = build_acceptance_game(game, dual, smap)
    return {
        "offer_A": contract_json(dual.offer_A),
        "offer_B": contract_json(dual.offer_B),
        "margin": num(dual.margin),
        "predicted": {k: describe_profile(game, prof) for k, prof in dual.predicted},
        "miner_profit": num(dual.miner_profit),
        "acceptance_game": [[[num(acc.payoff_A[r][c]), num(acc.payoff_B[r][c])] for c in range(2)] for r in range(2)],
        "accept_dominant": {A: dual.accept_dominant[0], B: dual.accept_dominant[1]},
    }


def _add_welfare(rep: Report, game: Game, menu: ContractMenu, smap: StrategyMap, opts: Options):
    w = compare_welfare(game, menu, smap, opts.margin)
    rep.add("welfare", {
        "efficient": num(w.efficient),
        "base": num(w.base),
        "structures": {k: {"welfare": num(v), "loss": num(w.loss(k))} for k, v in w.by_structure},
    })
    rep.check("no structure exceeds efficient welfare", all(v <= w.efficient for _, v in w.by_structure))


def cmd_bargain(gf: GameFile, structure: str, opts: Options) -> Report:
    structure = STRUCTURE_NAMES.get(structure, structure)
    game = gf.game
    smap = StrategyMap(opts.policy)
    rep = Report(f"bargain --structure {structure}", gf.path)

    if structure == MINER_OFFERS:
        dual = synthesize_dual_offer(game, opts.margin, smap)
        out = miner_offers_equilibrium(game, opts.margin, smap, dual=dual)
        bound = dual_offer_profit_bound(game, opts.bound_opponent_term)
        rep.add("outcome", _outcome_json(game, out))
        if dual is not None:
            rep.add("dual_offer", _dual_json(game, dual, smap))
            rep.check("accept is dominant for both players", all(dual.accept_dominant))
        fixture_A, fixture_B = gf.contracts_of(A), gf.contracts_of(B)
        if fixture_A and fixture_B:
            lit = evaluate_dual_offer(game, fixture_A[0], fixture_B[0], opts.margin, smap)
            rep.add("fixture_offer", _dual_json(game, lit, smap))
        rep.add("bound", {"dual_offer_profit_bound": num(bound),
                          "term": "opponent" if opts.bound_opponent_term else "own"})
        rep.check("miner profit within dual-offer bound", out.payoff_G <= bound,
                  f"{num(out.payoff_G)['exact']} <= {num(bound)['exact']}")
        rep.check("conservation", _conserved(game, out))
        _add_welfare(rep, game, build_menu(gf, opts), smap, opts)
        return rep

    menu = build_menu(gf, opts)
    rep.add("menu", {p: [{"label": e.label, "source": e.tag} for e in menu.entries(p)] for p in PLAYERS})
    if structure == ONE:
        out = one_contract_equilibrium(game, menu, smap)
    elif structure == BOTH:
        out = both_contracts_equilibrium(game, menu, smap)
    elif structure == SEQUENTIAL:
        out = sequential_equilibrium(game, menu, smap, opts.first)
    else:
        raise ValueError(f"unknown structure {structure!r}")
    rep.add("outcome", _outcome_json(game, out))
    rep.check("conservation", _conserved(game, out))

    if structure in (ONE, BOTH):
        table = delta_table(game, menu, smap)
        rep.add("delta_table", {
            "rows": [{"player": r.player, "m_own": num(r.m_own), "m_against": num(r.m_against),
                      "m_null": num(r.m_null), "m_pessimal": num(r.m_pessimal),
                      "delta_own": num(r.delta_own), "delta_pair": num(r.delta_pair),
                      "delta_pessimal": num(r.delta_pessimal)} for r in table.rows],
            "equilibrium_game": table.equilibrium_game,
            "predicted_payment": num(table.predicted_payment),
        })
        bound = spe_payment_upper_bound(game)
        rep.add("bound", {"spe_payment_upper_bound": num(bound)})
        rep.check("miner payment within SPE bound", out.payoff_G <= bound,
                  f"{num(out.payoff_G)['exact']} <= {num(bound)['exact']}")
    if structure == BOTH:
        restricted, unrestricted, ok = compare_restriction(game, menu, smap)
        rep.add("restriction", {"restricted": num(restricted), "unrestricted": num(unrestricted), "ok": ok})
        rep.check("restricted structure pays the miner at least as much", ok)
    if structure == SEQUENTIAL:
        other_first = sequential_equilibrium(game, menu, smap, other(opts.first))
        rep.add("other_order", _outcome_json(game, other_first))
        vA, vB = first_mover_value(game, menu, smap)
        rep.add("first_mover_value", {A: num(vA), B: num(vB)})
    _add_welfare(rep, game, menu, smap, opts)
    return rep


# ----------- oracle -----------

def cmd_oracle(gf: GameFile, opts: Options) -> Report:
    game = gf.game
    n = opts.grid
    if n < 1:
        raise ValueError("grid resolution must be >= 1")
    L = payoff_spread(game)
    tol = 2 * L / n
    rep = Report(f"oracle --grid {n}", gf.path)
    hits = grid_oracle_points(game, n)
    profiles = hits.profiles()
    rep.add("grid", {"resolution": n, "tolerance": num(tol), "hits": len(profiles),
                     "sample": [describe_profile(game, p) for p in profiles[:10]]})

    eqs = enumerate_nash(game)
    rows = []
    for e in eqs:
        d = hits.distance_to(e)
        rows.append({"equilibrium": describe_profile(game, e), "nearest_hit": num(d, "grid") if d is not None else None})
        rep.check(f"grid hit within 1/{n} of {describe_profile(game, e)}", d is not None and d <= Fraction(1, n))
    rep.add("exact_equilibria", rows)

    agg = {}
    for p in PLAYERS:
        exact = maxagg(game, p).value
        grid = grid_maxagg(game, p, n)
        agg[p] = {"lp": num(exact, "lp"), "grid": num(grid, "grid"), "gap": num(exact - grid, "grid")}
        rep.check(f"maxagg_{p} grid within 2L/n of LP", grid <= exact and exact - grid <= tol)
    rep.add("maxagg", agg)
    return rep
