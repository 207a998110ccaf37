# gameminer/game_core.py
"""
Exact two-player normal-form games.

Everything is a frozen dataclass over tuples of Fraction, so values are
hashable, immutable and safe to hand between threads. Matrices are always
indexed [row action of A][column action of B]; helpers that want a
player-centred view use own_view()/from_own_view().
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import FrozenSet, Iterable, Optional, Sequence, Tuple

from .errors import ContractError, DimensionError

A = "A"
B = "B"
PLAYERS = (A, B)

Scalar = Fraction
Matrix = Tuple[Tuple[Fraction, ...], ...]


def other(player: str) -> str:
    if player == A:
        return B
    if player == B:
        return A
    raise ValueError(f"unknown player {player!r}")


def to_scalar(x) -> Fraction:
    """Exact conversion; strings like '2.01' or '3/2' parse without rounding."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        # floats are only exact for dyadic values; go through repr so 0.1 -> 1/10
        return Fraction(repr(x))
    return Fraction(x)


def to_matrix(rows: Iterable[Iterable]) -> Matrix:
    return tuple(tuple(to_scalar(v) for v in row) for row in rows)


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m)) if m else ()


def _check_shape(m: Matrix, rows: int, cols: int, what: str):
    if len(m) != rows:
        raise DimensionError("row", rows, len(m), what)
    for r in m:
        if len(r) != cols:
            raise DimensionError("column", cols, len(r), what)


# ----------- Game -----------

@dataclass(frozen=True)
class Game:
    payoff_A: Matrix
    payoff_B: Matrix
    row_labels: Tuple[str, ...] = ()
    col_labels: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "payoff_A", to_matrix(self.payoff_A))
        object.__setattr__(self, "payoff_B", to_matrix(self.payoff_B))
        rows = len(self.payoff_A)
        if rows < 1 or len(self.payoff_A[0]) < 1:
            raise DimensionError("row", 1, 0, "game")
        cols = len(self.payoff_A[0])
        _check_shape(self.payoff_A, rows, cols, "payoff_A")
        _check_shape(self.payoff_B, rows, cols, "payoff_B")
        rl = tuple(self.row_labels) or tuple(str(i) for i in range(rows))
        cl = tuple(self.col_labels) or tuple(str(j) for j in range(cols))
        if len(rl) != rows:
            raise DimensionError("row", rows, len(rl), "row labels")
        if len(cl) != cols:
            raise DimensionError("column", cols, len(cl), "column labels")
        object.__setattr__(self, "row_labels", rl)
        object.__setattr__(self, "col_labels", cl)

    @property
    def rows(self) -> int:
        return len(self.payoff_A)

    @property
    def cols(self) -> int:
        return len(self.payoff_A[0])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def payoff(self, player: str) -> Matrix:
        return self.payoff_A if player == A else self.payoff_B

    def actions(self, player: str) -> int:
        return self.rows if player == A else self.cols

    def labels(self, player: str) -> Tuple[str, ...]:
        return self.row_labels if player == A else self.col_labels

    def with_payoffs(self, payoff_A: Matrix, payoff_B: Matrix) -> "Game":
        return Game(payoff_A, payoff_B, self.row_labels, self.col_labels)

    def shifted(self, c_A, c_B) -> "Game":
        ca, cb = to_scalar(c_A), to_scalar(c_B)
        return self.with_payoffs(
            [[v + ca for v in row] for row in self.payoff_A],
            [[v + cb for v in row] for row in self.payoff_B],
        )


def own_view(game: Game, player: str) -> Matrix:
    """player's payoffs indexed [own action][opponent action]."""
    return game.payoff_A if player == A else transpose(game.payoff_B)


def from_own_view(m: Matrix, player: str) -> Matrix:
    return m if player == A else transpose(m)


def payoff_spread(game: Game) -> Fraction:
    """L: largest payoff minus smallest, over both matrices."""
    vals = [v for m in (game.payoff_A, game.payoff_B) for row in m for v in row]
    return max(vals) - min(vals)


# ----------- Strategies -----------

@dataclass(frozen=True)
class MixedStrategy:
    owner: str
    probs: Tuple[Fraction, ...]

    def __post_init__(self):
        if self.owner not in PLAYERS:
            raise ValueError(f"unknown player {self.owner!r}")
        probs = tuple(to_scalar(p) for p in self.probs)
        if not probs:
            raise DimensionError("strategy", 1, 0, f"strategy of {self.owner}")
        if any(p < 0 for p in probs):
            raise ValueError(f"negative probability in strategy of {self.owner}: {probs}")
        if sum(probs) != 1:
            raise ValueError(f"probabilities of {self.owner} sum to {sum(probs)}, not 1")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def pure(cls, owner: str, n: int, k: int) -> "MixedStrategy":
        return cls(owner, tuple(Fraction(int(i == k)) for i in range(n)))

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(i for i, p in enumerate(self.probs) if p > 0)

    @property
    def is_pure(self) -> bool:
        return len(self.support) == 1

    def __len__(self):
        return len(self.probs)


@dataclass(frozen=True)
class StrategyProfile:
    sigma_A: MixedStrategy
    sigma_B: MixedStrategy

    def __post_init__(self):
        if self.sigma_A.owner != A or self.sigma_B.owner != B:
            raise ValueError("profile slots must hold A's and B's strategies in that order")

    def of(self, player: str) -> MixedStrategy:
        return self.sigma_A if player == A else self.sigma_B

    def key(self) -> Tuple[Fraction, ...]:
        """Lexicographic order key: mass on low-index actions sorts first."""
        return tuple(-p for p in self.sigma_A.probs + self.sigma_B.probs)


def pure_profile(game: Game, a: int, b: int) -> StrategyProfile:
    return StrategyProfile(MixedStrategy.pure(A, game.rows, a), MixedStrategy.pure(B, game.cols, b))


def profile_of(probs_A: Sequence, probs_B: Sequence) -> StrategyProfile:
    return StrategyProfile(MixedStrategy(A, tuple(probs_A)), MixedStrategy(B, tuple(probs_B)))


def describe_profile(game: Game, profile: StrategyProfile) -> str:
    """(y,z) for pure profiles, otherwise the probability vectors."""
    parts = []
    for player in PLAYERS:
        s = profile.of(player)
        labels = game.labels(player)
        if s.is_pure:
            parts.append(labels[s.support[0]])
        else:
            parts.append("(" + ",".join(str(p) for p in s.probs) + ")")
    return "(" + ", ".join(parts) + ")"


# ----------- Contracts -----------

@dataclass(frozen=True)
class Contract:
    payer: str
    transfers: Matrix

    def __post_init__(self):
        if self.payer not in PLAYERS:
            raise ContractError(f"unknown payer {self.payer!r}")
        object.__setattr__(self, "transfers", to_matrix(self.transfers))

    @classmethod
    def null(cls, payer: str, rows: int, cols: int) -> "Contract":
        return cls(payer, tuple((Fraction(0),) * cols for _ in range(rows)))

    @property
    def is_null(self) -> bool:
        return all(v == 0 for row in self.transfers for v in row)

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.transfers), len(self.transfers[0]) if self.transfers else 0


def null_contract(game: Game, payer: str) -> Contract:
    return Contract.null(payer, game.rows, game.cols)


def shift_contract(contract: Contract, x) -> Contract:
    """Adds x to every transfer; best responses of the payer are unchanged."""
    x = to_scalar(x)
    return Contract(contract.payer, tuple(tuple(v + x for v in row) for row in contract.transfers))


def expected_transfer(contract: Optional[Contract], profile: StrategyProfile) -> Fraction:
    if contract is None:
        return Fraction(0)
    return _bilinear(contract.transfers, profile.sigma_A.probs, profile.sigma_B.probs)


@dataclass(frozen=True)
class PostContractGame:
    base: Game
    contract_A: Optional[Contract] = None
    contract_B: Optional[Contract] = None
    effective: Game = field(default=None, compare=False)

    def contract(self, player: str) -> Optional[Contract]:
        return self.contract_A if player == A else self.contract_B

    @property
    def contracts(self) -> Tuple[Contract, ...]:
        return tuple(c for c in (self.contract_A, self.contract_B) if c is not None)


def _check_contract(game: Game, contract: Contract):
    rows, cols = contract.shape
    if rows != game.rows:
        raise DimensionError("row", game.rows, rows, f"contract of {contract.payer}")
    if cols != game.cols:
        raise DimensionError("column", game.cols, cols, f"contract of {contract.payer}")


def _minus(m: Matrix, d: Optional[Contract]) -> Matrix:
    if d is None:
        return m
    return tuple(tuple(u - t for u, t in zip(mr, dr)) for mr, dr in zip(m, d.transfers))


def apply_two(game: Game, contract_A: Optional[Contract], contract_B: Optional[Contract]) -> PostContractGame:
    """Post-contract game: each payer's payoffs lose its transfers; either may be None."""
    for slot, c in ((A, contract_A), (B, contract_B)):
        if c is None:
            continue
        if c.payer != slot:
            if contract_A is not None and contract_B is not None and contract_A.payer == contract_B.payer:
                raise ContractError(f"both contracts have payer {c.payer}")
            raise ContractError(f"contract in slot {slot} is paid by {c.payer}")
        _check_contract(game, c)
    eff = game.with_payoffs(_minus(game.payoff_A, contract_A), _minus(game.payoff_B, contract_B))
    return PostContractGame(game, contract_A, contract_B, eff)


def apply_contract(game: Game, contract: Contract) -> PostContractGame:
    if contract.payer == A:
        return apply_two(game, contract, None)
    return apply_two(game, None, contract)


def apply_contracts(game: Game, contracts: Iterable[Contract]) -> PostContractGame:
    """Like apply_two but takes the contracts in any order."""
    slots = {A: None, B: None}
    for c in contracts:
        if slots[c.payer] is not None:
            raise ContractError(f"two contracts with payer {c.payer}")
        slots[c.payer] = c
    return apply_two(game, slots[A], slots[B])


# ----------- Payoffs / best responses -----------

def _bilinear(m: Matrix, x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for xi, row in zip(x, m):
        if xi:
            total += xi * sum((v * yj for v, yj in zip(row, y) if yj), Fraction(0))
    return total


def _check_profile(game: Game, profile: StrategyProfile):
    if len(profile.sigma_A) != game.rows:
        raise DimensionError("row", game.rows, len(profile.sigma_A), "strategy of A")
    if len(profile.sigma_B) != game.cols:
        raise DimensionError("column", game.cols, len(profile.sigma_B), "strategy of B")


def expected_payoff(game: Game, profile: StrategyProfile, player: str) -> Fraction:
    """σ_Aᵀ U_i σ_B, exactly."""
    _check_profile(game, profile)
    return _bilinear(game.payoff(player), profile.sigma_A.probs, profile.sigma_B.probs)


def action_payoffs(game: Game, player: str, opponent: MixedStrategy) -> Tuple[Fraction, ...]:
    """Payoff of each of player's pure actions against opponent's mixed strategy."""
    if opponent.owner == player:
        raise ValueError(f"opponent strategy must belong to {other(player)}, not {player}")
    n = game.actions(opponent.owner)
    if len(opponent) != n:
        axis = "row" if opponent.owner == A else "column"
        raise DimensionError(axis, n, len(opponent), f"strategy of {opponent.owner}")
    own = own_view(game, player)
    return tuple(sum((v * q for v, q in zip(row, opponent.probs) if q), Fraction(0)) for row in own)


def pure_best_responses(game: Game, player: str, opponent: MixedStrategy) -> FrozenSet[int]:
    vals = action_payoffs(game, player, opponent)
    best = max(vals)
    return frozenset(i for i, v in enumerate(vals) if v == best)


def is_best_response(game: Game, player: str, own: MixedStrategy, opponent: MixedStrategy) -> bool:
    if own.owner != player:
        raise ValueError(f"own strategy belongs to {own.owner}, not {player}")
    if len(own) != game.actions(player):
        axis = "row" if player == A else "column"
        raise DimensionError(axis, game.actions(player), len(own), f"strategy of {player}")
    return set(own.support) <= pure_best_responses(game, player, opponent)


def is_nash(game: Game, profile: StrategyProfile) -> bool:
    return (is_best_response(game, A, profile.sigma_A, profile.sigma_B)
            and is_best_response(game, B, profile.sigma_B, profile.sigma_A))


# ----------- Dominance -----------

def dominant_strategies(game: Game, player: str, mode: str = "strict") -> Tuple[int, ...]:
    """Every action qualifying as dominant in the given mode, ascending.

    strict: better than every other action against every opponent pure action.
    weak: never worse than any other action, and strictly better than some
    action somewhere (duplicate rows may therefore both qualify).
    """
    if mode not in ("strict", "weak"):
        raise ValueError(f"mode must be 'strict' or 'weak', not {mode!r}")
    own = own_view(game, player)
    n = len(own)
    if n == 1:
        return (0,)
    found = []
    for a in range(n):
        others = [own[o] for o in range(n) if o != a]
        if mode == "strict":
            ok = all(u > w for row in others for u, w in zip(own[a], row))
        else:
            ok = (all(u >= w for row in others for u, w in zip(own[a], row))
                  and any(u > w for row in others for u, w in zip(own[a], row)))
        if ok:
            found.append(a)
    return tuple(found)


def dominant_strategy(game: Game, player: str, mode: str = "strict") -> Optional[int]:
    """Lowest-index dominant action, or None."""
    found = dominant_strategies(game, player, mode)
    return found[0] if found else None


def payoff_bounds(game: Game, player: str) -> Tuple[Fraction, Fraction]:
    vals = [v for row in game.payoff(player) for v in row]
    return min(vals), max(vals)
