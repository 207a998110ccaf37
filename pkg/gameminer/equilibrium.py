# gameminer/equilibrium.py
"""
Nash equilibria of bimatrix games.

enumerate_nash() is exact support enumeration over Fraction. It is
complete for nondegenerate games; for degenerate ones it reports the
equilibria it can pin down from minimal supports and says so.

grid_oracle_*() is an independent brute-force check on the n-division
simplex grid, vectorized with numpy over integer-scaled payoffs.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import SelectionError
from .game_core import (
    A, B, PLAYERS,
    Game, MixedStrategy, PostContractGame, StrategyProfile,
    apply_two, expected_payoff, expected_transfer, is_nash, own_view,
    payoff_spread, pure_best_responses,
)
from .lp import MANY, UNIQUE, gauss_solve
from .utils import parallel_map

log = logging.getLogger(__name__)


# ----------- Types -----------

@dataclass(frozen=True)
class EquilibriumSet:
    equilibria: Tuple[StrategyProfile, ...]
    degenerate: bool
    complete: bool

    def __len__(self):
        return len(self.equilibria)

    def __iter__(self):
        return iter(self.equilibria)


MINER_OPTIMISTIC = "miner_optimistic"
CONTRACTOR_OPTIMISTIC = "contractor_optimistic"
ADVERSARIAL = "adversarial_to"
LEXICOGRAPHIC = "lexicographic"
POLICY_KINDS = (MINER_OPTIMISTIC, CONTRACTOR_OPTIMISTIC, ADVERSARIAL, LEXICOGRAPHIC)


@dataclass(frozen=True)
class SelectionPolicy:
    kind: str = MINER_OPTIMISTIC
    player: Optional[str] = None  # only for adversarial_to

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown selection policy {self.kind!r}")
        if self.kind == ADVERSARIAL and self.player not in PLAYERS:
            raise ValueError("adversarial_to needs a player (A or B)")

    @classmethod
    def parse(cls, text: str) -> "SelectionPolicy":
        """'miner_optimistic', 'lexicographic', 'adversarial_to:B', ..."""
        kind, _, who = text.partition(":")
        return cls(kind.strip(), who.strip() or None)

    def __str__(self):
        return f"{self.kind}:{self.player}" if self.player else self.kind


# ----------- Support enumeration -----------

def _mixtures(mat, tie: Sequence[int], var: Sequence[int], size: int) -> Tuple[List[Tuple[Fraction, ...]], bool]:
    """Probability vectors z over `var` making rows `tie` of mat pay the same.

    mat is the indifferent player's own view, [own action][mixer action].
    Returns (candidates, singular). A singular but consistent system is
    replaced by the unique solutions on its smaller sub-supports.
    """
    def solve(cols):
        M = [[mat[t][v] for v in cols] + [Fraction(-1)] for t in tie]
        M.append([Fraction(1)] * len(cols) + [Fraction(0)])
        rhs = [Fraction(0)] * len(tie) + [Fraction(1)]
        return gauss_solve(M, rhs)

    def embed(cols, z):
        full = [Fraction(0)] * size
        for v, p in zip(cols, z):
            full[v] = p
        return tuple(full)

    status, z = solve(var)
    if status == UNIQUE:
        return ([embed(var, z[:-1])] if all(p >= 0 for p in z[:-1]) else []), False
    if status != MANY:
        return [], False
    found = []
    for k in range(1, len(var)):
        for cols in itertools.combinations(var, k):
            st, z = solve(cols)
            if st == UNIQUE and all(p >= 0 for p in z[:-1]):
                cand = embed(cols, z[:-1])
                if cand not in found:
                    found.append(cand)
    return found, True


def _support_pair(args) -> List[StrategyProfile]:
    game, I, J = args
    UA = own_view(game, A)
    UBt = own_view(game, B)
    xs, _ = _mixtures(UBt, J, I, game.rows)
    if not xs:
        return []
    ys, _ = _mixtures(UA, I, J, game.cols)
    out = []
    for x in xs:
        for y in ys:
            prof = StrategyProfile(MixedStrategy(A, x), MixedStrategy(B, y))
            if is_nash(game, prof):
                out.append(prof)
    return out


def _pure_degenerate(game: Game) -> bool:
    for player in PLAYERS:
        opp = B if player == A else A
        for k in range(game.actions(opp)):
            if len(pure_best_responses(game, player, MixedStrategy.pure(opp, game.actions(opp), k))) > 1:
                return True
    return False


def _normalized(game: Game) -> Game:
    # constant shifts and labels never change the equilibrium set
    return Game(
        [[v - game.payoff_A[0][0] for v in row] for row in game.payoff_A],
        [[v - game.payoff_B[0][0] for v in row] for row in game.payoff_B],
    )


@lru_cache(maxsize=8192)
def _enumerate(game: Game) -> EquilibriumSet:
    work = [
        (game, I, J)
        for k in range(1, min(game.rows, game.cols) + 1)
        for I in itertools.combinations(range(game.rows), k)
        for J in itertools.combinations(range(game.cols), k)
    ]
    found: List[StrategyProfile] = []
    for batch in parallel_map(_support_pair, work):
        for prof in batch:
            if prof not in found:
                found.append(prof)

    degenerate = _pure_degenerate(game)
    for prof in found:
        x, y = prof.sigma_A, prof.sigma_B
        if (len(pure_best_responses(game, A, y)) > len(y.support)
                or len(pure_best_responses(game, B, x)) > len(x.support)):
            degenerate = True
            break
    log.debug("support enumeration on %dx%d: %d equilibria, degenerate=%s",
              game.rows, game.cols, len(found), degenerate)
    return EquilibriumSet(tuple(found), degenerate, not degenerate)


def enumerate_nash(game: Game) -> EquilibriumSet:
    return _enumerate(_normalized(game))


def unique_nash(game: Game) -> Optional[StrategyProfile]:
    eqs = enumerate_nash(game)
    if eqs.complete and len(eqs) == 1:
        return eqs.equilibria[0]
    return None


# ----------- Selection -----------

def _context(game_context: Union[Game, PostContractGame]) -> PostContractGame:
    if isinstance(game_context, PostContractGame):
        return game_context
    return apply_two(game_context, None, None)


def selection_score(profile: StrategyProfile, post: PostContractGame, policy: SelectionPolicy) -> Fraction:
    if policy.kind == MINER_OPTIMISTIC:
        return sum((expected_transfer(c, profile) for c in post.contracts), Fraction(0))
    if policy.kind == CONTRACTOR_OPTIMISTIC:
        payers = [c.payer for c in post.contracts] or list(PLAYERS)
        return sum((expected_payoff(post.effective, profile, i) for i in payers), Fraction(0))
    if policy.kind == ADVERSARIAL:
        return -expected_payoff(post.base, profile, policy.player)
    return Fraction(0)


def select_equilibrium(eqs: Union[EquilibriumSet, Sequence[StrategyProfile]],
                       game_context: Union[Game, PostContractGame],
                       policy: SelectionPolicy) -> StrategyProfile:
    """Deterministic pick from an equilibrium set; ties go to the lexicographically first profile."""
    items = list(eqs)
    if not items:
        raise SelectionError("cannot select from an empty equilibrium set")
    post = _context(game_context)
    ordered = sorted(items, key=StrategyProfile.key)
    best = ordered[0]
    if policy.kind == LEXICOGRAPHIC:
        return best
    best_score = selection_score(best, post, policy)
    for prof in ordered[1:]:
        s = selection_score(prof, post, policy)
        if s > best_score:
            best, best_score = prof, s
    return best


# ----------- Grid oracle -----------

def compositions(parts: int, n: int) -> np.ndarray:
    """All nonnegative integer vectors of length `parts` summing to n."""
    if parts == 1:
        return np.array([[n]], dtype=np.int64)
    rows = []
    for bars in itertools.combinations(range(n + parts - 1), parts - 1):
        prev = -1
        counts = []
        for b in bars:
            counts.append(b - prev - 1)
            prev = b
        counts.append(n + parts - 2 - prev)
        rows.append(counts)
    return np.array(rows, dtype=np.int64)


@dataclass(frozen=True)
class GridHits:
    n: int
    X: np.ndarray   # (P, rows) counts, each row sums to n
    Y: np.ndarray   # (Q, cols)
    pi: np.ndarray  # hit indices into X
    qi: np.ndarray  # hit indices into Y

    def __len__(self):
        return len(self.pi)

    def profiles(self) -> List[StrategyProfile]:
        n = self.n
        return [
            StrategyProfile(
                MixedStrategy(A, tuple(Fraction(int(c), n) for c in self.X[p])),
                MixedStrategy(B, tuple(Fraction(int(c), n) for c in self.Y[q])),
            )
            for p, q in zip(self.pi, self.qi)
        ]

    def distance_to(self, profile: StrategyProfile) -> Optional[Fraction]:
        """Smallest L∞ distance from profile to a hit, exactly; None if no hits."""
        if not len(self):
            return None
        probs = profile.sigma_A.probs + profile.sigma_B.probs
        den = math.lcm(*(p.denominator for p in probs))
        scale = self.n * den
        target_A = np.array([int(p * scale) for p in profile.sigma_A.probs], dtype=object)
        target_B = np.array([int(p * scale) for p in profile.sigma_B.probs], dtype=object)
        hx = self.X[self.pi].astype(object) * den
        hy = self.Y[self.qi].astype(object) * den
        dist = np.maximum(np.abs(hx - target_A).max(axis=1), np.abs(hy - target_B).max(axis=1))
        return Fraction(int(dist.min()), scale)


def _int_matrix(m, d: int, dtype) -> np.ndarray:
    return np.array([[int(v * d) for v in row] for row in m], dtype=dtype)


def grid_oracle_points(game: Game, n: int) -> GridHits:
    """Grid profiles whose largest unilateral pure-deviation gain is <= 2L/n."""
    if n < 1:
        raise ValueError("grid resolution must be >= 1")
    X = compositions(game.rows, n)
    Y = compositions(game.cols, n)
    vals = [v for m in (game.payoff_A, game.payoff_B) for row in m for v in row]
    d = math.lcm(*(v.denominator for v in vals))
    biggest = max(abs(int(v * d)) for v in vals)
    dtype = np.int64 if 4 * (biggest + 1) * n * n < 2 ** 62 else object
    if dtype is object:
        X, Y = X.astype(object), Y.astype(object)
    UA = _int_matrix(game.payoff_A, d, dtype)
    UB = _int_matrix(game.payoff_B, d, dtype)
    tol = 2 * int(payoff_spread(game) * d) * n

    AY = UA @ Y.T                                   # (rows, Q)
    gain_A = n * AY.max(axis=0)[None, :] - X @ AY   # (P, Q)
    XB = X @ UB                                     # (P, cols)
    gain_B = n * XB.max(axis=1)[:, None] - XB @ Y.T
    pi, qi = np.nonzero((gain_A <= tol) & (gain_B <= tol))
    log.debug("grid oracle n=%d: %d of %d profiles within tolerance", n, len(pi), len(X) * len(Y))
    return GridHits(n, X, Y, pi, qi)


def grid_oracle_nash(game: Game, resolution: int) -> List[StrategyProfile]:
    return grid_oracle_points(game, resolution).profiles()
