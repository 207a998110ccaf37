# gameminer/lp.py
"""
Exact linear algebra over Fraction: a two-phase tableau simplex using
Bland's rule, and Gaussian elimination for the square-ish systems that
support enumeration produces.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import DimensionError

log = logging.getLogger(__name__)

LE, EQ, GE = "<=", "=", ">="
OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"

Bound = Tuple[Optional[Fraction], Optional[Fraction]]


@dataclass(frozen=True)
class Constraint:
    coeffs: Tuple[Fraction, ...]
    rel: str
    rhs: Fraction

    def __post_init__(self):
        if self.rel not in (LE, EQ, GE):
            raise ValueError(f"relation must be one of <=, =, >=; got {self.rel!r}")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        object.__setattr__(self, "rhs", Fraction(self.rhs))

    def holds(self, point: Sequence[Fraction]) -> bool:
        lhs = sum((c * x for c, x in zip(self.coeffs, point)), Fraction(0))
        if self.rel == LE:
            return lhs <= self.rhs
        if self.rel == GE:
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True)
class LinearProgram:
    """
    objective·x to maximize or minimize. bounds default to (0, None) per
    variable, the usual nonnegativity; (None, None) makes a variable free.
    """
    objective: Tuple[Fraction, ...]
    constraints: Tuple[Constraint, ...] = ()
    sense: str = "max"
    bounds: Tuple[Bound, ...] = ()

    def __post_init__(self):
        if self.sense not in ("max", "min"):
            raise ValueError(f"sense must be 'max' or 'min', got {self.sense!r}")
        n = len(self.objective)
        object.__setattr__(self, "objective", tuple(Fraction(c) for c in self.objective))
        cons = tuple(c if isinstance(c, Constraint) else Constraint(*c) for c in self.constraints)
        for c in cons:
            if len(c.coeffs) != n:
                raise DimensionError("variable", n, len(c.coeffs), "constraint")
        object.__setattr__(self, "constraints", cons)
        bounds = tuple(self.bounds) or ((Fraction(0), None),) * n
        if len(bounds) != n:
            raise DimensionError("variable", n, len(bounds), "bounds")
        bounds = tuple(
            (None if lo is None else Fraction(lo), None if hi is None else Fraction(hi)) for lo, hi in bounds
        )
        object.__setattr__(self, "bounds", bounds)

    @property
    def n_vars(self) -> int:
        return len(self.objective)


@dataclass(frozen=True)
class LPResult:
    status: str
    value: Optional[Fraction] = None
    point: Tuple[Fraction, ...] = field(default=())

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


# ----------- Simplex core -----------

def _pivot(T: List[List[Fraction]], basis: List[int], r: int, c: int):
    piv = T[r][c]
    T[r] = [v / piv for v in T[r]]
    row = T[r]
    for i in range(len(T)):
        if i != r and T[i][c] != 0:
            f = T[i][c]
            T[i] = [a - f * b for a, b in zip(T[i], row)]
    basis[r] = c


def _simplex(T, basis, cost, allowed) -> str:
    """Minimize cost·y over the tableau in place. Bland's rule throughout."""
    m = len(T)
    while True:
        in_basis = set(basis)
        enter = None
        for j in allowed:
            if j in in_basis:
                continue
            rc = cost[j] - sum((cost[basis[i]] * T[i][j] for i in range(m) if T[i][j]), Fraction(0))
            if rc < 0:
                enter = j
                break
        if enter is None:
            return OPTIMAL
        leave = None
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return UNBOUNDED
        _pivot(T, basis, leave, enter)


def _to_standard(lp: LinearProgram):
    """Rewrite bounded/free variables over y >= 0.

    Returns (columns, offsets, extra rows): original x_k = offset_k + Σ sign·y_col.
    """
    cols: List[List[Tuple[int, int]]] = []
    offsets: List[Fraction] = []
    extra = []  # (col, upper) meaning y_col <= upper
    n = 0
    for lo, hi in lp.bounds:
        if lo is not None:
            cols.append([(n, 1)])
            offsets.append(lo)
            if hi is not None:
                extra.append((n, hi - lo))
            n += 1
        elif hi is not None:
            cols.append([(n, -1)])
            offsets.append(hi)
            n += 1
        else:
            cols.append([(n, 1), (n + 1, -1)])
            offsets.append(Fraction(0))
            n += 2
    return cols, offsets, extra, n


def solve_lp(lp: LinearProgram) -> LPResult:
    cols, offsets, extra, ny = _to_standard(lp)

    rows = []  # (coeffs over y, rel, rhs)
    for con in lp.constraints:
        coeffs = [Fraction(0)] * ny
        rhs = con.rhs
        for k, a in enumerate(con.coeffs):
            if a == 0:
                continue
            rhs -= a * offsets[k]
            for col, sign in cols[k]:
                coeffs[col] += sign * a
        rows.append((coeffs, con.rel, rhs))
    for col, ub in extra:
        coeffs = [Fraction(0)] * ny
        coeffs[col] = Fraction(1)
        rows.append((coeffs, LE, ub))

    cost = [Fraction(0)] * ny
    const = Fraction(0)
    sign = -1 if lp.sense == "max" else 1
    for k, c in enumerate(lp.objective):
        const += c * offsets[k]
        for col, s in cols[k]:
            cost[col] += sign * s * c

    # slack/surplus then artificial columns
    m = len(rows)
    norm = []
    for coeffs, rel, rhs in rows:
        if rhs < 0:
            coeffs = [-v for v in coeffs]
            rhs = -rhs
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
        norm.append((coeffs, rel, rhs))
    n_slack = sum(1 for _, rel, _ in norm if rel != EQ)
    n_art = sum(1 for _, rel, _ in norm if rel != LE)
    width = ny + n_slack + n_art
    T: List[List[Fraction]] = []
    basis: List[int] = []
    artificial = set()
    s_next, a_next = ny, ny + n_slack
    for coeffs, rel, rhs in norm:
        row = coeffs + [Fraction(0)] * (n_slack + n_art) + [rhs]
        if rel == LE:
            row[s_next] = Fraction(1)
            basis.append(s_next)
            s_next += 1
        else:
            if rel == GE:
                row[s_next] = Fraction(-1)
                s_next += 1
            row[a_next] = Fraction(1)
            basis.append(a_next)
            artificial.add(a_next)
            a_next += 1
        T.append(row)

    # phase 1
    if artificial:
        cost1 = [Fraction(0)] * width
        for j in artificial:
            cost1[j] = Fraction(1)
        _simplex(T, basis, cost1, range(width))
        infeas = sum((T[i][-1] for i in range(m) if basis[i] in artificial), Fraction(0))
        if infeas > 0:
            log.debug("lp infeasible (phase-1 residual %s)", infeas)
            return LPResult(INFEASIBLE)
        # drive zero-level artificials out, dropping redundant rows
        i = 0
        while i < len(T):
            if basis[i] in artificial:
                j = next((j for j in range(width) if j not in artificial and T[i][j] != 0), None)
                if j is None:
                    del T[i]
                    del basis[i]
                    continue
                _pivot(T, basis, i, j)
            i += 1

    allowed = [j for j in range(width) if j not in artificial]
    cost2 = cost + [Fraction(0)] * (n_slack + n_art)
    status = _simplex(T, basis, cost2, allowed)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)

    y = [Fraction(0)] * width
    for i, j in enumerate(basis):
        y[j] = T[i][-1]
    point = tuple(offsets[k] + sum((s * y[col] for col, s in cols[k]), Fraction(0)) for k in range(lp.n_vars))
    value = sum((c * x for c, x in zip(lp.objective, point)), Fraction(0))
    return LPResult(OPTIMAL, value, point)


# ----------- Linear systems -----------

UNIQUE, NONE, MANY = "unique", "none", "many"


def gauss_solve(M: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Tuple[str, Optional[Tuple[Fraction, ...]]]:
    """Solve M·z = rhs exactly.

    Returns (UNIQUE, z), (NONE, None) for an inconsistent system, or
    (MANY, z) with z a particular solution (free variables at zero).
    """
    rows = [list(map(Fraction, r)) + [Fraction(v)] for r, v in zip(M, rhs)]
    n = len(M[0]) if M else 0
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        rows[r] = [v / piv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    for i in range(r, len(rows)):
        if rows[i][-1] != 0:
            return NONE, None
    z = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        z[c] = rows[i][-1]
    return (UNIQUE if len(pivots) == n else MANY), tuple(z)
