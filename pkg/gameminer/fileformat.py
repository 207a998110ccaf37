# gameminer/fileformat.py
"""
Text game files.

    # cell-phone game
    game 2 2
    labels A: H L
    labels B: H L
    A:
    1 2
    0 1
    B:
    1/2 0
    0   1
    contract eps100 payer=A:
    1.5 .49
    0   -.5
    menu epsilon=1/100 steps=4 restrict fixtures-only

Entries are integers, p/q or decimals and are read exactly.
"""
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .errors import DimensionError, ParseError
from .game_core import A, B, PLAYERS, Contract, Game, Matrix
from .utils import fmt_scalar

_NUMBER = re.compile(r"[+-]?(?:\d+/\d+|\d+\.?\d*|\.\d+)")
_CONTRACT = re.compile(r"contract\s+(\S+)\s+payer=(\S+)\s*:$")
_MENU_FLAGS = ("restrict", "fixtures-only")


@dataclass(frozen=True)
class MenuSettings:
    epsilon: Optional[Fraction] = None
    steps: Optional[int] = None
    restrict: bool = False
    fixtures_only: bool = False


@dataclass(frozen=True)
class GameFile:
    game: Game
    contracts: Tuple[Tuple[str, Contract], ...] = ()
    menu: MenuSettings = MenuSettings()
    path: Optional[str] = None

    def contract(self, name: str) -> Contract:
        for n, c in self.contracts:
            if n == name:
                return c
        raise KeyError(name)

    def contracts_of(self, player: str) -> Tuple[Contract, ...]:
        return tuple(c for _, c in self.contracts if c.payer == player)


def _strip(line: str) -> str:
    i = line.find("#")
    return (line if i < 0 else line[:i]).rstrip()


def _tokens(line: str) -> List[Tuple[str, int]]:
    """(token, 1-based column) pairs."""
    return [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", line)]


def parse_number(tok: str, line: int = 0, col: int = 0) -> Fraction:
    if not _NUMBER.fullmatch(tok):
        raise ParseError(f"not a number: {tok!r}", line, col)
    try:
        return Fraction(tok)
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in {tok!r}", line, col) from None


class _Lines:
    def __init__(self, text: str):
        self.items = [(i, _strip(raw)) for i, raw in enumerate(text.splitlines(), start=1)]
        self.items = [(i, s) for i, s in self.items if s.strip()]
        self.pos = 0

    def next(self) -> Optional[Tuple[int, str]]:
        if self.pos >= len(self.items):
            return None
        item = self.items[self.pos]
        self.pos += 1
        return item

    @property
    def last_line(self) -> int:
        return self.items[-1][0] if self.items else 1


def _read_matrix(lines: _Lines, rows: int, cols: int, what: str) -> Matrix:
    out = []
    for r in range(rows):
        item = lines.next()
        if item is None:
            raise ParseError(f"{what}: expected {rows} rows, file ended after {r}", lines.last_line, 1)
        ln, text = item
        toks = _tokens(text)
        if len(toks) != cols:
            col = toks[cols][1] if len(toks) > cols else len(text) + 1
            raise ParseError(f"row {r + 1} of {what} has {len(toks)} entries, expected {cols}", ln, col)
        out.append(tuple(parse_number(t, ln, c) for t, c in toks))
    return tuple(out)


def parse_game_file(text: str, path: Optional[str] = None) -> GameFile:
    lines = _Lines(text)
    first = lines.next()
    if first is None:
        raise ParseError("empty game file", 1, 1)
    ln, header = first
    toks = _tokens(header)
    if len(toks) != 3 or toks[0][0] != "game":
        raise ParseError("expected header 'game <rows> <cols>'", ln, 1)
    dims = []
    for tok, col in toks[1:]:
        if not tok.isdigit() or int(tok) < 1:
            raise ParseError(f"bad dimension {tok!r}", ln, col)
        dims.append(int(tok))
    rows, cols = dims

    mats: Dict[str, Matrix] = {}
    labels: Dict[str, Tuple[str, ...]] = {}
    contracts: List[Tuple[str, Contract]] = []
    menu = MenuSettings()
    while True:
        item = lines.next()
        if item is None:
            break
        ln, text = item
        s = text.strip()
        indent = len(text) - len(text.lstrip()) + 1
        head = s.split()[0]
        if s in ("A:", "B:"):
            who = s[0]
            if who in mats:
                raise ParseError(f"second payoff block for {who}", ln, indent)
            mats[who] = _read_matrix(lines, rows, cols, f"payoff {who}")
        elif head == "labels":
            m = re.fullmatch(r"labels\s+([AB])\s*:\s*(.*)", s)
            if not m:
                raise ParseError("expected 'labels A: ...' or 'labels B: ...'", ln, indent)
            who, names = m.group(1), m.group(2).split()
            want = rows if who == A else cols
            if len(names) != want:
                raise ParseError(f"{len(names)} labels for {who}, expected {want}", ln, indent)
            labels[who] = tuple(names)
        elif head == "contract":
            m = _CONTRACT.fullmatch(s)
            if not m:
                raise ParseError("expected 'contract <name> payer=<A|B>:'", ln, indent)
            name, payer = m.group(1), m.group(2)
            if payer not in PLAYERS:
                raise ParseError(f"payer must be A or B, got {payer!r}", ln, indent + s.index("payer=") + 6)
            if any(n == name for n, _ in contracts):
                raise ParseError(f"duplicate contract name {name!r}", ln, indent)
            contracts.append((name, Contract(payer, _read_matrix(lines, rows, cols, f"contract {name}"))))
        elif head == "menu":
            menu = _parse_menu(s, ln, indent)
        else:
            raise ParseError(f"unexpected line {head!r}", ln, indent)

    for who in PLAYERS:
        if who not in mats:
            raise ParseError(f"missing payoff block '{who}:'", lines.last_line, 1)
    try:
        game = Game(mats[A], mats[B], labels.get(A, ()), labels.get(B, ()))
    except DimensionError as e:
        raise ParseError(str(e), 1, 1) from e
    return GameFile(game, tuple(contracts), menu, path)


def _parse_menu(s: str, ln: int, indent: int) -> MenuSettings:
    opts = {}
    flags = set()
    for tok, col in _tokens(s)[1:]:
        key, eq, val = tok.partition("=")
        col += indent - 1
        if not eq:
            if key not in _MENU_FLAGS:
                raise ParseError(f"unknown menu flag {key!r}", ln, col)
            flags.add(key)
        elif key == "epsilon":
            opts[key] = parse_number(val, ln, col + len(key) + 1)
            if opts[key] <= 0:
                raise ParseError("epsilon must be > 0", ln, col)
        elif key == "steps":
            if not val.isdigit():
                raise ParseError(f"steps must be a nonnegative integer, got {val!r}", ln, col)
            opts[key] = int(val)
        else:
            raise ParseError(f"unknown menu option {key!r}", ln, col)
    return MenuSettings(opts.get("epsilon"), opts.get("steps"), "restrict" in flags, "fixtures-only" in flags)


def load_game_file(path: str) -> GameFile:
    with open(path, encoding="utf-8") as f:
        return parse_game_file(f.read(), path)


# ----------- Serialization -----------

def _matrix_lines(m: Matrix) -> List[str]:
    cells = [[fmt_scalar(v) for v in row] for row in m]
    width = max(len(c) for row in cells for c in row)
    return [" ".join(c.rjust(width) for c in row) for row in cells]


def _default_labels(labels: Tuple[str, ...]) -> bool:
    return labels == tuple(str(i) for i in range(len(labels)))


def serialize_game(game: Game, contracts=(), menu: Optional[MenuSettings] = None) -> str:
    out = [f"game {game.rows} {game.cols}"]
    for who in PLAYERS:
        names = game.labels(who)
        if _default_labels(names):
            continue
        for n in names:
            if not n or any(ch.isspace() for ch in n) or "#" in n:
                raise ValueError(f"label {n!r} cannot be written to a game file")
        out.append(f"labels {who}: " + " ".join(names))
    for who in PLAYERS:
        out.append(f"{who}:")
        out.extend(_matrix_lines(game.payoff(who)))
    for name, c in contracts:
        out.append(f"contract {name} payer={c.payer}:")
        out.extend(_matrix_lines(c.transfers))
    if menu is not None and menu != MenuSettings():
        parts = ["menu"]
        if menu.epsilon is not None:
            parts.append(f"epsilon={fmt_scalar(menu.epsilon)}")
        if menu.steps is not None:
            parts.append(f"steps={menu.steps}")
        if menu.restrict:
            parts.append("restrict")
        if menu.fixtures_only:
            parts.append("fixtures-only")
        out.append(" ".join(parts))
    return "\n".join(out) + "\n"


def serialize_game_file(gf: GameFile) -> str:
    return serialize_game(gf.game, gf.contracts, gf.menu)
