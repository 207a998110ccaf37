# gameminer/report.py
"""
Reports: ordered sections plus a property-check summary, rendered as JSON
(exact rationals as strings next to a decimal) or as aligned text.
"""
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from .game_core import PLAYERS, Contract, Game, StrategyProfile, describe_profile, expected_payoff
from .utils import Colors, decimal_str, fmt_scalar


def num(x, source: Optional[str] = None) -> Dict[str, str]:
    x = Fraction(x)
    d = {"exact": fmt_scalar(x), "decimal": decimal_str(x)}
    if source:
        d["source"] = source
    return d


def matrix_json(m) -> List[List[Dict[str, str]]]:
    return [[num(v) for v in row] for row in m]


def profile_json(game: Game, prof: StrategyProfile, with_payoffs: bool = True) -> Dict[str, Any]:
    out = {
        "profile": describe_profile(game, prof),
        "A": [num(p) for p in prof.sigma_A.probs],
        "B": [num(p) for p in prof.sigma_B.probs],
    }
    if with_payoffs:
        out["payoffs"] = {p: num(expected_payoff(game, prof, p)) for p in PLAYERS}
    return out


def contract_json(c: Optional[Contract], label: Optional[str] = None) -> Optional[Dict[str, Any]]:
    if c is None:
        return None
    out = {"payer": c.payer, "transfers": matrix_json(c.transfers)}
    if label is not None:
        out = {"label": label, **out}
    return out


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class Report:
    command: str
    source: Optional[str] = None
    sections: List[Tuple[str, Any]] = field(default_factory=list)
    checks: List[Check] = field(default_factory=list)

    def add(self, name: str, payload: Any) -> "Report":
        self.sections.append((name, payload))
        return self

    def check(self, name: str, ok: bool, detail: str = "") -> bool:
        self.checks.append(Check(name, bool(ok), detail))
        return bool(ok)

    def section(self, name: str) -> Any:
        for n, payload in self.sections:
            if n == name:
                return payload
        raise KeyError(name)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "source": self.source,
            "sections": {n: p for n, p in self.sections},
            "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def render(self, color: bool = False) -> str:
        bold = (lambda s: f"{Colors.BOLD}{s}{Colors.RESET}") if color else (lambda s: s)
        lines = [bold(f"game-miner {self.command}") + (f"  {self.source}" if self.source else "")]
        for name, payload in self.sections:
            lines.append("")
            lines.append(bold(f"== {name}"))
            lines.extend(_human(payload, 1))
        if self.checks:
            lines.append("")
            lines.append(bold("== checks"))
            for c in self.checks:
                mark = "ok  " if c.ok else "FAIL"
                if color:
                    mark = f"{Colors.GREEN if c.ok else Colors.RED}{mark}{Colors.RESET}"
                lines.append(f"  {mark} {c.name}" + (f"  ({c.detail})" if c.detail else ""))
        return "\n".join(lines) + "\n"


# ----------- Human rendering -----------

def _is_num(v) -> bool:
    # numbers may carry a provenance tag
    return isinstance(v, dict) and set(v) - {"source"} == {"exact", "decimal"}


def _scalar(v) -> str:
    if _is_num(v):
        return v["exact"] + (f" [{v['source']}]" if "source" in v else "")
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, list) and all(_is_num(x) or not isinstance(x, (dict, list)) for x in v):
        return "(" + ", ".join(_scalar(x) for x in v) + ")"
    if isinstance(v, list) and all(isinstance(x, list) for x in v):
        return " | ".join(_scalar(x) for x in v)
    return str(v)


def _flat(v) -> bool:
    return not isinstance(v, (dict, list)) or _is_num(v) or (
        isinstance(v, list) and all(not isinstance(x, dict) or _is_num(x) for x in v)
    )


def _table(rows: List[Dict[str, Any]], depth: int) -> List[str]:
    keys = list(rows[0])
    cells = [[_scalar(r.get(k)) for k in keys] for r in rows]
    widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
    pad = "  " * depth
    out = [pad + "  ".join(k.ljust(w) for k, w in zip(keys, widths))]
    out += [pad + "  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in cells]
    return out


def _human(payload, depth: int) -> List[str]:
    pad = "  " * depth
    if isinstance(payload, dict) and not _is_num(payload):
        out = []
        for k, v in payload.items():
            if _flat(v):
                out.append(f"{pad}{k}: {_scalar(v)}")
            else:
                out.append(f"{pad}{k}:")
                out.extend(_human(v, depth + 1))
        return out
    if isinstance(payload, list):
        if payload and all(isinstance(r, dict) and not _is_num(r) for r in payload) \
                and all(list(r) == list(payload[0]) for r in payload) \
                and all(_flat(v) for r in payload for v in r.values()):
            return _table(payload, depth)
        out = []
        for item in payload:
            sub = _human(item, depth + 1)
            if sub:
                out.append(pad + "- " + sub[0].strip())
                out.extend(sub[1:])
        return out
    return [pad + _scalar(payload)]
