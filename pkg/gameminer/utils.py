import sys
from concurrent.futures import ThreadPoolExecutor
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Callable, Iterable, List, TypeVar

from .config import DECIMAL_PLACES, thread_cap

T = TypeVar("T")
R = TypeVar("R")


class Colors:
    RESET = "\033[0m"
    BOLD  = "\033[1m"

    RED    = "\033[31m"
    GREEN  = "\033[32m"
    YELLOW = "\033[33m"


def die(msg: str, code: int = 1):
    sys.stderr.write(f"{Colors.RED}error:{Colors.RESET} {msg}\n")
    raise SystemExit(code)

def warn(msg: str):
    sys.stderr.write(f"{Colors.YELLOW}warning:{Colors.RESET} {msg}\n")


def fmt_scalar(x: Fraction) -> str:
    """'5/3', '2', '-1/2' -- exact, stable."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

def decimal_str(x: Fraction, places: int = DECIMAL_PLACES) -> str:
    x = Fraction(x)
    with localcontext() as ctx:
        ctx.prec = places + 12
        d = Decimal(x.numerator) / Decimal(x.denominator)
        q = d.quantize(Decimal(1).scaleb(-places))
    s = format(q, "f").rstrip("0").rstrip(".")
    return "0" if s in ("", "-0") else s


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
    """Map with up to $GAME_MINER_THREADS workers; output order follows input order."""
    items = list(items)
    workers = min(thread_cap(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
