import os
from fractions import Fraction

# Defaults
DEFAULT_EPSILON = Fraction(1, 100)
DEFAULT_MARGIN = Fraction(1, 100)
DEFAULT_MENU_STEPS = 4
DEFAULT_GRID = 60
DEFAULT_POLICY = "miner_optimistic"

# Slope of the pull toward the witness column in epsilon contracts
EPSILON_PULL = Fraction(1, 2)

# Offers the miner prefers at exact payoff ties, earliest first
MINER_TIE_ORDER = ("null", "A", "B", "both")

DECIMAL_PLACES = 10

# Exit codes
EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVARIANT = 3

THREADS_ENV = "GAME_MINER_THREADS"


def thread_cap() -> int:
    """Worker cap from $GAME_MINER_THREADS; unset or bad values mean serial."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
