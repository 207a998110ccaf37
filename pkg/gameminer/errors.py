from typing import Sequence


class GameMinerError(Exception):
    """Base for every error the library raises on purpose."""


class DimensionError(GameMinerError, ValueError):
    def __init__(self, axis: str, expected: int, got: int, what: str = ""):
        self.axis = axis
        self.expected = expected
        self.got = got
        where = f" in {what}" if what else ""
        super().__init__(f"{axis} dimension mismatch{where}: expected {expected}, got {got}")


class ContractError(GameMinerError, ValueError):
    pass


class BestResponseError(GameMinerError, ValueError):
    """A target profile fails a best-response check it was required to pass."""


class UniquenessError(GameMinerError):
    """No unique equilibrium could be certified; carries the survivors."""

    def __init__(self, msg: str, equilibria: Sequence = ()):
        self.equilibria = tuple(equilibria)
        super().__init__(msg)


class SelectionError(GameMinerError, ValueError):
    pass


class InvariantViolation(GameMinerError, AssertionError):
    pass


class ParseError(GameMinerError, ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        loc = f"line {line}, col {col}: " if line else ""
        super().__init__(f"{loc}{msg}")
