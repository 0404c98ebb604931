"""Exception hierarchy.

Everything raised on purpose derives from :class:`IGGPError`; the CLI maps
those to exit status 1 and ``OSError`` to exit status 2.
"""

from __future__ import annotations


class IGGPError(Exception):
    """Base class for domain errors (bad input, bad semantics)."""


class ParseError(IGGPError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


class ArityError(IGGPError):
    pass


class UnsafeRule(IGGPError):
    def __init__(self, rule, variable: str):
        self.rule = rule
        self.variable = variable
        super().__init__(f"unsafe variable ?{variable} in rule {rule}")


class Unstratifiable(IGGPError):
    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__("negation inside a dependency cycle: " + " -> ".join(self.cycle))


class TermDepthExceeded(IGGPError):
    pass


class IterationCapExceeded(IGGPError):
    pass


class SignatureError(IGGPError):
    pass


class IllTyped(IGGPError):
    def __init__(self, term, position: int, message: str):
        self.term = term
        self.position = position
        super().__init__(f"ill-typed argument {position} of {term}: {message}")


class UndeclaredSymbol(SignatureError):
    def __init__(self, symbol: str, detail: str = ""):
        self.symbol = symbol
        super().__init__(f"symbol {symbol!r} is not declared in the signature{detail}")


class EnumerationCapExceeded(SignatureError):
    pass


class GameError(IGGPError):
    pass


class DeadEnd(GameError):
    def __init__(self, role: str, episode: int | None = None, step: int | None = None):
        self.role = role
        self.episode = episode
        self.step = step
        where = ""
        if episode is not None:
            where = f" (episode {episode}, step {step})"
        super().__init__(f"role {role} has no legal move in a non-terminal state{where}")


class IllegalAction(GameError):
    def __init__(self, role: str, action):
        self.role = role
        self.action = action
        super().__init__(f"illegal action {action} for role {role}")


class RewardError(GameError):
    pass


class NestingTooDeep(IGGPError):
    pass


class NameCollision(IGGPError):
    pass


class DatasetFormatError(ParseError):
    pass


class UnknownGame(IGGPError):
    pass


class PredictorError(IGGPError):
    pass
