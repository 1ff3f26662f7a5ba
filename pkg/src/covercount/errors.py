"""Exception types shared across the package."""

from __future__ import annotations


class CoverCountError(Exception):
    """Base class for all package-specific errors."""


class UnsatisfiableError(CoverCountError):
    """The instance has no satisfying assignment; the count is exactly 0."""


class EmptyClauseSignal(CoverCountError):
    """Pinning a variable to 0 produced an empty clause (falsum).

    Raised only from the pin-to-zero primitive.  Marginal evaluation is
    organized so that it never queries such a sub-instance: a sibling chain
    stops as soon as a child ratio is exactly 0, which is precisely the
    situation in which the next pin-to-zero would empty a clause.
    """

    def __init__(self, var: int):
        super().__init__(f"pinning x{var} to 0 produced an empty clause")
        self.var = var


class DegreeExceededError(CoverCountError):
    def __init__(self, var: int, degree: int, limit: int):
        super().__init__(
            f"variable x{var} occurs in {degree} constraints (limit {limit})"
        )
        self.var = var
        self.degree = degree
        self.limit = limit


class EdgeSizeExceededError(CoverCountError):
    def __init__(self, edge_index: int, size: int, limit: int):
        super().__init__(
            f"hyperedge #{edge_index} has {size} vertices (limit {limit})"
        )
        self.edge_index = edge_index
        self.size = size
        self.limit = limit


class NodeBudgetExceededError(CoverCountError):
    def __init__(self, budget: int):
        super().__init__(f"computation tree exceeded the node budget of {budget}")
        self.budget = budget


class TooLargeForOracleError(CoverCountError):
    def __init__(self, live: int, cap: int):
        super().__init__(f"{live} constrained variables exceed the oracle cap of {cap}")
        self.live = live
        self.cap = cap


class DivisionUndefinedError(CoverCountError):
    """Marginal ratio undefined because no satisfying assignment sets x=1."""


class GenerationFailedError(CoverCountError):
    """Random-instance generation could not meet its constraints."""


class BoundViolatedError(CoverCountError):
    """A decay-rate regression found a point above its claimed bound."""

    def __init__(self, name: str, point: tuple, value: float, bound: float):
        super().__init__(f"{name}: value {value!r} at {point!r} violates bound {bound!r}")
        self.name = name
        self.point = point
        self.value = value
        self.bound = bound


class FormatError(CoverCountError):
    """Syntax or structural error in an input file."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", col {col}" if col is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.col = col


class NegativeLiteralError(FormatError):
    """A negative literal appeared in a format restricted to monotone CNF."""
