"""Exception types shared across the package."""

from __future__ import annotations


class ProtomataError(Exception):
    """Base class for all library errors."""


class ContractError(ProtomataError):
    """A precondition or structural invariant was violated."""


class ParseError(ProtomataError):
    """Malformed input text.  Carries a location when one is known."""

    def __init__(self, message: str, *, line: int | None = None,
                 column: int | None = None, pointer: str | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        elif pointer is not None:
            loc = f" (at {pointer})"
        super().__init__(message + loc)
        self.line = line
        self.column = column
        self.pointer = pointer


class StateLimitError(ProtomataError):
    """Exploration hit the configured product-state bound."""

    def __init__(self, bound: int, states_explored: int):
        super().__init__(
            f"state bound {bound} exceeded after exploring {states_explored} states")
        self.bound = bound
        self.states_explored = states_explored


class SynthesisUnsat(ProtomataError):
    """No admissible priority set exists for the network."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class IncompatibleProtocolError(ProtomataError):
    """Protocol selection found no usable initial call."""
