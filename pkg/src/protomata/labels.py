"""Event labels: a direction (expected incoming / potential outgoing / neutral),
a method name, and an optional unbound parameter placeholder."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import ContractError, ParseError

RESERVED_CHARS = set(".+*()<>:")


class Direction(Enum):
    INC = "INC"
    OUT = "OUT"
    NEUTRAL = "NEUTRAL"


def _check_name(name: str, what: str) -> None:
    if not name:
        raise ContractError(f"{what} must be non-empty")
    bad = [c for c in name if c.isspace() or c in RESERVED_CHARS]
    if bad:
        raise ContractError(
            f"{what} {name!r} contains reserved or whitespace characters: {bad}")


@dataclass(frozen=True, slots=True)
class Label:
    """An event on an automaton edge.  Two labels are equal iff direction,
    name and parameter all match; composition matches by name alone."""

    direction: Direction
    name: str
    parameter: str | None = None

    def __post_init__(self) -> None:
        _check_name(self.name, "label name")
        if self.parameter is not None:
            _check_name(self.parameter, "label parameter")

    def __str__(self) -> str:
        text = self.name if self.parameter is None else f"{self.name}<{self.parameter}>"
        if self.direction is Direction.NEUTRAL:
            return text
        return f"{self.direction.value}:{text}"

    def sort_key(self) -> str:
        return str(self)

    def with_instance(self, instance_id: str) -> "Label":
        """Bind the parameter to a concrete instance id: Lock<F> + f1 -> Lockf1."""
        if self.parameter is None:
            return self
        return Label(self.direction, self.name + instance_id, None)


def inc(name: str, parameter: str | None = None) -> Label:
    return Label(Direction.INC, name, parameter)


def out(name: str, parameter: str | None = None) -> Label:
    return Label(Direction.OUT, name, parameter)


def neutral(name: str, parameter: str | None = None) -> Label:
    return Label(Direction.NEUTRAL, name, parameter)


def parse_label(text: str) -> Label:
    """Parse ``INC:Lock``, ``OUT:LockF1``, ``Read`` or ``INC:Lock<F>``.

    Whitespace around the direction separator is tolerated (``INC: Lock``).
    """
    raw = text.strip()
    direction = Direction.NEUTRAL
    if ":" in raw:
        head, _, rest = raw.partition(":")
        head = head.strip()
        try:
            direction = Direction(head)
        except ValueError:
            raise ParseError(f"unknown label direction {head!r} in {text!r}") from None
        raw = rest.strip()
    parameter = None
    if raw.endswith(">"):
        name, sep, param = raw[:-1].partition("<")
        if not sep:
            raise ParseError(f"unbalanced parameter brackets in label {text!r}")
        raw, parameter = name.strip(), param.strip()
    try:
        return Label(direction, raw, parameter)
    except ContractError as exc:
        raise ParseError(f"bad label {text!r}: {exc}") from None
