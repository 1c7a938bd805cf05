"""The behavioral type aggregate: named automata and regexes describing
aspects of one component's behavior, plus the per-method time budget table."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .automata import BehavioralTypeAutomaton
from .errors import ContractError
from .regex import RegularExpr


@dataclass(frozen=True)
class MaxTimeTable:
    """Partial map from method names to millisecond budgets; a missing key
    means the method's execution time is unconstrained."""

    entries: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", dict(self.entries))
        for method, millis in self.entries.items():
            if not isinstance(millis, int) or millis <= 0:
                raise ContractError(
                    f"max execution time for {method!r} must be a positive integer")

    def limit(self, method: str) -> int | None:
        return self.entries.get(method)

    def __iter__(self) -> Iterator[str]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)


@dataclass(frozen=True)
class BehavioralType:
    id: str
    automata: tuple[tuple[str, BehavioralTypeAutomaton], ...] = ()
    regexes: tuple[tuple[str, RegularExpr], ...] = ()
    maxtimes: MaxTimeTable = field(default_factory=MaxTimeTable)
    meta: Mapping[str, str] = field(default_factory=dict)
    param_locations: Mapping[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "automata", tuple(self.automata))
        object.__setattr__(self, "regexes", tuple(self.regexes))
        object.__setattr__(self, "meta", dict(self.meta))
        object.__setattr__(self, "param_locations",
                           {k: frozenset(v) for k, v in dict(self.param_locations).items()})
        if not self.id:
            raise ContractError("behavioral type id must be non-empty")
        names = [n for n, _ in self.automata] + [n for n, _ in self.regexes]
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise ContractError(f"duplicate model names in type {self.id!r}: {sorted(dupes)}")
        known = set()
        for _, automaton in self.automata:
            known |= {label.name for label in automaton.alphabet}
        for _, expr in self.regexes:
            known |= {label.name for label in expr.atoms()}
        orphans = [m for m in self.maxtimes if m not in known]
        if orphans:
            raise ContractError(
                f"maxtimes methods never mentioned by type {self.id!r}: {sorted(orphans)}")
        for name, locs in self.param_locations.items():
            automaton = dict(self.automata).get(name)
            if automaton is None:
                raise ContractError(f"param_locations for unknown automaton {name!r}")
            stray = locs - automaton.locations
            if stray:
                raise ContractError(
                    f"param_locations outside automaton {name!r}: {sorted(stray)}")

    def automaton(self, name: str) -> BehavioralTypeAutomaton:
        for n, a in self.automata:
            if n == name:
                return a
        raise ContractError(f"type {self.id!r} has no automaton named {name!r}")

    def regex(self, name: str) -> RegularExpr:
        for n, r in self.regexes:
            if n == name:
                return r
        raise ContractError(f"type {self.id!r} has no regex named {name!r}")

    def automaton_names(self) -> list[str]:
        return [n for n, _ in self.automata]
