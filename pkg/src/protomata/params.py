"""Parameterized specifications and their two instantiation schemes.

A parameterized label like ``Lock<F>`` stands for a family of concrete events;
binding F to an instance id concatenates it onto the name (``Lockf1``).
Per-instance expansion replicates the parameterized locations once per value;
shared expansion keeps one copy of every location and only fans out the edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .automata import BehavioralTypeAutomaton
from .btypes import BehavioralType
from .errors import ContractError
from .labels import Label, _check_name
from .regex import Alt, Atom, Concat, Epsilon, RegularExpr, Star


@dataclass(frozen=True)
class ParamSpec:
    base: RegularExpr | BehavioralTypeAutomaton
    parameters: frozenset[str]
    parameterized_locations: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "parameters", frozenset(self.parameters))
        object.__setattr__(self, "parameterized_locations",
                           frozenset(self.parameterized_locations))
        used = {label.parameter for label in _labels_of(self.base)
                if label.parameter is not None}
        undeclared = used - self.parameters
        if undeclared:
            raise ContractError(f"labels use undeclared parameters: {sorted(undeclared)}")
        if isinstance(self.base, BehavioralTypeAutomaton):
            stray = self.parameterized_locations - self.base.locations
            if stray:
                raise ContractError(f"parameterized locations not declared: {sorted(stray)}")
        elif self.parameterized_locations:
            raise ContractError("regular expressions have no locations to parameterize")

    @classmethod
    def from_type(cls, t: BehavioralType, automaton_name: str) -> "ParamSpec":
        automaton = t.automaton(automaton_name)
        params = {label.parameter for label in automaton.alphabet
                  if label.parameter is not None}
        return cls(base=automaton,
                   parameters=frozenset(params),
                   parameterized_locations=t.param_locations.get(automaton_name,
                                                                 frozenset()))


def _labels_of(base: RegularExpr | BehavioralTypeAutomaton) -> frozenset[Label]:
    if isinstance(base, BehavioralTypeAutomaton):
        return base.alphabet
    return base.atoms()


def _bind_label(label: Label, binding: Mapping[str, str]) -> Label:
    if label.parameter is None:
        return label
    value = binding.get(label.parameter)
    if value is None:
        return label
    return label.with_instance(value)


def _suffix(name: str, binding: Mapping[str, str], parameters: Sequence[str]) -> str:
    return name + "".join(binding[p] for p in sorted(parameters) if p in binding)


def substitute(p: ParamSpec, binding: Mapping[str, str]
               ) -> RegularExpr | BehavioralTypeAutomaton:
    """Replace every parameter with its bound instance id."""
    missing = p.parameters - set(binding)
    if missing:
        raise ContractError(f"unbound parameters: {sorted(missing)}")
    for value in binding.values():
        _check_name(value, "instance id")
    if isinstance(p.base, BehavioralTypeAutomaton):
        return _substitute_automaton(p, binding)
    return _substitute_regex(p.base, binding)


def _substitute_regex(expr: RegularExpr, binding: Mapping[str, str]) -> RegularExpr:
    if isinstance(expr, Epsilon):
        return expr
    if isinstance(expr, Atom):
        return Atom(_bind_label(expr.label, binding))
    if isinstance(expr, Concat):
        return Concat(tuple(_substitute_regex(c, binding) for c in expr.children))
    if isinstance(expr, Alt):
        return Alt(tuple(_substitute_regex(c, binding) for c in expr.children))
    if isinstance(expr, Star):
        return Star(_substitute_regex(expr.child, binding))
    raise ContractError(f"malformed regex node {expr!r}")


def _substitute_automaton(p: ParamSpec, binding: Mapping[str, str]
                          ) -> BehavioralTypeAutomaton:
    base = p.base
    assert isinstance(base, BehavioralTypeAutomaton)
    renaming = {loc: (_suffix(loc, binding, sorted(p.parameters))
                      if loc in p.parameterized_locations else loc)
                for loc in base.locations}
    edges = frozenset((renaming[src], _bind_label(label, binding), renaming[dst])
                      for src, label, dst in base.edges)
    return BehavioralTypeAutomaton(
        alphabet=frozenset(_bind_label(l, binding) for l in base.alphabet),
        locations=frozenset(renaming.values()),
        initial=renaming[base.initial],
        edges=edges,
        error_location=None if base.error_location is None
        else renaming[base.error_location],
    )


def _automaton_spec(p: ParamSpec, param: str) -> BehavioralTypeAutomaton:
    if not isinstance(p.base, BehavioralTypeAutomaton):
        raise ContractError("instantiation schemes apply to automata only")
    if param not in p.parameters:
        raise ContractError(f"unknown parameter {param!r}")
    return p.base


def _check_values(values: Sequence[str]) -> None:
    if not values:
        raise ContractError("instantiation needs at least one instance id")
    if len(set(values)) != len(values):
        raise ContractError(f"duplicate instance ids: {list(values)}")
    for value in values:
        _check_name(value, "instance id")


def instantiate_per_instance(p: ParamSpec, param: str,
                             values: Sequence[str]) -> BehavioralTypeAutomaton:
    """One fresh copy of every parameterized location (and its edges) per
    instance id, all hanging off the shared non-parameterized anchors."""
    base = _automaton_spec(p, param)
    _check_values(values)
    ploc = p.parameterized_locations
    if base.initial in ploc:
        raise ContractError("the initial location cannot be replicated per instance")

    def place(loc: str, value: str) -> str:
        return loc + value if loc in ploc else loc

    locations = {place(loc, v) for loc in base.locations for v in values}
    edges: set[tuple[str, Label, str]] = set()
    for src, label, dst in base.edges:
        touches = label.parameter == param or src in ploc or dst in ploc
        if touches:
            for v in values:
                lbl = label.with_instance(v) if label.parameter == param else label
                edges.add((place(src, v), lbl, place(dst, v)))
        else:
            edges.add((src, label, dst))
    return BehavioralTypeAutomaton(
        alphabet=frozenset(l for _, l, _ in edges),
        locations=frozenset(locations),
        initial=base.initial,
        edges=frozenset(edges),
    )


def instantiate_shared(p: ParamSpec, param: str,
                       values: Sequence[str]) -> BehavioralTypeAutomaton:
    """Keep every location; replicate each parameterized edge once per
    instance id between the original endpoints."""
    base = _automaton_spec(p, param)
    _check_values(values)
    edges: set[tuple[str, Label, str]] = set()
    for src, label, dst in base.edges:
        if label.parameter == param:
            for v in values:
                edges.add((src, label.with_instance(v), dst))
        else:
            edges.add((src, label, dst))
    return BehavioralTypeAutomaton(
        alphabet=frozenset(l for _, l, _ in edges),
        locations=base.locations,
        initial=base.initial,
        edges=frozenset(edges),
    )
