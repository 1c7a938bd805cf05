"""Event regular expressions and their conversion to behavioral type automata.

Surface syntax: atoms ``INC:Name`` / ``OUT:Name`` / bare ``Name`` (neutral),
parameter atoms ``Name<F>``, operators ``.`` (concatenation), ``+``
(alternative), ``*`` (star, binds tightest), and parentheses.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .automata import BehavioralTypeAutomaton, normalize
from .errors import ContractError, ParseError
from .labels import Label, parse_label


class RegularExpr:
    """Base class of the regex AST."""

    def atoms(self) -> frozenset[Label]:
        raise NotImplementedError


@dataclass(frozen=True)
class Epsilon(RegularExpr):
    def atoms(self) -> frozenset[Label]:
        return frozenset()

    def __str__(self) -> str:
        return "()"


@dataclass(frozen=True)
class Atom(RegularExpr):
    label: Label

    def atoms(self) -> frozenset[Label]:
        return frozenset({self.label})

    def __str__(self) -> str:
        return str(self.label)


@dataclass(frozen=True)
class Concat(RegularExpr):
    children: tuple[RegularExpr, ...]

    def __post_init__(self) -> None:
        if len(self.children) < 2:
            raise ContractError("concatenation needs at least two children")

    def atoms(self) -> frozenset[Label]:
        return frozenset().union(*(c.atoms() for c in self.children))

    def __str__(self) -> str:
        return ".".join(_wrap(c, for_concat=True) for c in self.children)


@dataclass(frozen=True)
class Alt(RegularExpr):
    children: tuple[RegularExpr, ...]

    def __post_init__(self) -> None:
        if len(self.children) < 2:
            raise ContractError("alternative needs at least two children")

    def atoms(self) -> frozenset[Label]:
        return frozenset().union(*(c.atoms() for c in self.children))

    def __str__(self) -> str:
        return " + ".join(str(c) for c in self.children)


@dataclass(frozen=True)
class Star(RegularExpr):
    child: RegularExpr

    def atoms(self) -> frozenset[Label]:
        return self.child.atoms()

    def __str__(self) -> str:
        return _wrap(self.child, for_concat=False) + "*"


def _wrap(expr: RegularExpr, for_concat: bool) -> str:
    if for_concat:
        return f"({expr})" if isinstance(expr, Alt) else str(expr)
    return str(expr) if isinstance(expr, (Atom, Epsilon)) else f"({expr})"


# -- parsing ---------------------------------------------------------------

_OPERATORS = set("().+*")


def _tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in _OPERATORS:
            tokens.append(c)
            i += 1
        else:
            j = i
            while j < len(text) and text[j] not in _OPERATORS:
                j += 1
            atom = text[i:j].strip()
            # "INC: Lock" carries its direction through the next token
            if atom and atom.endswith(("INC", "OUT")) and j < len(text) and text[j] == ":":
                k = j + 1
                while k < len(text) and text[k] not in _OPERATORS:
                    k += 1
                atom = atom + ":" + text[j + 1:k].strip()
                j = k
            if atom:
                tokens.append(atom)
            i = j
    return tokens


class _Parser:
    def __init__(self, tokens: list[str], source: str):
        self.tokens = tokens
        self.pos = 0
        self.source = source

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"unexpected end of regex {self.source!r}")
        self.pos += 1
        return tok

    def parse(self) -> RegularExpr:
        expr = self.alternative()
        if self.peek() is not None:
            raise ParseError(f"trailing input {self.peek()!r} in regex {self.source!r}")
        return expr

    def alternative(self) -> RegularExpr:
        parts = [self.concatenation()]
        while self.peek() == "+":
            self.take()
            parts.append(self.concatenation())
        return parts[0] if len(parts) == 1 else Alt(tuple(parts))

    def concatenation(self) -> RegularExpr:
        parts = [self.starred()]
        while self.peek() == ".":
            self.take()
            parts.append(self.starred())
        return parts[0] if len(parts) == 1 else Concat(tuple(parts))

    def starred(self) -> RegularExpr:
        expr = self.primary()
        while self.peek() == "*":
            self.take()
            expr = Star(expr)
        return expr

    def primary(self) -> RegularExpr:
        tok = self.take()
        if tok == "(":
            if self.peek() == ")":
                self.take()
                expr: RegularExpr = Epsilon()
            else:
                expr = self.alternative()
                if self.peek() != ")":
                    raise ParseError(f"missing ')' in regex {self.source!r}")
                self.take()
            return expr
        if tok in _OPERATORS:
            raise ParseError(f"unexpected {tok!r} in regex {self.source!r}")
        return Atom(parse_label(tok))


def parse_regex(text: str) -> RegularExpr:
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError(f"empty regex {text!r}")
    return _Parser(tokens, text).parse()


# -- conversion to automata -------------------------------------------------

def regex_to_automaton(r: RegularExpr) -> BehavioralTypeAutomaton:
    """Build an automaton whose trace language is the prefix closure of the
    regex language; its alphabet is exactly the set of atoms."""
    nfa = _ThompsonBuilder()
    start, final = nfa.build(r)
    subsets = _determinize_nfa(nfa, start)
    live = _coaccessible(subsets, nfa, final)

    names = {s: f"q{i}" for i, s in enumerate(sorted(live, key=sorted))}
    edges = frozenset((names[src], label, names[dst])
                      for (src, label, dst) in subsets.edges
                      if src in live and dst in live)
    atoms = r.atoms()
    reached = frozenset(label for _, label, _ in edges)
    if reached != atoms:  # every atom is realizable since no construct is empty
        raise ContractError("internal: regex atoms lost during construction")
    result = BehavioralTypeAutomaton(
        alphabet=atoms,
        locations=frozenset(names.values()),
        initial=names[subsets.start],
        edges=edges,
    )
    return normalize(result)


class _ThompsonBuilder:
    def __init__(self) -> None:
        self.count = 0
        self.eps: dict[int, set[int]] = {}
        self.moves: dict[int, list[tuple[Label, int]]] = {}

    def fresh(self) -> int:
        self.count += 1
        self.eps.setdefault(self.count, set())
        self.moves.setdefault(self.count, [])
        return self.count

    def build(self, r: RegularExpr) -> tuple[int, int]:
        if isinstance(r, Epsilon):
            s = self.fresh()
            return s, s
        if isinstance(r, Atom):
            s, t = self.fresh(), self.fresh()
            self.moves[s].append((r.label, t))
            return s, t
        if isinstance(r, Concat):
            first = self.build(r.children[0])
            start, end = first
            for child in r.children[1:]:
                s, t = self.build(child)
                self.eps[end].add(s)
                end = t
            return start, end
        if isinstance(r, Alt):
            s, t = self.fresh(), self.fresh()
            for child in r.children:
                cs, ct = self.build(child)
                self.eps[s].add(cs)
                self.eps[ct].add(t)
            return s, t
        if isinstance(r, Star):
            s = self.fresh()
            cs, ct = self.build(r.child)
            self.eps[s].add(cs)
            self.eps[ct].add(s)
            return s, s
        raise ContractError(f"malformed regex node {r!r}")

    def closure(self, states: set[int]) -> frozenset[int]:
        seen = set(states)
        stack = list(states)
        while stack:
            cur = stack.pop()
            for nxt in self.eps[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return frozenset(seen)


class _SubsetGraph:
    def __init__(self, start: frozenset[int]):
        self.start = start
        self.edges: set[tuple[frozenset[int], Label, frozenset[int]]] = set()
        self.states: set[frozenset[int]] = {start}


def _determinize_nfa(nfa: _ThompsonBuilder, start: int) -> _SubsetGraph:
    start_set = nfa.closure({start})
    graph = _SubsetGraph(start_set)
    queue = deque([start_set])
    while queue:
        current = queue.popleft()
        by_label: dict[Label, set[int]] = {}
        for state in current:
            for label, target in nfa.moves[state]:
                by_label.setdefault(label, set()).add(target)
        for label, targets in by_label.items():
            closed = nfa.closure(targets)
            if closed not in graph.states:
                graph.states.add(closed)
                queue.append(closed)
            graph.edges.add((current, label, closed))
    return graph


def _coaccessible(graph: _SubsetGraph, nfa: _ThompsonBuilder,
                  final: int) -> set[frozenset[int]]:
    accepting = {s for s in graph.states if final in s}
    reverse: dict[frozenset[int], set[frozenset[int]]] = {}
    for src, _, dst in graph.edges:
        reverse.setdefault(dst, set()).add(src)
    live = set(accepting)
    queue = deque(accepting)
    while queue:
        cur = queue.popleft()
        for prev in reverse.get(cur, ()):
            if prev not in live:
                live.add(prev)
                queue.append(prev)
    return live
