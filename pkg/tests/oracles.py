"""Independent oracles used by the test suite.

Everything here deliberately avoids the library's pipeline code paths:
languages are enumerated word by word, acceptance is a naive path search, and
regex languages are built by recursive set combination.
"""

from __future__ import annotations

import re

from protomata.automata import BehavioralTypeAutomaton
from protomata.labels import Label
from protomata.regex import Alt, Atom, Concat, Epsilon, RegularExpr, Star

Word = tuple[Label, ...]


def naive_accepts(a: BehavioralTypeAutomaton, word) -> bool:
    """Plain depth-first path search avoiding the error location."""
    word = tuple(word)

    def walk(loc: str, i: int) -> bool:
        if loc == a.error_location:
            return False
        if i == len(word):
            return True
        return any(walk(dst, i + 1)
                   for src, lbl, dst in a.edges
                   if src == loc and lbl == word[i])

    return walk(a.initial, 0)


def automaton_language(a: BehavioralTypeAutomaton, max_len: int) -> set[Word]:
    """All accepted words up to max_len, enumerated over live state sets."""
    labels = sorted(a.alphabet, key=Label.sort_key)
    step: dict[tuple[frozenset, Label], frozenset] = {}

    def successors(live: frozenset, label: Label) -> frozenset:
        key = (live, label)
        if key not in step:
            step[key] = frozenset(
                dst for src, lbl, dst in a.edges
                if src in live and lbl == label and dst != a.error_location)
        return step[key]

    memo: dict[tuple[frozenset, int], set[Word]] = {}

    def lang(live: frozenset, budget: int) -> set[Word]:
        key = (live, budget)
        if key in memo:
            return memo[key]
        words: set[Word] = {()}
        if budget > 0:
            for label in labels:
                nxt = successors(live, label)
                if nxt:
                    words |= {(label,) + w for w in lang(nxt, budget - 1)}
        memo[key] = words
        return words

    return lang(frozenset({a.initial}), max_len)


def regex_language(r: RegularExpr, max_len: int) -> set[Word]:
    """The regex language cut off at max_len, by recursive set combination."""
    if isinstance(r, Epsilon):
        return {()}
    if isinstance(r, Atom):
        return {(r.label,)} if max_len >= 1 else set()
    if isinstance(r, Alt):
        out: set[Word] = set()
        for child in r.children:
            out |= regex_language(child, max_len)
        return out
    if isinstance(r, Concat):
        words: set[Word] = {()}
        for child in r.children:
            child_words = regex_language(child, max_len)
            words = {w + v for w in words for v in child_words
                     if len(w) + len(v) <= max_len}
            if not words:
                return set()
        return words
    if isinstance(r, Star):
        base = regex_language(r.child, max_len)
        words: set[Word] = {()}
        frontier: set[Word] = {()}
        while frontier:
            grown = {w + v for w in frontier for v in base
                     if len(w) + len(v) <= max_len} - words
            words |= grown
            frontier = grown
        return words
    raise AssertionError(f"unknown node {r!r}")


def prefix_close(words: set[Word]) -> set[Word]:
    closed: set[Word] = set()
    for word in words:
        for i in range(len(word) + 1):
            closed.add(word[:i])
    return closed


def residual_class_count(a: BehavioralTypeAutomaton, max_len: int) -> int:
    """Number of distinct future languages among reachable locations of a
    deterministic automaton; lower bound on any equivalent automaton's size."""
    futures = {}
    for loc in sorted(a.reachable_locations()):
        probe = BehavioralTypeAutomaton(
            alphabet=a.alphabet, locations=a.locations, initial=loc,
            edges=a.edges, error_location=a.error_location
        ) if loc != a.error_location else None
        if probe is None:
            futures[loc] = frozenset({"<error>"})
        else:
            futures[loc] = frozenset(automaton_language(probe, max_len))
    return len(set(futures.values()))


_CASE = re.compile(r"case (\w+):")
_EVENT = re.compile(r'if \(event\.equals\("([^"]+)"\)\) \{\s*'
                    r'state = LOCATION\.(\w+);', re.MULTILINE)


def extract_transitions(source: str) -> dict[tuple[str, str], str]:
    """Re-extract (state, event) -> state triples from emitted monitor code."""
    table: dict[tuple[str, str], str] = {}
    blocks = _CASE.split(source)
    for i in range(1, len(blocks), 2):
        state, body = blocks[i], blocks[i + 1]
        for event, target in _EVENT.findall(body):
            table[(state, event)] = target
    return table


def labeled_graphs_isomorphic(init1: str, edges1: set, init2: str,
                              edges2: set) -> bool:
    """Isomorphism of rooted, edge-labeled directed graphs (exact search with
    color-refinement pruning).  Labels are compared as strings."""
    def nodes_of(init, edges):
        nodes = {init}
        for s, _, t in edges:
            nodes.add(s)
            nodes.add(t)
        return sorted(nodes)

    n1, n2 = nodes_of(init1, edges1), nodes_of(init2, edges2)
    if len(n1) != len(n2) or len(edges1) != len(edges2):
        return False

    def refine(nodes, edges, init):
        colors = {v: (v == init,) for v in nodes}
        for _ in range(len(nodes)):
            fresh = {}
            for v in nodes:
                outs = sorted((str(l), colors[t]) for s, l, t in edges if s == v)
                ins = sorted((str(l), colors[s]) for s, l, t in edges if t == v)
                fresh[v] = (colors[v], tuple(outs), tuple(ins))
            canon = {sig: i for i, sig in enumerate(sorted(set(fresh.values())))}
            colors = {v: (canon[fresh[v]],) for v in nodes}
        return {v: colors[v][0] for v in nodes}

    c1, c2 = refine(n1, edges1, init1), refine(n2, edges2, init2)
    if sorted(c1.values()) != sorted(c2.values()):
        return False

    out1: dict[str, set] = {v: set() for v in n1}
    for s, l, t in edges1:
        out1[s].add((str(l), t))
    out2: dict[str, set] = {v: set() for v in n2}
    for s, l, t in edges2:
        out2[s].add((str(l), t))

    order = sorted(n1, key=lambda v: (c1[v], v))
    mapping: dict[str, str] = {}
    used: set[str] = set()

    def consistent(u: str, v: str) -> bool:
        for label, t in out1[u]:
            if t in mapping and (label, mapping[t]) not in out2[v]:
                return False
        for w in mapping:
            for label, t in out1[w]:
                if t == u and (label, v) not in out2[mapping[w]]:
                    return False
        return True

    def assign(i: int) -> bool:
        if i == len(order):
            mapped = {(mapping[s], str(l), mapping[t]) for s, l, t in edges1}
            actual = {(s, str(l), t) for s, l, t in edges2}
            return mapped == actual and mapping[init1] == init2
        u = order[i]
        for v in sorted(n2):
            if v in used or c1[u] != c2[v]:
                continue
            if u == init1 and v != init2:
                continue
            if not consistent(u, v):
                continue
            mapping[u] = v
            used.add(v)
            if assign(i + 1):
                return True
            del mapping[u]
            used.discard(v)
        return False

    return assign(0)


# -- derivative-based regex prefix oracle --------------------------------------

class _EmptySet:
    """Marker for the empty language inside derivative computation."""

    def __repr__(self):
        return "EMPTY"


EMPTY = _EmptySet()


def _alt(children):
    flat = []
    for c in children:
        if isinstance(c, _EmptySet):
            continue
        if isinstance(c, Alt):
            flat.extend(c.children)
        elif c not in flat:
            flat.append(c)
    if not flat:
        return EMPTY
    if len(flat) == 1:
        return flat[0]
    return Alt(tuple(flat))


def _concat(children):
    flat = []
    for c in children:
        if isinstance(c, _EmptySet):
            return EMPTY
        if isinstance(c, Epsilon):
            continue
        if isinstance(c, Concat):
            flat.extend(c.children)
        else:
            flat.append(c)
    if not flat:
        return Epsilon()
    if len(flat) == 1:
        return flat[0]
    return Concat(tuple(flat))


def _nullable(r) -> bool:
    if isinstance(r, (_EmptySet, Atom)):
        return False
    if isinstance(r, (Epsilon, Star)):
        return True
    if isinstance(r, Alt):
        return any(_nullable(c) for c in r.children)
    return all(_nullable(c) for c in r.children)


def _derivative(r, label):
    if isinstance(r, (_EmptySet, Epsilon)):
        return EMPTY
    if isinstance(r, Atom):
        return Epsilon() if r.label == label else EMPTY
    if isinstance(r, Alt):
        return _alt([_derivative(c, label) for c in r.children])
    if isinstance(r, Star):
        return _concat([_derivative(r.child, label), r])
    head, tail = r.children[0], r.children[1:]
    rest = _concat(list(tail))
    parts = [_concat([_derivative(head, label), rest])]
    if _nullable(head):
        parts.append(_derivative(rest, label))
    return _alt(parts)


def _language_nonempty(r) -> bool:
    if isinstance(r, _EmptySet):
        return False
    if isinstance(r, (Epsilon, Atom, Star)):
        return True
    if isinstance(r, Alt):
        return any(_language_nonempty(c) for c in r.children)
    return all(_language_nonempty(c) for c in r.children)


def regex_prefixes(r: RegularExpr, max_len: int) -> set[Word]:
    """Exact prefixes of L(r) up to max_len via Brzozowski derivatives."""
    labels = sorted(r.atoms(), key=Label.sort_key)
    prefixes: set[Word] = set()
    frontier: list[tuple[Word, object]] = []
    if _language_nonempty(r):
        prefixes.add(())
        frontier.append(((), r))
    for _ in range(max_len):
        grown: list[tuple[Word, object]] = []
        for word, expr in frontier:
            for label in labels:
                nxt = _derivative(expr, label)
                if _language_nonempty(nxt):
                    extended = word + (label,)
                    prefixes.add(extended)
                    grown.append((extended, nxt))
        frontier = grown
    return prefixes
