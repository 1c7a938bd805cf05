"""Behavioral type automata and the comparison-pipeline stages.

An automaton is the tuple (alphabet, locations, initial, edges) plus an
optional absorbing error location added by completion.  Every non-error
location is accepting, so the trace language is prefix-closed: a word is
accepted iff some path from the initial location reads it without entering
the error location.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .errors import ContractError
from .labels import Label

Edge = tuple[str, Label, str]


def edge_sort_key(edge: Edge) -> tuple[str, str, str]:
    src, label, dst = edge
    return (src, label.sort_key(), dst)


@dataclass(frozen=True)
class BehavioralTypeAutomaton:
    alphabet: frozenset[Label]
    locations: frozenset[str]
    initial: str
    edges: frozenset[Edge]
    error_location: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))
        object.__setattr__(self, "locations", frozenset(self.locations))
        object.__setattr__(self, "edges", frozenset(self.edges))
        self._validate()

    def _validate(self) -> None:
        if self.initial not in self.locations:
            raise ContractError(f"initial location {self.initial!r} not declared")
        if self.error_location is not None:
            if self.error_location not in self.locations:
                raise ContractError(f"error location {self.error_location!r} not declared")
            if self.initial == self.error_location:
                raise ContractError("initial location may not be the error location")
        used: set[Label] = set()
        for src, label, dst in self.edges:
            if src not in self.locations or dst not in self.locations:
                raise ContractError(f"edge ({src},{label},{dst}) leaves declared locations")
            if label not in self.alphabet:
                raise ContractError(f"edge label {label} not in alphabet")
            used.add(label)
        missing = self.alphabet - used
        if missing:
            names = ", ".join(sorted(str(l) for l in missing))
            raise ContractError(f"consistency violated: alphabet labels on no edge: {names}")
        if self.error_location is not None:
            err = self.error_location
            loops = {label for src, label, dst in self.edges if src == err and dst == err}
            if any(src == err and dst != err for src, _, dst in self.edges):
                raise ContractError("error location has an edge to a non-error location")
            if loops != set(self.alphabet):
                raise ContractError("error location must self-loop on every alphabet label")

    # -- queries -----------------------------------------------------------

    def edges_from(self, location: str) -> list[Edge]:
        return sorted((e for e in self.edges if e[0] == location), key=edge_sort_key)

    def successors(self, location: str, label: Label) -> set[str]:
        return {dst for src, lbl, dst in self.edges if src == location and lbl == label}

    def is_deterministic(self) -> bool:
        return self.nondeterminism_witness() is None

    def nondeterminism_witness(self) -> tuple[str, Label] | None:
        seen: set[tuple[str, Label]] = set()
        for src, label, _ in sorted(self.edges, key=edge_sort_key):
            if (src, label) in seen:
                return (src, label)
            seen.add((src, label))
        return None

    def totality_witness(self) -> tuple[str, Label] | None:
        """First (location, label) pair with no outgoing edge, if any."""
        out = {(src, label) for src, label, _ in self.edges}
        for loc in sorted(self.locations):
            for label in sorted(self.alphabet, key=Label.sort_key):
                if (loc, label) not in out:
                    return (loc, label)
        return None

    def is_total(self) -> bool:
        return self.totality_witness() is None

    def reachable_locations(self) -> set[str]:
        seen = {self.initial}
        queue = deque([self.initial])
        index: dict[str, list[Edge]] = {}
        for e in self.edges:
            index.setdefault(e[0], []).append(e)
        while queue:
            loc = queue.popleft()
            for _, _, dst in index.get(loc, ()):
                if dst not in seen:
                    seen.add(dst)
                    queue.append(dst)
        return seen

    def live_successors(self, live: Iterable[str], label: Label) -> frozenset[str]:
        """Step a set of non-error locations, dropping runs that die or err."""
        err = self.error_location
        nxt = {dst for src, lbl, dst in self.edges
               if src in set(live) and lbl == label and dst != err}
        return frozenset(nxt)


def accepts(a: BehavioralTypeAutomaton, word: Sequence[Label]) -> bool:
    """True iff the word labels some path from the initial location that never
    enters the error location."""
    live: frozenset[str] = frozenset({a.initial})
    for label in word:
        live = a.live_successors(live, label)
        if not live:
            return False
    return True


def _fresh_error_name(locations: frozenset[str]) -> str:
    name = "error"
    while name in locations:
        name += "_"
    return name


def complete(a: BehavioralTypeAutomaton, over: Iterable[Label]) -> BehavioralTypeAutomaton:
    """Make the automaton total over ``over`` by routing every missing
    (location, label) pair to an absorbing error location.

    A total input comes back unchanged; ``over`` must cover the alphabet.
    """
    universe = frozenset(over)
    uncovered = a.alphabet - universe
    if uncovered:
        names = ", ".join(sorted(str(l) for l in uncovered))
        raise ContractError(f"completion universe misses alphabet labels: {names}")
    out = {(src, label) for src, label, _ in a.edges}
    missing = [(loc, label)
               for loc in a.locations
               for label in universe
               if (loc, label) not in out]
    if not missing:
        return a
    err = a.error_location or _fresh_error_name(a.locations)
    edges = set(a.edges)
    edges.update((loc, label, err) for loc, label in missing if loc != err)
    edges.update((err, label, err) for label in universe)
    return BehavioralTypeAutomaton(
        alphabet=universe,
        locations=a.locations | {err},
        initial=a.initial,
        edges=frozenset(edges),
        error_location=err,
    )


def _subset_name(subset: frozenset[str]) -> str:
    return "{" + ",".join(sorted(subset)) + "}"


def determinize(a: BehavioralTypeAutomaton) -> BehavioralTypeAutomaton:
    """Subset construction.  Locations of the result are canonical names of
    the reachable subsets; the trace language is unchanged."""
    start = frozenset({a.initial})
    index: dict[tuple[str, Label], set[str]] = {}
    for src, label, dst in a.edges:
        index.setdefault((src, label), set()).add(dst)
    subsets: dict[frozenset[str], str] = {start: _subset_name(start)}
    queue = deque([start])
    edges: set[Edge] = set()
    while queue:
        current = queue.popleft()
        for label in sorted(a.alphabet, key=Label.sort_key):
            target = set()
            for loc in current:
                target |= index.get((loc, label), set())
            if not target:
                continue
            tgt = frozenset(target)
            if tgt not in subsets:
                subsets[tgt] = _subset_name(tgt)
                queue.append(tgt)
            edges.add((subsets[current], label, subsets[tgt]))
    error = None
    if a.error_location is not None:
        pure = frozenset({a.error_location})
        if pure in subsets:
            error = subsets[pure]
    alphabet = frozenset(label for _, label, _ in edges)
    return BehavioralTypeAutomaton(
        alphabet=alphabet,
        locations=frozenset(subsets.values()),
        initial=subsets[start],
        edges=frozenset(edges),
        error_location=error,
    )


def minimize(a: BehavioralTypeAutomaton) -> BehavioralTypeAutomaton:
    """Merge language-equivalent locations of a deterministic, total automaton
    (partition refinement seeded by the error/non-error split)."""
    witness = a.nondeterminism_witness()
    if witness is not None:
        raise ContractError(
            f"minimize requires a deterministic automaton: location {witness[0]!r} "
            f"has several edges labeled {witness[1]}")
    gap = a.totality_witness()
    if gap is not None:
        raise ContractError(
            f"minimize requires a completed automaton: location {gap[0]!r} "
            f"has no edge for {gap[1]}")
    reachable = sorted(a.reachable_locations())
    delta = {(src, label): dst for src, label, dst in a.edges}
    labels = sorted(a.alphabet, key=Label.sort_key)

    err = a.error_location if a.error_location in reachable else None
    partition: list[set[str]] = []
    rest = {loc for loc in reachable if loc != err}
    if err is not None:
        partition.append({err})
    if rest:
        partition.append(rest)

    def block_of(assign: dict[str, int], loc: str) -> int:
        return assign[loc]

    changed = True
    while changed:
        assign = {loc: i for i, block in enumerate(partition) for loc in block}
        new_partition: list[set[str]] = []
        for block in partition:
            groups: dict[tuple[int, ...], set[str]] = {}
            for loc in sorted(block):
                sig = tuple(block_of(assign, delta[(loc, label)]) for label in labels)
                groups.setdefault(sig, set()).add(loc)
            new_partition.extend(groups[k] for k in sorted(groups))
        changed = len(new_partition) != len(partition)
        partition = new_partition

    rep = {}
    for block in partition:
        name = min(block)
        for loc in block:
            rep[loc] = name
    edges = frozenset((rep[src], label, rep[dst])
                      for src, label, dst in a.edges if src in rep and dst in rep)
    return BehavioralTypeAutomaton(
        alphabet=a.alphabet,
        locations=frozenset(rep.values()),
        initial=rep[a.initial],
        edges=edges,
        error_location=rep[err] if err is not None else None,
    )


def canonical_renaming(a: BehavioralTypeAutomaton) -> dict[str, str]:
    """Breadth-first renaming to s0, s1, ... exploring edges in lexicographic
    label order; unreachable locations follow in name order."""
    order: list[str] = []
    seen = {a.initial}
    queue = deque([a.initial])
    index: dict[str, list[Edge]] = {}
    for e in a.edges:
        index.setdefault(e[0], []).append(e)
    while queue:
        loc = queue.popleft()
        order.append(loc)
        for _, label, dst in sorted(index.get(loc, ()), key=edge_sort_key):
            if dst not in seen:
                seen.add(dst)
                queue.append(dst)
    order.extend(sorted(a.locations - seen))
    return {loc: f"s{i}" for i, loc in enumerate(order)}


def normalize(a: BehavioralTypeAutomaton) -> BehavioralTypeAutomaton:
    """Rename locations canonically (serialization then orders edges
    lexicographically); idempotent and language-preserving."""
    renaming = canonical_renaming(a)
    return rename_locations(a, renaming)


def rename_locations(a: BehavioralTypeAutomaton,
                     renaming: dict[str, str]) -> BehavioralTypeAutomaton:
    return BehavioralTypeAutomaton(
        alphabet=a.alphabet,
        locations=frozenset(renaming[l] for l in a.locations),
        initial=renaming[a.initial],
        edges=frozenset((renaming[s], lbl, renaming[d]) for s, lbl, d in a.edges),
        error_location=None if a.error_location is None else renaming[a.error_location],
    )


class HideMode(Enum):
    DELETE = "delete"
    TAU = "tau"


def hide(a: BehavioralTypeAutomaton, drop: Iterable[Label],
         mode: HideMode = HideMode.TAU) -> BehavioralTypeAutomaton:
    """Remove the dropped labels from the automaton.

    DELETE removes their edges outright; TAU treats them as internal steps and
    eliminates them by closure, so a hidden step no longer consumes an event.
    Labels left with no edge are pruned from the alphabet.
    """
    dropped = frozenset(drop)
    extra = dropped - a.alphabet
    if extra:
        names = ", ".join(sorted(str(l) for l in extra))
        raise ContractError(f"cannot hide labels outside the alphabet: {names}")
    if not dropped:
        return a

    if mode is HideMode.DELETE:
        edges = frozenset(e for e in a.edges if e[1] not in dropped)
    else:
        silent: dict[str, set[str]] = {loc: {loc} for loc in a.locations}
        step: dict[str, set[str]] = {loc: set() for loc in a.locations}
        for src, label, dst in a.edges:
            if label in dropped:
                step[src].add(dst)
        for loc in a.locations:  # closure over hidden steps, cycles included
            frontier = list(silent[loc])
            while frontier:
                cur = frontier.pop()
                for nxt in step[cur]:
                    if nxt not in silent[loc]:
                        silent[loc].add(nxt)
                        frontier.append(nxt)
        edges = frozenset((loc, label, dst)
                          for loc in a.locations
                          for mid in silent[loc]
                          for src, label, dst in a.edges
                          if src == mid and label not in dropped)

    alphabet = frozenset(label for _, label, _ in edges)
    error = a.error_location
    if error is not None:
        # the error sink keeps its self-loops only for surviving labels
        has_loop = all((error, label, error) in edges for label in alphabet)
        if not has_loop:
            error = None
    return BehavioralTypeAutomaton(
        alphabet=alphabet,
        locations=a.locations,
        initial=a.initial,
        edges=edges,
        error_location=error,
    )
