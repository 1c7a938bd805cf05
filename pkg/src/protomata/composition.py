"""Parallel composition of component automata with name-based rendezvous,
deadlock detection, compatibility checking, and priority synthesis.

Synchronization discipline: a joint transition on a method name is initiated
by one component firing an OUT edge; every component whose alphabet expects
the name (an INC label) must take a matching INC edge at the same time.
Other potential callers stay put.  OUT and NEUTRAL labels unshared with any
expecting peer interleave freely; an INC edge never fires without a caller.
NEUTRAL labels synchronize among all components sharing them.

The exported product also carries pure-receive transitions (all expecting
components stepping together, labeled INC) so that composing a composed
automaton with further components behaves like composing everything at once.
Closed-system analyses only fire initiated transitions.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .automata import BehavioralTypeAutomaton, Edge, edge_sort_key
from .btypes import BehavioralType
from .errors import (ContractError, IncompatibleProtocolError, StateLimitError,
                     SynthesisUnsat)
from .labels import Direction, Label

ProductState = tuple[str, ...]
DEFAULT_BOUND = 10 ** 6
_SEARCH_DEPTH_CAP = 4


@dataclass(frozen=True)
class Network:
    components: tuple[tuple[str, BehavioralTypeAutomaton], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise ContractError("a network needs at least one component")
        ids = [cid for cid, _ in self.components]
        if len(set(ids)) != len(ids):
            raise ContractError(f"duplicate component ids: {ids}")

    def ids(self) -> list[str]:
        return [cid for cid, _ in self.components]

    def automaton(self, component_id: str) -> BehavioralTypeAutomaton:
        for cid, auto in self.components:
            if cid == component_id:
                return auto
        raise ContractError(f"no component {component_id!r} in network")


@dataclass(frozen=True)
class ProductMove:
    label: Label
    movers: tuple[tuple[str, Edge], ...]
    target: ProductState

    def mover_ids(self) -> tuple[str, ...]:
        return tuple(cid for cid, _ in self.movers)

    def sort_key(self):
        return (self.label.sort_key(), self.mover_ids(),
                tuple(edge_sort_key(e) for _, e in self.movers), self.target)


class Product:
    """On-the-fly product of a network; states are location vectors."""

    def __init__(self, network: Network):
        self.network = network
        self._ids = network.ids()
        self._autos = [auto for _, auto in network.components]
        self.initial: ProductState = tuple(a.initial for a in self._autos)
        self._edges_at: list[dict[str, list[Edge]]] = []
        for auto in self._autos:
            index: dict[str, list[Edge]] = {}
            for edge in sorted(auto.edges, key=edge_sort_key):
                index.setdefault(edge[0], []).append(edge)
            self._edges_at.append(index)
        self._expects: dict[str, list[int]] = {}
        self._neutrals: dict[str, list[int]] = {}
        for i, auto in enumerate(self._autos):
            for label in auto.alphabet:
                if label.direction is Direction.INC:
                    bucket = self._expects.setdefault(label.name, [])
                elif label.direction is Direction.NEUTRAL:
                    bucket = self._neutrals.setdefault(label.name, [])
                else:
                    continue
                if i not in bucket:
                    bucket.append(i)

    def _enabled(self, index: int, state: ProductState,
                 direction: Direction, name: str) -> list[Edge]:
        return [e for e in self._edges_at[index].get(state[index], ())
                if e[1].direction is direction and e[1].name == name]

    def _advance(self, state: ProductState,
                 steps: Sequence[tuple[int, Edge]]) -> ProductState:
        out = list(state)
        for index, edge in steps:
            out[index] = edge[2]
        return tuple(out)

    def moves(self, state: ProductState, include_receives: bool = False
              ) -> list[ProductMove]:
        found: list[ProductMove] = []
        for i, auto in enumerate(self._autos):
            for edge in self._edges_at[i].get(state[i], ()):
                label = edge[1]
                if label.direction is not Direction.OUT:
                    continue
                receivers = [j for j in self._expects.get(label.name, ()) if j != i]
                choice_sets = [self._enabled(j, state, Direction.INC, label.name)
                               for j in receivers]
                if any(not choices for choices in choice_sets):
                    continue
                for picks in itertools.product(*choice_sets):
                    steps = [(i, edge)] + list(zip(receivers, picks))
                    found.append(ProductMove(
                        label=Label(Direction.OUT, label.name, label.parameter),
                        movers=tuple(sorted(((self._ids[k], e) for k, e in steps),
                                            key=lambda m: self._ids.index(m[0]))),
                        target=self._advance(state, steps)))
        for name, holders in self._neutrals.items():
            choice_sets = [self._enabled(j, state, Direction.NEUTRAL, name)
                           for j in holders]
            if any(not choices for choices in choice_sets):
                continue
            for picks in itertools.product(*choice_sets):
                steps = list(zip(holders, picks))
                found.append(ProductMove(
                    label=Label(Direction.NEUTRAL, name),
                    movers=tuple((self._ids[k], e) for k, e in steps),
                    target=self._advance(state, steps)))
        if include_receives:
            for name, holders in self._expects.items():
                choice_sets = [self._enabled(j, state, Direction.INC, name)
                               for j in holders]
                if any(not choices for choices in choice_sets):
                    continue
                for picks in itertools.product(*choice_sets):
                    steps = list(zip(holders, picks))
                    found.append(ProductMove(
                        label=Label(Direction.INC, name),
                        movers=tuple((self._ids[k], e) for k, e in steps),
                        target=self._advance(state, steps)))
        return sorted(found, key=ProductMove.sort_key)

    def local_edges(self, state: ProductState) -> dict[str, list[Edge]]:
        """Outgoing edges each component has at its current location."""
        return {self._ids[i]: list(self._edges_at[i].get(state[i], ()))
                for i in range(len(self._ids))}

    def explore(self, bound: int = DEFAULT_BOUND, include_receives: bool = False
                ) -> "Exploration":
        parents: dict[ProductState, tuple[ProductState, ProductMove] | None] = {
            self.initial: None}
        moves_of: dict[ProductState, list[ProductMove]] = {}
        order: list[ProductState] = []
        queue = deque([self.initial])
        while queue:
            state = queue.popleft()
            order.append(state)
            moves = self.moves(state, include_receives=include_receives)
            moves_of[state] = moves
            for move in moves:
                if move.target not in parents:
                    if len(parents) >= bound:
                        raise StateLimitError(bound, len(parents))
                    parents[move.target] = (state, move)
                    queue.append(move.target)
        return Exploration(self, order, moves_of, parents)


@dataclass
class Exploration:
    product: Product
    order: list[ProductState]
    moves_of: dict[ProductState, list[ProductMove]]
    parents: dict[ProductState, tuple[ProductState, ProductMove] | None]

    def witness(self, state: ProductState) -> list[ProductMove]:
        trail: list[ProductMove] = []
        cursor = state
        while True:
            parent = self.parents[cursor]
            if parent is None:
                break
            cursor, move = parent
            trail.append(move)
        trail.reverse()
        return trail


def compose(network: Network) -> Product:
    return Product(network)


def product_automaton(network: Network, include_receives: bool = True,
                      bound: int = DEFAULT_BOUND) -> BehavioralTypeAutomaton:
    """The reachable product as a plain automaton; state names join component
    locations with '|'.

    With receive transitions the composed automaton stays usable as a
    component of a larger network: composing it further behaves like composing
    all the parts at once.  Expected-call labels that can never jointly fire
    are kept latent on unreachable stub locations, so they still block outer
    callers exactly as the separate components would.
    """
    product = Product(network)
    exploration = product.explore(bound, include_receives=include_receives)

    def name(state: ProductState) -> str:
        return "|".join(state)

    edges = set((name(s), m.label, name(m.target))
                for s, moves in exploration.moves_of.items()
                for m in moves)
    locations = {name(s) for s in exploration.order}
    if include_receives:
        on_edges = {label for _, label, _ in edges}
        latent = {label
                  for _, auto in network.components
                  for label in auto.alphabet
                  if label.direction in (Direction.INC, Direction.NEUTRAL)
                  and Label(label.direction, label.name) not in on_edges}
        for label in sorted(latent, key=Label.sort_key):
            stub = f"latent|{label}"
            locations.add(stub)
            edges.add((stub, Label(label.direction, label.name), stub))
    return BehavioralTypeAutomaton(
        alphabet=frozenset(label for _, label, _ in edges),
        locations=frozenset(locations),
        initial=name(product.initial),
        edges=frozenset(edges),
    )


# -- deadlock detection ------------------------------------------------------

@dataclass(frozen=True)
class DeadlockReport:
    deadlocks: tuple[tuple[ProductState, tuple[ProductMove, ...]], ...]
    total_reachable: int

    def __bool__(self) -> bool:
        return bool(self.deadlocks)


def _is_deadlock(product: Product, state: ProductState,
                 moves: list[ProductMove]) -> bool:
    if moves:
        return False
    return any(edges for edges in product.local_edges(state).values())


def find_deadlocks(network: Network, bound: int = DEFAULT_BOUND) -> DeadlockReport:
    """Exhaustive search for reachable states where no joint transition is
    enabled while some component still has a local edge to offer."""
    product = Product(network)
    exploration = product.explore(bound)
    deadlocks = []
    for state in exploration.order:
        if _is_deadlock(product, state, exploration.moves_of[state]):
            deadlocks.append((state, tuple(exploration.witness(state))))
    return DeadlockReport(tuple(deadlocks), total_reachable=len(exploration.order))


# -- compatibility -----------------------------------------------------------

@dataclass(frozen=True)
class CompatibilityVerdict:
    compatible: bool
    counterexample: tuple[tuple[ProductMove, ...], str] | None = None
    states_explored: int = 0


def check_compatibility(caller: BehavioralTypeAutomaton,
                        callee: BehavioralTypeAutomaton,
                        bound: int = DEFAULT_BOUND) -> CompatibilityVerdict:
    """Every outgoing call the caller can make must be expected by the callee
    at that point of the joint execution.

    The counterexample is the shortest trace to the first state where an
    enabled OUT edge meets no enabled INC edge of the same name.
    """
    network = Network((("caller", caller), ("callee", callee)))
    product = Product(network)
    exploration = product.explore(bound)
    for state in exploration.order:
        caller_loc, callee_loc = state
        for edge in caller.edges_from(caller_loc):
            label = edge[1]
            if label.direction is not Direction.OUT:
                continue
            ready = [e for e in callee.edges_from(callee_loc)
                     if e[1].direction is Direction.INC and e[1].name == label.name]
            if not ready:
                return CompatibilityVerdict(
                    compatible=False,
                    counterexample=(tuple(exploration.witness(state)), label.name),
                    states_explored=len(exploration.order))
    return CompatibilityVerdict(compatible=True,
                                states_explored=len(exploration.order))


# -- priority synthesis ------------------------------------------------------

@dataclass(frozen=True)
class Priority:
    """Lower edge is never taken while its higher sibling is available; both
    edges share a source location within the named component."""

    component_id: str
    lower: Edge
    higher: Edge

    def __post_init__(self) -> None:
        if self.lower == self.higher:
            raise ContractError("a priority needs two distinct edges")
        if self.lower[0] != self.higher[0]:
            raise ContractError("priority edges must share their source location")


def _attractor(exploration: Exploration, bad: set[ProductState]) -> set[ProductState]:
    """States from which every enabled transition leads back into the set;
    quiescent states (nothing to do at all) stay out."""
    attractor = set(bad)
    changed = True
    while changed:
        changed = False
        for state in exploration.order:
            if state in attractor:
                continue
            moves = exploration.moves_of[state]
            if moves and all(m.target in attractor for m in moves):
                attractor.add(state)
                changed = True
    return attractor


def _without_edges(auto: BehavioralTypeAutomaton,
                   removed: set[Edge]) -> BehavioralTypeAutomaton:
    edges = frozenset(e for e in auto.edges if e not in removed)
    return BehavioralTypeAutomaton(
        alphabet=frozenset(l for _, l, _ in edges),
        locations=auto.locations,
        initial=auto.initial,
        edges=edges,
        error_location=None,
    )


def apply_priorities(network: Network,
                     priorities: Iterable[Priority]) -> Network:
    """The pruned system: demoted lower edges are disabled wherever their
    higher sibling is available (same source location, so always)."""
    removed: dict[str, set[Edge]] = {}
    for priority in priorities:
        removed.setdefault(priority.component_id, set()).add(priority.lower)
    pruned = tuple(
        (cid, _without_edges(auto, removed[cid]) if cid in removed else auto)
        for cid, auto in network.components)
    return Network(pruned)


def _candidate_demotions(network: Network) -> list[tuple[str, Edge]]:
    candidates = []
    for cid, auto in network.components:
        by_source: dict[str, list[Edge]] = {}
        for edge in sorted(auto.edges, key=edge_sort_key):
            by_source.setdefault(edge[0], []).append(edge)
        for edges in by_source.values():
            if len(edges) >= 2:
                candidates.extend((cid, e) for e in edges)
    return candidates


def _rank_candidates(exploration: Exploration,
                     attractor: set[ProductState],
                     candidates: list[tuple[str, Edge]]) -> list[tuple[str, Edge]]:
    bad_uses: dict[tuple[str, Edge], int] = {c: 0 for c in candidates}
    for state in exploration.order:
        if state in attractor:
            continue
        for move in exploration.moves_of[state]:
            if move.target not in attractor:
                continue
            for cid, edge in move.movers:
                if (cid, edge) in bad_uses:
                    bad_uses[(cid, edge)] += 1
    return sorted(candidates,
                  key=lambda c: (-bad_uses[c], c[0], edge_sort_key(c[1])))


def _priorities_for(network: Network,
                    demoted: Sequence[tuple[str, Edge]]) -> list[Priority] | None:
    """Pair every demoted edge with a surviving co-located sibling."""
    removed = set(demoted)
    priorities = []
    for cid, edge in sorted(demoted, key=lambda c: (c[0], edge_sort_key(c[1]))):
        auto = network.automaton(cid)
        siblings = [e for e in auto.edges_from(edge[0])
                    if e != edge and (cid, e) not in removed]
        if not siblings:
            return None
        priorities.append(Priority(component_id=cid, lower=edge, higher=siblings[0]))
    return priorities


def synthesize_priorities(network: Network,
                          bound: int = DEFAULT_BOUND) -> list[Priority]:
    """Find local edge priorities whose pruned system is deadlock-free.

    The deadlock attractor guides a smallest-first search over candidate
    demotions; every candidate set is re-verified with find_deadlocks.
    Raises SynthesisUnsat when the initial state is already doomed or when no
    admissible priority set exists within the search depth.
    """
    product = Product(network)
    exploration = product.explore(bound)
    deadlocked = {s for s in exploration.order
                  if _is_deadlock(product, s, exploration.moves_of[s])}
    if not deadlocked:
        return []
    attractor = _attractor(exploration, deadlocked)
    if product.initial in attractor:
        raise SynthesisUnsat("initial state lies in the deadlock attractor")

    candidates = _rank_candidates(exploration, attractor,
                                  _candidate_demotions(network))
    depth_cap = min(len(candidates), _SEARCH_DEPTH_CAP)
    for size in range(1, depth_cap + 1):
        for combo in itertools.combinations(candidates, size):
            priorities = _priorities_for(network, combo)
            if priorities is None:
                continue
            pruned = apply_priorities(network, priorities)
            report = find_deadlocks(pruned, bound)
            if not report.deadlocks:
                return priorities
    raise SynthesisUnsat(
        f"no admissible priority set of up to {depth_cap} demotions found")


def select_protocol(own: BehavioralType, peer: BehavioralTypeAutomaton,
                    automaton_name: str | None = None,
                    bound: int = DEFAULT_BOUND) -> Label:
    """Pick the initial call to use against a peer: synthesize priorities for
    the pair and return the preferred label enabled at the initial state."""
    if automaton_name is None:
        for name, auto in own.automata:
            if any(l.direction is Direction.OUT for l in auto.alphabet):
                automaton_name = name
                break
        if automaton_name is None:
            raise ContractError(
                f"type {own.id!r} has no automaton describing outgoing calls")
    auto = own.automaton(automaton_name)
    network = Network((("own", auto), ("peer", peer)))
    try:
        priorities = synthesize_priorities(network, bound)
    except SynthesisUnsat as exc:
        raise IncompatibleProtocolError(
            f"no protocol choice avoids deadlock: {exc.reason}") from exc
    demoted = {(p.component_id, p.lower) for p in priorities}
    product = Product(network)
    enabled = []
    for move in product.moves(product.initial):
        for cid, edge in move.movers:
            if cid == "own" and edge[0] == auto.initial and ("own", edge) not in demoted:
                enabled.append(edge[1])
    if not enabled:
        raise IncompatibleProtocolError(
            "no outgoing call is enabled at the initial state")
    return min(enabled, key=Label.sort_key)
