"""Equality and refinement checking on behavioral type automata.

Both checks canonicalize through the same pipeline: complete over the
comparison universe, determinize, minimize, normalize.  Equality compares the
canonical forms edge-for-edge; refinement checks trace-language inclusion on
the automata restricted to a shared alphabet.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .automata import (BehavioralTypeAutomaton, HideMode, canonical_renaming,
                       complete, determinize, hide, minimize, normalize,
                       rename_locations)
from .errors import ContractError
from .labels import Label


@dataclass(frozen=True)
class EqualityVerdict:
    equal: bool
    location_mapping: dict[str, str] | None = None
    counterexample: tuple[Label, ...] | None = None


@dataclass(frozen=True)
class _Canonical:
    automaton: BehavioralTypeAutomaton
    original_to_canonical: dict[str, str] | None  # None when states merged/split


def canonical_form(a: BehavioralTypeAutomaton,
                   universe: Iterable[Label] | None = None) -> _Canonical:
    """Run the full comparison pipeline, tracking the location renaming when
    the pipeline is a pure renaming (no subset merging, no pruning)."""
    over = frozenset(universe) if universe is not None else a.alphabet
    completed = complete(a, over)
    det = determinize(completed)
    merged = minimize(det)
    renaming = canonical_renaming(merged)
    result = rename_locations(merged, renaming)

    mapping: dict[str, str] | None = None
    reachable = completed.reachable_locations()
    singleton_names = {"{" + loc + "}" for loc in completed.locations}
    bijective = (reachable == set(completed.locations)
                 and set(det.locations) == singleton_names
                 and len(merged.locations) == len(det.locations))
    if bijective:
        # Each subset is a singleton {loc} and each minimization class trivial.
        mapping = {loc: renaming["{" + loc + "}"] for loc in completed.locations}
        if completed.error_location is not None and a.error_location is None:
            mapping.pop(completed.error_location)  # synthetic, has no original
    return _Canonical(result, mapping)


def _structurally_equal(a: BehavioralTypeAutomaton, b: BehavioralTypeAutomaton) -> bool:
    return (a.alphabet == b.alphabet and a.locations == b.locations
            and a.initial == b.initial and a.edges == b.edges
            and a.error_location == b.error_location)


def _distinguishing_word(a: BehavioralTypeAutomaton,
                         b: BehavioralTypeAutomaton) -> tuple[Label, ...]:
    """Shortest word accepted by exactly one of two total deterministic
    automata over the same alphabet; ties broken lexicographically."""
    labels = sorted(a.alphabet, key=Label.sort_key)
    da = {(s, l): d for s, l, d in a.edges}
    db = {(s, l): d for s, l, d in b.edges}
    start = (a.initial, b.initial)
    seen = {start}
    queue: deque[tuple[tuple[str, str], tuple[Label, ...]]] = deque([(start, ())])
    while queue:
        (sa, sb), word = queue.popleft()
        dead_a = sa == a.error_location
        dead_b = sb == b.error_location
        if dead_a != dead_b:
            return word
        for label in labels:
            nxt = (da[(sa, label)], db[(sb, label)])
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, word + (label,)))
    raise ContractError("internal: automata differ structurally but not in language")


def check_equal(a: BehavioralTypeAutomaton, b: BehavioralTypeAutomaton,
                compare_location_names: bool = False,
                universe: Iterable[Label] | None = None) -> EqualityVerdict:
    """Language equality, by default over the union alphabet.

    An explicit ``universe`` (covering both alphabets) overrides the default
    comparison set.  With ``compare_location_names`` the original location
    names must also correspond identically; a purely name-level mismatch
    yields no word counterexample.
    """
    if universe is None:
        universe = a.alphabet | b.alphabet
    else:
        universe = frozenset(universe)
        uncovered = (a.alphabet | b.alphabet) - universe
        if uncovered:
            names = ", ".join(sorted(str(l) for l in uncovered))
            raise ContractError(
                f"comparison universe misses alphabet labels: {names}")
    ca = canonical_form(a, universe)
    cb = canonical_form(b, universe)
    if not _structurally_equal(ca.automaton, cb.automaton):
        word = _distinguishing_word(ca.automaton, cb.automaton)
        return EqualityVerdict(equal=False, counterexample=word)

    if ca.original_to_canonical is not None and cb.original_to_canonical is not None:
        inverse_b = {canon: orig for orig, canon in cb.original_to_canonical.items()}
        mapping = {orig: inverse_b[canon]
                   for orig, canon in ca.original_to_canonical.items()
                   if canon in inverse_b}
        complete_mapping = len(mapping) == len(ca.original_to_canonical)
    else:
        # the pipeline merged locations; witness the renaming canonically
        mapping = {loc: loc for loc in ca.automaton.locations}
        complete_mapping = True

    if compare_location_names:
        names_match = complete_mapping and all(k == v for k, v in mapping.items())
        if not names_match:
            return EqualityVerdict(equal=False)
    return EqualityVerdict(equal=True, location_mapping=mapping)


def check_refines(concrete: BehavioralTypeAutomaton,
                  abstract: BehavioralTypeAutomaton,
                  shared: Iterable[Label],
                  mode: HideMode = HideMode.TAU) -> EqualityVerdict:
    """Trace-language inclusion of the concrete type in the abstract one after
    hiding everything outside the shared alphabet on both sides."""
    shared_set = frozenset(shared)
    outside = shared_set - (abstract.alphabet | concrete.alphabet)
    if outside:
        names = ", ".join(sorted(str(l) for l in outside))
        raise ContractError(f"shared labels unknown to both automata: {names}")
    hidden_concrete = hide(concrete, concrete.alphabet - shared_set, mode)
    hidden_abstract = hide(abstract, abstract.alphabet - shared_set, mode)
    universe = hidden_concrete.alphabet | hidden_abstract.alphabet
    dc = canonical_form(hidden_concrete, universe).automaton
    da = canonical_form(hidden_abstract, universe).automaton
    # emptiness of L(concrete) x complement(L(abstract)): a reachable pair
    # where the concrete side is alive and the abstract side is in error
    word = _inclusion_counterexample(dc, da)
    if word is None:
        return EqualityVerdict(equal=True, location_mapping={})
    return EqualityVerdict(equal=False, counterexample=word)


def _inclusion_counterexample(concrete: BehavioralTypeAutomaton,
                              abstract: BehavioralTypeAutomaton
                              ) -> tuple[Label, ...] | None:
    labels = sorted(concrete.alphabet, key=Label.sort_key)
    dc = {(s, l): d for s, l, d in concrete.edges}
    da = {(s, l): d for s, l, d in abstract.edges}
    start = (concrete.initial, abstract.initial)
    seen = {start}
    queue: deque[tuple[tuple[str, str], tuple[Label, ...]]] = deque([(start, ())])
    while queue:
        (sc, sa), word = queue.popleft()
        if sc != concrete.error_location and sa == abstract.error_location:
            return word
        for label in labels:
            nxt = (dc[(sc, label)], da[(sa, label)])
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, word + (label,)))
    return None


def canonicalize(a: BehavioralTypeAutomaton,
                 universe: Iterable[Label] | None = None) -> BehavioralTypeAutomaton:
    """complete + determinize + minimize + normalize over the automaton's own
    alphabet (or an explicit universe)."""
    over = frozenset(universe) if universe is not None else a.alphabet
    return normalize(minimize(determinize(complete(a, over))))
