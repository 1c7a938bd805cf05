"""Randomized property suites over the whole library surface."""

from __future__ import annotations

import json

from hypothesis import given, settings, strategies as st

from protomata.automata import (BehavioralTypeAutomaton, accepts, complete,
                                determinize, minimize, normalize)
from protomata.btypes import BehavioralType, MaxTimeTable
from protomata.compare import check_equal, check_refines
from protomata.labels import Direction, Label, neutral
from protomata.monitor import (DispatchMode, MonitorGroup, MonitorInstance,
                               generate_monitor, run_trace)
from protomata.regex import (Alt, Atom, Concat, Epsilon, Star,
                             regex_to_automaton)
from protomata.traceio import (TraceEvent, TraceKind, parse_trace, parse_type,
                               serialize_trace, serialize_type)

from oracles import automaton_language, regex_prefixes

NAMES = ("alpha", "beta", "gamma", "delta")

EXAMPLES = settings(max_examples=200)


def label_st(directions=(Direction.NEUTRAL,)):
    return st.builds(Label,
                     st.sampled_from(directions),
                     st.sampled_from(NAMES))


@st.composite
def automaton_st(draw, max_locations=5, max_labels=4,
                 directions=(Direction.NEUTRAL,), deterministic=False):
    n = draw(st.integers(1, max_locations))
    locations = [f"l{i}" for i in range(n)]
    k = draw(st.integers(1, max_labels))
    labels = [Label(draw(st.sampled_from(directions)), NAMES[i])
              for i in range(k)]
    triples = st.tuples(st.sampled_from(locations), st.sampled_from(labels),
                        st.sampled_from(locations))
    edges = set(draw(st.lists(triples, max_size=2 * n)))
    if deterministic:
        seen, pruned = set(), set()
        for edge in sorted(edges, key=lambda e: (e[0], str(e[1]), e[2])):
            if (edge[0], edge[1]) not in seen:
                seen.add((edge[0], edge[1]))
                pruned.add(edge)
        edges = pruned
    return BehavioralTypeAutomaton(
        alphabet=frozenset(l for _, l, _ in edges),
        locations=frozenset(locations),
        initial="l0",
        edges=frozenset(edges))


@st.composite
def regex_st(draw, depth=4):
    if depth == 0:
        return Atom(draw(label_st()))
    kind = draw(st.sampled_from(["atom", "atom", "concat", "alt", "star",
                                 "epsilon"]))
    if kind == "atom":
        return Atom(draw(label_st()))
    if kind == "epsilon":
        return Epsilon()
    if kind == "star":
        return Star(draw(regex_st(depth=depth - 1)))
    children = tuple(draw(regex_st(depth=depth - 1))
                     for _ in range(draw(st.integers(2, 3))))
    return Concat(children) if kind == "concat" else Alt(children)


def variant_st(automaton: BehavioralTypeAutomaton):
    """Language-preserving disguises of an automaton."""
    def renamed(prefix: str) -> BehavioralTypeAutomaton:
        mapping = {loc: f"{prefix}{loc}" for loc in automaton.locations}
        return BehavioralTypeAutomaton(
            alphabet=automaton.alphabet,
            locations=frozenset(mapping.values()),
            initial=mapping[automaton.initial],
            edges=frozenset((mapping[s], l, mapping[d])
                            for s, l, d in automaton.edges))

    return st.sampled_from([automaton, normalize(automaton), renamed("x"),
                            renamed("why_")])


# -- 1. regex / automaton agreement --------------------------------------------

@EXAMPLES
@given(regex_st())
def test_regex_automaton_language_agreement(r):
    automaton = regex_to_automaton(r)
    assert automaton_language(automaton, 5) == regex_prefixes(r, 5)
    assert automaton.alphabet == r.atoms()


# -- 2. pipeline stages preserve the language -----------------------------------

@EXAMPLES
@given(automaton_st())
def test_pipeline_preserves_language(a):
    reference = automaton_language(a, 6)
    stage = complete(a, a.alphabet)
    assert automaton_language(stage, 6) == reference
    stage = determinize(stage)
    assert automaton_language(stage, 6) == reference
    stage = minimize(stage)
    assert automaton_language(stage, 6) == reference
    stage = normalize(stage)
    assert automaton_language(stage, 6) == reference
    # the consistency scan holds after every stage by construction; assert it
    assert stage.alphabet == frozenset(l for _, l, _ in stage.edges) \
        or not stage.edges


# -- 3. idempotence ----------------------------------------------------------------

@EXAMPLES
@given(automaton_st())
def test_complete_minimize_normalize_idempotent(a):
    completed = complete(a, a.alphabet)
    assert complete(completed, completed.alphabet) == completed
    merged = minimize(determinize(completed))
    assert minimize(merged) == merged
    named = normalize(a)
    assert normalize(named) == named


# -- 4. equality is an equivalence relation ------------------------------------------

@EXAMPLES
@given(automaton_st(max_locations=4).flatmap(
    lambda a: st.tuples(st.just(a), variant_st(a), variant_st(a),
                        automaton_st(max_locations=4))))
def test_check_equal_equivalence(quad):
    a, b, c, other = quad
    assert check_equal(a, a).equal  # reflexive
    ab = check_equal(a, b)
    assert ab.equal == check_equal(b, a).equal  # symmetric
    if ab.equal and check_equal(b, c).equal:
        assert check_equal(a, c).equal  # transitive
    # transitivity through the disguise chain against an arbitrary automaton
    assert check_equal(a, other).equal == check_equal(b, other).equal


# -- 5. refinement is reflexive and transitive ------------------------------------------

@EXAMPLES
@given(automaton_st(max_locations=4, max_labels=3),
       automaton_st(max_locations=4, max_labels=3),
       automaton_st(max_locations=4, max_labels=3))
def test_check_refines_reflexive_transitive(a, b, c):
    assert check_refines(a, a, a.alphabet).equal
    shared = a.alphabet & b.alphabet & c.alphabet
    ab = check_refines(a, b, shared).equal
    bc = check_refines(b, c, shared).equal
    if ab and bc:
        assert check_refines(a, c, shared).equal


@EXAMPLES
@given(automaton_st(max_locations=4).flatmap(
    lambda a: st.tuples(st.just(a), variant_st(a))))
def test_equality_implies_mutual_refinement(pair):
    a, b = pair
    assert check_equal(a, b).equal
    assert check_refines(a, b, b.alphabet | a.alphabet).equal
    assert check_refines(b, a, a.alphabet | b.alphabet).equal


# -- 6. monitor fold agrees with automaton acceptance --------------------------------------

@EXAMPLES
@given(automaton_st(deterministic=True),
       st.lists(st.sampled_from(NAMES), max_size=8))
def test_monitor_fold_matches_accepts(a, names):
    t = BehavioralType(id="t", automata=(("m", a),))
    descriptor = generate_monitor(t, "m")
    word = [neutral(n) for n in names]
    instance = MonitorInstance(descriptor, latching=False)
    folded = all(instance.step(l.name) for l in word)
    assert folded == accepts(a, word)


# -- 7. per-object dispatch equals de-interleaved runs ---------------------------------------

@st.composite
def interleaving_st(draw):
    objects = draw(st.integers(1, 3))
    streams = {f"o{i}": draw(st.lists(st.sampled_from(NAMES), max_size=5))
               for i in range(objects)}
    order = [obj for obj, events in streams.items() for _ in events]
    order = draw(st.permutations(order))
    return streams, order


@EXAMPLES
@given(automaton_st(deterministic=True), interleaving_st())
def test_per_object_dispatch_matches_solo_runs(a, scenario):
    streams, order = scenario
    t = BehavioralType(id="t", automata=(("m", a),))
    descriptor = generate_monitor(t, "m")
    cursors = {obj: 0 for obj in streams}
    merged = []
    for seq, obj in enumerate(order, start=1):
        method = streams[obj][cursors[obj]]
        cursors[obj] += 1
        merged.append(TraceEvent(seq, TraceKind.CALL_START, "c", method,
                                 f"c{seq}", seq, obj))
    combined = run_trace(
        MonitorGroup(descriptor, DispatchMode.PER_OBJECT, latching=False),
        merged)
    for obj, stream in streams.items():
        solo_events = [TraceEvent(i + 1, TraceKind.CALL_START, "c", method,
                                  f"s{i}", i + 1, obj)
                       for i, method in enumerate(stream)]
        solo = run_trace(
            MonitorGroup(descriptor, DispatchMode.SINGLETON, latching=False),
            solo_events)
        mine = [(v.kind, v.method) for v in combined.violations
                if v.object_id == obj]
        assert mine == [(v.kind, v.method) for v in solo.violations]


# -- 8. trace format round trip ------------------------------------------------------------------

@st.composite
def trace_st(draw):
    events = []
    ts = 0
    open_calls: list[str] = []
    count = draw(st.integers(0, 10))
    for seq in range(1, count + 1):
        ts += draw(st.integers(0, 30))
        close = open_calls and draw(st.booleans())
        if close:
            call_id = open_calls.pop()
            kind = TraceKind.CALL_END
        else:
            call_id = f"c{seq}"
            open_calls.append(call_id)
            kind = TraceKind.CALL_START
        events.append(TraceEvent(
            seq=seq, kind=kind,
            component=draw(st.sampled_from(["mw", "db", "pay"])),
            method=draw(st.sampled_from(NAMES)),
            call_id=call_id, timestamp_millis=ts,
            object_id=draw(st.sampled_from([None, "o1", "o2"]))))
    return events


@EXAMPLES
@given(trace_st())
def test_trace_round_trip(events):
    text = serialize_trace(events)
    assert parse_trace(text) == events
    assert serialize_trace(parse_trace(text)) == text


# -- 9. type format round trip ---------------------------------------------------------------------

@st.composite
def behavioral_type_st(draw):
    automata = tuple((f"m{i}", draw(automaton_st(max_locations=3)))
                     for i in range(draw(st.integers(0, 2))))
    methods = sorted({l.name for _, a in automata for l in a.alphabet})
    maxtimes = {}
    if methods and draw(st.booleans()):
        maxtimes[draw(st.sampled_from(methods))] = draw(st.integers(1, 5000))
    meta = draw(st.dictionaries(st.sampled_from(["k1", "k2"]),
                                st.sampled_from(["v1", "v2"]), max_size=2))
    return BehavioralType(id=draw(st.sampled_from(["one", "two"])),
                          automata=automata,
                          maxtimes=MaxTimeTable(maxtimes),
                          meta=meta)


@EXAMPLES
@given(behavioral_type_st())
def test_type_round_trip(t):
    text = serialize_type(t)
    assert parse_type(text) == t
    assert serialize_type(parse_type(text)) == text
    json.loads(text)  # stays plain JSON
