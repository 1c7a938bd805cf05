import json
import random

import pytest

from protomata.btypes import BehavioralType, MaxTimeTable
from protomata.errors import ContractError, ParseError
from protomata.labels import inc
from protomata.regex import parse_regex
from protomata.traceio import (TraceEvent, TraceKind, load_network, load_type,
                               parse_trace, parse_type, serialize_trace,
                               serialize_type)

from conftest import CORPUS, random_automaton


# -- traces ----------------------------------------------------------------------

def test_empty_trace():
    assert parse_trace("") == []
    assert parse_trace("\n\n") == []


def test_two_line_start_end_pair():
    text = (
        '{"seq": 1, "kind": "CALL_START", "component": "mw", '
        '"method": "listFlights", "call_id": "c1", "timestamp_millis": 0}\n'
        '{"seq": 2, "kind": "CALL_END", "component": "mw", '
        '"method": "listFlights", "call_id": "c1", "timestamp_millis": 900}\n'
    )
    events = parse_trace(text)
    assert len(events) == 2
    assert events[1].timestamp_millis - events[0].timestamp_millis == 900


def test_trace_parse_error_locations():
    with pytest.raises(ParseError, match="line 2"):
        parse_trace('{"seq": 1, "kind": "CALL_START", "component": "c", '
                    '"method": "m", "call_id": "x", "timestamp_millis": 0}\n'
                    '{broken\n')


@pytest.mark.parametrize("mutation,message", [
    ({"seq": 1}, "does not increase"),
    ({"timestamp_millis": 0}, "decreases"),
    ({"kind": "CALL_END", "call_id": "other"}, "without a start"),
])
def test_trace_invariant_violations(mutation, message):
    base = {"seq": 1, "kind": "CALL_START", "component": "c", "method": "m",
            "call_id": "x", "timestamp_millis": 10}
    second = {"seq": 2, "kind": "CALL_END", "component": "c", "method": "m",
              "call_id": "x", "timestamp_millis": 20}
    second.update(mutation)
    text = json.dumps(base) + "\n" + json.dumps(second) + "\n"
    with pytest.raises(ParseError, match=message):
        parse_trace(text)


def test_trace_unknown_fields_strict_vs_lenient():
    record = {"seq": 1, "kind": "CALL_START", "component": "c", "method": "m",
              "call_id": "x", "timestamp_millis": 0, "extra": True}
    text = json.dumps(record) + "\n"
    with pytest.raises(ParseError, match="unknown"):
        parse_trace(text)
    assert len(parse_trace(text, strict=False)) == 1


def test_trace_round_trip_fuzzed():
    rng = random.Random(917)
    for _ in range(60):
        events = []
        ts = 0
        open_calls = []
        for seq in range(1, rng.randint(1, 12)):
            ts += rng.randint(0, 50)
            if open_calls and rng.random() < 0.4:
                call_id = open_calls.pop(rng.randrange(len(open_calls)))
                kind = TraceKind.CALL_END
            else:
                call_id = f"c{seq}"
                open_calls.append(call_id)
                kind = TraceKind.CALL_START
            events.append(TraceEvent(
                seq=seq, kind=kind, component=rng.choice(["mw", "db"]),
                method=rng.choice(["ping", "pong"]), call_id=call_id,
                timestamp_millis=ts,
                object_id=rng.choice([None, "o1", "o2"])))
        text = serialize_trace(events)
        assert parse_trace(text) == events
        assert serialize_trace(parse_trace(text)) == text


# -- behavioral type files ---------------------------------------------------------

def test_corpus_files_round_trip_byte_identically():
    for path in sorted(CORPUS.glob("*.bt.json")):
        text = path.read_text(encoding="utf-8")
        parsed = parse_type(text)
        assert serialize_type(parsed) == text, path.name
        assert parse_type(serialize_type(parsed)) == parsed


def test_parse_protocol_callee(corpus):
    t = load_type(corpus / "protocol_callee.bt.json")
    automaton = t.automaton("inc_calls")
    assert len(automaton.locations) == 2
    assert len(automaton.edges) == 1
    assert automaton.edges == frozenset({("l0", inc("newPrtcl"), "l1")})


def test_inconsistent_alphabet_rejected():
    payload = {
        "id": "broken",
        "automata": [{
            "name": "m",
            "alphabet": [{"dir": "INC", "name": "ghost"},
                         {"dir": "INC", "name": "used"}],
            "locations": ["l0"],
            "initial": "l0",
            "edges": [["l0", "INC:used", "l0"]],
        }],
        "regexes": [], "maxtimes": {}, "meta": {},
    }
    with pytest.raises(ParseError, match="consistency"):
        parse_type(json.dumps(payload))


def test_schema_violations_carry_pointers():
    payload = {"id": "x", "automata": [{"name": "m"}],
               "regexes": [], "maxtimes": {}, "meta": {}}
    with pytest.raises(ParseError, match="/automata/0"):
        parse_type(json.dumps(payload))


def test_unknown_type_fields_strict_vs_lenient():
    payload = {"id": "x", "automata": [], "regexes": [], "maxtimes": {},
               "meta": {}, "surprise": 1}
    with pytest.raises(ParseError, match="unknown"):
        parse_type(json.dumps(payload))
    assert parse_type(json.dumps(payload), strict=False).id == "x"


def test_maxtimes_must_reference_known_methods():
    automaton = random_automaton(random.Random(1), max_labels=1)
    with pytest.raises(ContractError, match="never mentioned"):
        BehavioralType(id="t", automata=(("m", automaton),),
                       maxtimes=MaxTimeTable({"ghost": 10}))


def test_duplicate_model_names_rejected():
    automaton = random_automaton(random.Random(2))
    with pytest.raises(ContractError, match="duplicate"):
        BehavioralType(id="t", automata=(("m", automaton), ("m", automaton)))


def test_random_types_round_trip():
    rng = random.Random(5)
    for i in range(40):
        automata = tuple((f"m{j}", random_automaton(rng))
                         for j in range(rng.randint(0, 3)))
        regexes = tuple()
        if rng.random() < 0.5:
            regexes = (("r0", parse_regex("(INC:go).(INC:stop)*")),)
        t = BehavioralType(id=f"t{i}", automata=automata, regexes=regexes,
                           meta={"k": "v"} if rng.random() < 0.5 else {})
        text = serialize_type(t)
        assert parse_type(text) == t
        assert serialize_type(parse_type(text)) == text


def test_param_locations_round_trip(corpus):
    t = load_type(corpus / "lock_template.bt.json")
    assert t.param_locations == {"guarded_access": frozenset({"locked"})}
    assert parse_type(serialize_type(t)) == t


# -- networks -------------------------------------------------------------------------

def test_load_network_resolves_type_files(corpus):
    network = load_network(corpus / "protocol_versions.net.json")
    assert network.ids() == ["initiator", "responder"]


def test_network_missing_fields():
    import tempfile
    from pathlib import Path
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "bad.net.json"
        path.write_text('{"components": [{"id": "x"}]}')
        with pytest.raises(ParseError, match="misses fields"):
            load_network(path)
