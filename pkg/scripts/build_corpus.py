#!/usr/bin/env python3
"""Regenerate the fixtures corpus under corpus/.

Every file is produced through the library's canonical serializers, so the
checked-in corpus round-trips byte-identically.  Run after changing the file
formats: python scripts/build_corpus.py [--out DIR]
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from protomata import (BehavioralType, BehavioralTypeAutomaton, MaxTimeTable,
                       TraceEvent, TraceKind, descriptor_to_json,
                       generate_monitor, serialize_trace, serialize_type)
from protomata.labels import inc, neutral, out


def auto(edges, initial, extra_locations=()):
    locations = {s for s, _, _ in edges} | {d for _, _, d in edges} | set(extra_locations)
    return BehavioralTypeAutomaton(
        alphabet=frozenset(l for _, l, _ in edges),
        locations=frozenset(locations),
        initial=initial,
        edges=frozenset(edges),
    )


# -- protocol-version pair ----------------------------------------------------

def protocol_caller() -> BehavioralType:
    full = auto({("l0", out("newPrtcl"), "l1"), ("l0", out("oldPrtcl"), "l2")}, "l0")
    restricted = auto({("l0", out("newPrtcl"), "l1")}, "l0")
    return BehavioralType(
        id="protocol_caller",
        automata=(("out_calls", full), ("out_calls_new_only", restricted)),
        meta={"description": "component able to start a session over either "
                             "protocol version",
              "events": "outgoing method calls"},
    )


def protocol_callee() -> BehavioralType:
    expects = auto({("l0", inc("newPrtcl"), "l1")}, "l0")
    return BehavioralType(
        id="protocol_callee",
        automata=(("inc_calls", expects),),
        meta={"description": "component expecting the new session protocol",
              "events": "expected incoming method calls"},
    )


# -- resource locking ----------------------------------------------------------

def locking_protocol() -> BehavioralType:
    guard = auto({("unlocked", inc("Lock"), "locked"),
                  ("locked", inc("Read"), "locked"),
                  ("locked", inc("Write"), "locked"),
                  ("locked", inc("Unlock"), "unlocked")}, "unlocked")
    return BehavioralType(
        id="locking_protocol",
        automata=(("guarded_access", guard),),
        regexes=(("guarded_access_expr",
                  _rx("((INC:Lock).(INC:Read + INC:Write)*.(INC:Unlock))*")),),
        meta={"description": "resource accessed between a lock and an unlock"},
    )


def lock_template() -> BehavioralType:
    guard = auto({("unlocked", inc("Lock", "F"), "locked"),
                  ("locked", inc("Read", "F"), "locked"),
                  ("locked", inc("Write", "F"), "locked"),
                  ("locked", inc("Unlock", "F"), "unlocked")}, "unlocked")
    return BehavioralType(
        id="lock_template",
        automata=(("guarded_access", guard),),
        regexes=(("guarded_access_expr",
                  _rx("((INC:Lock<F>).(INC:Read<F> + INC:Write<F>)*.(INC:Unlock<F>))*")),),
        param_locations={"guarded_access": frozenset({"locked"})},
        meta={"description": "locking protocol parameterized by the resource instance"},
    )


def file_instance(fid: str) -> BehavioralType:
    guard = auto({("unlocked", inc(f"Lock{fid}"), f"locked{fid}"),
                  (f"locked{fid}", inc(f"Read{fid}"), f"locked{fid}"),
                  (f"locked{fid}", inc(f"Write{fid}"), f"locked{fid}"),
                  (f"locked{fid}", inc(f"Unlock{fid}"), "unlocked")}, "unlocked")
    return BehavioralType(
        id=f"file_{fid.lower()}",
        automata=(("guarded_access", guard),),
        meta={"description": f"file component instance {fid}"},
    )


def lock_client(name: str, unlock_first: str, session_expr: str) -> BehavioralType:
    other = {"F1": "F2", "F2": "F1"}[unlock_first]
    discipline = auto({
        ("idle", out("LockF1"), "holdsF1"),
        ("idle", out("LockF2"), "holdsF2"),
        ("holdsF1", out("LockF2"), "critical"),
        ("holdsF2", out("LockF1"), "critical"),
        ("critical", out("ReadF1"), "critical"),
        ("critical", out("ReadF2"), "critical"),
        ("critical", out("WriteF1"), "critical"),
        ("critical", out("WriteF2"), "critical"),
        ("critical", out(f"Unlock{unlock_first}"), "releasing"),
        ("releasing", out(f"Unlock{other}"), "idle"),
    }, "idle")
    return BehavioralType(
        id=name,
        automata=(("lock_discipline", discipline),),
        regexes=(("session_order", _rx(session_expr)),),
        meta={"description": "client locking two files, either order first",
              "events": "outgoing method calls"},
    )


# -- speed control -------------------------------------------------------------

def speed_control() -> BehavioralType:
    machine = auto({("active", neutral("brake"), "active"),
                    ("active", neutral("acceleration"), "active")}, "active")
    return BehavioralType(
        id="speed_control",
        automata=(("events", machine),),
        meta={"description": "speed control able to brake and accelerate"},
    )


def speed_control_modes() -> BehavioralType:
    edges = set()
    for mode in ("standard", "eco", "sport"):
        edges.add((mode, neutral("brake"), mode))
        edges.add((mode, neutral("acceleration"), mode))
    edges |= {("standard", neutral("switchEco"), "eco"),
              ("eco", neutral("switchStandard"), "standard"),
              ("standard", neutral("switchSport"), "sport"),
              ("sport", neutral("switchStandard"), "standard")}
    machine = auto(edges, "standard")
    return BehavioralType(
        id="speed_control_modes",
        automata=(("events", machine),),
        meta={"description": "speed control refined into standard, eco and "
                             "sport driving modes"},
    )


# -- booking system --------------------------------------------------------------

def middleware_process() -> BehavioralType:
    database = auto({
        ("idle", out("listFlights"), "browsing"),
        ("browsing", out("listFlights"), "browsing"),
        ("browsing", out("lockSeats"), "holding"),
        ("holding", out("reserveSeat"), "holding"),
        ("holding", out("cancelReservation"), "holding"),
        ("holding", out("unlockSeats"), "idle"),
    }, "idle")
    payment = auto({
        ("idle", out("validatePayment"), "validating"),
        ("validating", out("chargePayment"), "idle"),
        ("validating", out("abortPayment"), "idle"),
    }, "idle")
    lifecycle = auto({
        ("fresh", inc("newMiddlewareProc"), "serving"),
        ("serving", inc("handleRequest"), "serving"),
    }, "fresh")
    return BehavioralType(
        id="middleware_process",
        automata=(("out_database", database), ("out_payment", payment),
                  ("inc_lifecycle", lifecycle)),
        maxtimes=MaxTimeTable({"reserveSeat": 2000, "validatePayment": 3000}),
        meta={"description": "booking middleware serving one client",
              "out_database": "calls into the flight database",
              "out_payment": "calls into the payment service",
              "inc_lifecycle": "constructor then opaque web requests"},
    )


def flight_database(limited: bool = False) -> BehavioralType:
    edges = {
        ("ready", inc("listFlights"), "ready"),
        ("ready", inc("lockSeats"), "locked"),
        ("locked", inc("reserveSeat"), "locked"),
        ("locked", inc("unlockSeats"), "ready"),
    }
    if not limited:
        edges.add(("locked", inc("cancelReservation"), "locked"))
    suffix = "_limited" if limited else ""
    note = ("database lacking the cancelReservation call" if limited
            else "full flight database interface")
    return BehavioralType(
        id=f"flight_database{suffix}",
        automata=(("inc_api", auto(edges, "ready")),),
        meta={"description": note},
    )


def payment_service() -> BehavioralType:
    api = auto({
        ("ready", inc("validatePayment"), "pending"),
        ("pending", inc("chargePayment"), "ready"),
        ("pending", inc("abortPayment"), "ready"),
    }, "ready")
    return BehavioralType(
        id="payment_service",
        automata=(("inc_api", api),),
        maxtimes=MaxTimeTable({"validatePayment": 3000}),
        meta={"description": "payment service used by the middleware"},
    )


def client_session() -> BehavioralType:
    session = auto({
        ("LOCs0", out("newMiddlewareProc"), "LOCs1"),
        ("LOCs1", out("listFlights"), "LOCs1"),
    }, "LOCs0")
    return BehavioralType(
        id="client_session",
        automata=(("out_middleware", session),),
        maxtimes=MaxTimeTable({"listFlights": 1000}),
        meta={"description": "client instance driving one middleware process"},
    )


# -- seat reservation -------------------------------------------------------------

def seat_template() -> BehavioralType:
    levels = auto({
        ("low", inc("reserve", "F"), "medium"),
        ("medium", inc("reserve", "F"), "high"),
        ("high", inc("reserve", "F"), "full"),
        ("full", inc("cancel", "F"), "high"),
        ("high", inc("cancel", "F"), "medium"),
        ("medium", inc("cancel", "F"), "low"),
    }, "low")
    return BehavioralType(
        id="seat_template",
        automata=(("load_levels", levels),),
        meta={"description": "per-flight seat load abstracted into low, "
                             "medium, high and full"},
    )


def flight(fid: str) -> BehavioralType:
    levels = auto({
        ("low", inc(f"reserve{fid}"), "medium"),
        ("medium", inc(f"reserve{fid}"), "high"),
        ("high", inc(f"reserve{fid}"), "full"),
        ("full", inc(f"cancel{fid}"), "high"),
        ("high", inc(f"cancel{fid}"), "medium"),
        ("medium", inc(f"cancel{fid}"), "low"),
    }, "high")
    return BehavioralType(
        id=f"flight_{fid.lower()}",
        automata=(("load_levels", levels),),
        meta={"description": f"seat load of flight {fid}, nearly booked out"},
    )


def traveler(name: str, first: str, second: str) -> BehavioralType:
    itinerary = auto({
        ("start", out(f"reserve{first}"), f"have{first}"),
        (f"have{first}", out(f"reserve{second}"), "done"),
    }, "start")
    return BehavioralType(
        id=name,
        automata=(("itinerary", itinerary),),
        meta={"description": f"traveler reserving {first} then {second}"},
    )


# -- traces ------------------------------------------------------------------------

def session_trace(end_ms: int) -> list[TraceEvent]:
    return [
        TraceEvent(1, TraceKind.CALL_START, "client", "newMiddlewareProc", "c1", 0, "o1"),
        TraceEvent(2, TraceKind.CALL_END, "client", "newMiddlewareProc", "c1", 50, "o1"),
        TraceEvent(3, TraceKind.CALL_START, "client", "listFlights", "c2", 100, "o1"),
        TraceEvent(4, TraceKind.CALL_END, "client", "listFlights", "c2", end_ms, "o1"),
    ]


def session_violation_trace() -> list[TraceEvent]:
    return [
        TraceEvent(1, TraceKind.CALL_START, "client", "listFlights", "c1", 0, "o1"),
        TraceEvent(2, TraceKind.CALL_END, "client", "listFlights", "c1", 40, "o1"),
    ]


def locking_violation_trace() -> list[TraceEvent]:
    return [
        TraceEvent(1, TraceKind.CALL_START, "files", "Read", "c1", 0, "f1"),
        TraceEvent(2, TraceKind.CALL_END, "files", "Read", "c1", 5, "f1"),
    ]


def interleaved_sessions_trace() -> list[TraceEvent]:
    return [
        TraceEvent(1, TraceKind.CALL_START, "mw", "newMiddlewareProc", "c1", 0, "o1"),
        TraceEvent(2, TraceKind.CALL_START, "mw", "newMiddlewareProc", "c2", 5, "o2"),
        TraceEvent(3, TraceKind.CALL_END, "mw", "newMiddlewareProc", "c1", 10, "o1"),
        TraceEvent(4, TraceKind.CALL_END, "mw", "newMiddlewareProc", "c2", 12, "o2"),
        TraceEvent(5, TraceKind.CALL_START, "mw", "listFlights", "c3", 20, "o1"),
        TraceEvent(6, TraceKind.CALL_END, "mw", "listFlights", "c3", 30, "o1"),
        TraceEvent(7, TraceKind.CALL_START, "mw", "listFlights", "c4", 35, "o2"),
        TraceEvent(8, TraceKind.CALL_END, "mw", "listFlights", "c4", 40, "o2"),
    ]


def _rx(text: str):
    from protomata import parse_regex
    return parse_regex(text)


def _network(components: list[tuple[str, str, str]]) -> str:
    payload = {"components": [
        {"id": cid, "type_file": type_file, "automaton_name": automaton}
        for cid, type_file, automaton in components
    ]}
    return json.dumps(payload, indent=2) + "\n"


def _entry(interfaces: list[str], meta: dict) -> str:
    return json.dumps({"interfaces": interfaces, "meta": meta}, indent=2) + "\n"


def build(out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "traces").mkdir(exist_ok=True)
    (out_dir / "monitors").mkdir(exist_ok=True)

    types = [
        protocol_caller(), protocol_callee(),
        locking_protocol(), lock_template(),
        file_instance("F1"), file_instance("F2"),
        lock_client("lock_client_a", "F2",
                    "(OUT:LockF1).(OUT:LockF2)"
                    ".((OUT:ReadF1) + (OUT:ReadF2) + (OUT:WriteF1) + (OUT:WriteF2))*"
                    ".(OUT:UnlockF2).(OUT:UnlockF1)"),
        lock_client("lock_client_b", "F1",
                    "(OUT:LockF2).(OUT:LockF1)"
                    ".((OUT:ReadF1) + (OUT:ReadF2) + (OUT:WriteF1) + (OUT:WriteF2))*"
                    ".(OUT:UnlockF1).(OUT:UnlockF2)"),
        speed_control(), speed_control_modes(),
        middleware_process(), flight_database(), flight_database(limited=True),
        payment_service(), client_session(),
        seat_template(), flight("AB"), flight("BC"),
        traveler("traveler_1", "AB", "BC"), traveler("traveler_2", "BC", "AB"),
    ]
    for t in types:
        (out_dir / f"{t.id}.bt.json").write_text(serialize_type(t), encoding="utf-8")

    (out_dir / "protocol_versions.net.json").write_text(_network([
        ("initiator", "protocol_caller.bt.json", "out_calls"),
        ("responder", "protocol_callee.bt.json", "inc_calls"),
    ]), encoding="utf-8")
    (out_dir / "file_locking.net.json").write_text(_network([
        ("client_a", "lock_client_a.bt.json", "lock_discipline"),
        ("client_b", "lock_client_b.bt.json", "lock_discipline"),
        ("file_f1", "file_f1.bt.json", "guarded_access"),
        ("file_f2", "file_f2.bt.json", "guarded_access"),
    ]), encoding="utf-8")
    (out_dir / "seat_reservation.net.json").write_text(_network([
        ("traveler_1", "traveler_1.bt.json", "itinerary"),
        ("traveler_2", "traveler_2.bt.json", "itinerary"),
        ("flight_ab", "flight_ab.bt.json", "load_levels"),
        ("flight_bc", "flight_bc.bt.json", "load_levels"),
    ]), encoding="utf-8")

    traces = {
        "session_ok.jsonl": session_trace(1000),
        "session_slow.jsonl": session_trace(1600),
        "session_protocol_violation.jsonl": session_violation_trace(),
        "locking_violation.jsonl": locking_violation_trace(),
        "middleware_sessions.jsonl": interleaved_sessions_trace(),
    }
    for name, events in traces.items():
        (out_dir / "traces" / name).write_text(serialize_trace(events),
                                               encoding="utf-8")

    descriptor = generate_monitor(client_session(), "out_middleware")
    (out_dir / "monitors" / "client_session.mon.json").write_text(
        descriptor_to_json(descriptor), encoding="utf-8")

    store = out_dir / "registry_store"
    registrations = [
        ("initiator", ["SessionInitiator"], protocol_caller()),
        ("responder", ["SessionResponder"], protocol_callee()),
        ("flightdb", ["FlightDatabase"], flight_database()),
        ("payment", ["PaymentService"], payment_service()),
    ]
    for component_id, interfaces, model in registrations:
        component_dir = store / component_id
        component_dir.mkdir(parents=True, exist_ok=True)
        (component_dir / "entry.json").write_text(
            _entry(interfaces, {"component": component_id}), encoding="utf-8")
        (component_dir / f"{model.id}.bt.json").write_text(
            serialize_type(model), encoding="utf-8")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent
                                             / "corpus"))
    args = parser.parse_args()
    build(Path(args.out))
    print(f"corpus written to {args.out}")


if __name__ == "__main__":
    main()
