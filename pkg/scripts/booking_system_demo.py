#!/usr/bin/env python3
"""Run every checker over the booking-system corpus: database compatibility,
the two-flight seat-reservation deadlock, monitor generation and replay, and
component discovery."""

from __future__ import annotations

import argparse
from pathlib import Path

from protomata import (MonitorGroup, Relation, Role, check_compatibility,
                       emit_monitor_source, find_deadlocks, generate_monitor,
                       load_registry_dir, run_trace)
from protomata.traceio import load_network, load_trace, load_type


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--corpus", type=Path,
                        default=Path(__file__).resolve().parent.parent / "corpus")
    args = parser.parse_args()

    middleware = load_type(args.corpus / "middleware_process.bt.json")
    out_db = middleware.automaton("out_database")
    for db_file in ("flight_database.bt.json", "flight_database_limited.bt.json"):
        db = load_type(args.corpus / db_file).automaton("inc_api")
        verdict = check_compatibility(out_db, db)
        line = f"middleware vs {db_file}: compatible={verdict.compatible}"
        if verdict.counterexample:
            trace, method = verdict.counterexample
            steps = " . ".join(str(m.label) for m in trace) or "<initial>"
            line += f"  (unreceivable {method} after {steps})"
        print(line)

    network = load_network(args.corpus / "seat_reservation.net.json")
    report = find_deadlocks(network)
    print(f"\nseat reservation: {len(report.deadlocks)} deadlocks in "
          f"{report.total_reachable} states")
    for state, _ in report.deadlocks:
        print(f"  {dict(zip(network.ids(), state))}")

    session = load_type(args.corpus / "client_session.bt.json")
    descriptor = generate_monitor(session, "out_middleware")
    print(f"\ngenerated monitor {descriptor.name}: "
          f"locations {list(descriptor.locations)}, "
          f"maxtimes {dict(descriptor.maxtimes.entries)}")
    print(emit_monitor_source(descriptor).splitlines()[5])
    for trace_file in ("session_ok.jsonl", "session_slow.jsonl",
                       "session_protocol_violation.jsonl"):
        events = load_trace(args.corpus / "traces" / trace_file)
        result = run_trace(MonitorGroup(descriptor), events)
        verdicts = [f"{v.kind.value}({v.method})" for v in result.violations]
        print(f"  {trace_file}: {'clean' if result.ok else ', '.join(verdicts)}")

    registry = load_registry_dir(args.corpus / "registry_store")
    required = load_type(args.corpus / "protocol_callee.bt.json"
                         ).automaton("inc_calls")
    matches = registry.discover(required, Relation.COMPATIBLE, Role.AS_CALLEE)
    print("\ncomponents able to call the responder's expected protocol:")
    for match in matches:
        print(f"  {match.component_id} ({match.model_name}/"
              f"{match.automaton_name}, strength {match.strength.value})")


if __name__ == "__main__":
    main()
