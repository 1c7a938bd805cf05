#!/usr/bin/env python3
"""Walk through the protocol-version story on the corpus: detect the stuck
branch, synthesize a priority, and pick the opening call at runtime."""

from __future__ import annotations

import argparse
from pathlib import Path

from protomata import (apply_priorities, check_compatibility, compose,
                       find_deadlocks, select_protocol, synthesize_priorities)
from protomata.traceio import load_network, load_type


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--corpus", type=Path,
                        default=Path(__file__).resolve().parent.parent / "corpus")
    args = parser.parse_args()

    network = load_network(args.corpus / "protocol_versions.net.json")
    caller_type = load_type(args.corpus / "protocol_caller.bt.json")
    callee = load_type(args.corpus / "protocol_callee.bt.json").automaton("inc_calls")

    product = compose(network)
    print("joint moves from the initial state:")
    for move in product.moves(product.initial):
        movers = ", ".join(move.mover_ids())
        print(f"  {move.label}  (moves: {movers})  ->  {move.target}")

    report = find_deadlocks(network)
    print(f"\nreachable states: {report.total_reachable}, "
          f"deadlocks: {len(report.deadlocks)}")
    for state, witness in report.deadlocks:
        steps = " . ".join(str(m.label) for m in witness) or "<initial>"
        print(f"  stuck at {state} after {steps}")

    verdict = check_compatibility(caller_type.automaton("out_calls"), callee)
    print(f"\nfull caller compatible with callee: {verdict.compatible}")
    if verdict.counterexample:
        _, method = verdict.counterexample
        print(f"  nobody expects: {method}")

    priorities = synthesize_priorities(network)
    for p in priorities:
        print(f"\nsynthesized priority in {p.component_id}: "
              f"{p.lower[1]} < {p.higher[1]}")
    pruned = apply_priorities(network, priorities)
    print(f"deadlocks after pruning: {len(find_deadlocks(pruned).deadlocks)}")

    chosen = select_protocol(caller_type, callee, automaton_name="out_calls")
    print(f"\nprotocol selected for the session: {chosen.name}")


if __name__ == "__main__":
    main()
