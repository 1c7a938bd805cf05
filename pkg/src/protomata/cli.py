"""Command-line surface: every checker and generator over files.

stdout carries machine-parseable JSON only; diagnostics go to stderr.
Exit codes: 0 positive verdict, 1 negative verdict, 2 usage or resource error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .automata import HideMode
from .btypes import BehavioralType
from .compare import canonicalize, check_equal, check_refines
from .composition import (DEFAULT_BOUND, check_compatibility, compose,
                          find_deadlocks, select_protocol,
                          synthesize_priorities)
from .errors import (ContractError, IncompatibleProtocolError, ProtomataError,
                     SynthesisUnsat)
from .labels import parse_label
from .monitor import (DispatchMode, MonitorGroup, MonitorMode,
                      descriptor_from_json, descriptor_to_json,
                      emit_monitor_source, generate_monitor, run_trace)
from .params import (ParamSpec, instantiate_per_instance, instantiate_shared,
                     substitute)
from .registry import Relation, Role, load_registry_dir
from .traceio import load_network, load_trace, load_type, save_type


_STRICT = True


def _load_type(path):
    return load_type(path, strict=_STRICT)


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")


def _word(labels) -> list[str]:
    return [str(l) for l in labels]


def _moves_json(moves) -> list[dict]:
    return [{"label": str(m.label), "components": list(m.mover_ids())}
            for m in moves]


def _pick_automaton(t: BehavioralType, name: str | None, path: str) -> str:
    names = t.automaton_names()
    if name is not None and name in names:
        return name
    if len(names) == 1:
        return names[0]
    raise ContractError(
        f"{path} declares automata {names}; pick one with --automaton")


# -- check ---------------------------------------------------------------------

def _cmd_check_equal(args) -> int:
    ta, tb = _load_type(args.left), _load_type(args.right)
    a = ta.automaton(_pick_automaton(ta, args.automaton, args.left))
    b = tb.automaton(_pick_automaton(tb, args.automaton, args.right))
    universe = None
    if args.alphabet:
        universe = frozenset(parse_label(x) for x in args.alphabet.split(","))
    verdict = check_equal(a, b, compare_location_names=args.compare_location_names,
                          universe=universe)
    payload = {"verdict": "equal" if verdict.equal else "not-equal"}
    if verdict.location_mapping is not None:
        payload["location_mapping"] = dict(sorted(verdict.location_mapping.items()))
    if verdict.counterexample is not None:
        payload["counterexample"] = _word(verdict.counterexample)
    _emit(payload)
    return 0 if verdict.equal else 1


def _cmd_check_refine(args) -> int:
    t_abs, t_con = _load_type(args.abstract), _load_type(args.concrete)
    abstract = t_abs.automaton(_pick_automaton(t_abs, args.automaton, args.abstract))
    concrete = t_con.automaton(_pick_automaton(t_con, args.automaton, args.concrete))
    if args.shared:
        shared = frozenset(parse_label(x) for x in args.shared.split(","))
    else:
        shared = abstract.alphabet
    mode = HideMode(args.mode)
    verdict = check_refines(concrete, abstract, shared, mode)
    payload = {"verdict": "refines" if verdict.equal else "does-not-refine"}
    if verdict.counterexample is not None:
        payload["counterexample"] = _word(verdict.counterexample)
    _emit(payload)
    return 0 if verdict.equal else 1


def _cmd_check_compat(args) -> int:
    t_caller, t_callee = _load_type(args.caller), _load_type(args.callee)
    caller = t_caller.automaton(_pick_automaton(t_caller, args.automaton, args.caller))
    callee = t_callee.automaton(
        _pick_automaton(t_callee, args.callee_automaton, args.callee))
    verdict = check_compatibility(caller, callee, bound=args.bound)
    payload = {
        "verdict": "compatible" if verdict.compatible else "incompatible",
        "states_explored": verdict.states_explored,
    }
    if verdict.counterexample is not None:
        trace, method = verdict.counterexample
        payload["counterexample"] = {"trace": _moves_json(trace),
                                     "unmatched_call": method}
    _emit(payload)
    return 0 if verdict.compatible else 1


# -- composition -----------------------------------------------------------------

def _cmd_deadlock(args) -> int:
    network = load_network(args.network, strict=_STRICT)
    report = find_deadlocks(network, bound=args.bound)
    payload = {
        "verdict": "deadlock-free" if not report.deadlocks else "deadlocks-found",
        "states_explored": report.total_reachable,
        "deadlocks": [
            {"state": dict(zip(network.ids(), state)),
             "witness": _moves_json(witness)}
            for state, witness in report.deadlocks
        ],
    }
    _emit(payload)
    return 0 if not report.deadlocks else 1


def _priority_json(p) -> dict:
    return {
        "component": p.component_id,
        "lower": [p.lower[0], str(p.lower[1]), p.lower[2]],
        "higher": [p.higher[0], str(p.higher[1]), p.higher[2]],
    }


def _cmd_priorities(args) -> int:
    network = load_network(args.network, strict=_STRICT)
    explored = len(compose(network).explore(args.bound).order)
    try:
        priorities = synthesize_priorities(network, bound=args.bound)
    except SynthesisUnsat as exc:
        _emit({"verdict": "unsat", "reason": exc.reason,
               "states_explored": explored})
        return 1
    _emit({"verdict": "priorities",
           "priorities": [_priority_json(p) for p in priorities],
           "states_explored": explored})
    return 0


def _cmd_select_protocol(args) -> int:
    own = _load_type(args.own)
    t_peer = _load_type(args.peer)
    peer = t_peer.automaton(_pick_automaton(t_peer, args.peer_automaton, args.peer))
    try:
        label = select_protocol(own, peer, automaton_name=args.automaton,
                                bound=args.bound)
    except IncompatibleProtocolError as exc:
        _emit({"verdict": "incompatible", "reason": str(exc)})
        return 1
    _emit({"verdict": "selected", "protocol": label.name, "label": str(label)})
    return 0


# -- params ---------------------------------------------------------------------

def _cmd_instantiate(args) -> int:
    t = _load_type(args.spec)
    param, _, values_text = args.param.partition("=")
    values = [v for v in values_text.split(",") if v]
    if not param or not values:
        raise ContractError("--param must look like F=v1,v2")
    automata = []
    param_locations: dict[str, frozenset[str]] = {}
    for name, automaton in t.automata:
        spec = ParamSpec(base=automaton,
                         parameters=frozenset(
                             l.parameter for l in automaton.alphabet
                             if l.parameter is not None),
                         parameterized_locations=t.param_locations.get(
                             name, frozenset()))
        if param not in spec.parameters:
            automata.append((name, automaton))
            if name in t.param_locations:
                param_locations[name] = t.param_locations[name]
            continue
        if len(values) == 1:
            result = substitute(spec, {param: values[0]})
        elif args.scheme == "per-instance":
            result = instantiate_per_instance(spec, param, values)
        else:
            result = instantiate_shared(spec, param, values)
        automata.append((name, result))
    regexes = []
    for name, expr in t.regexes:
        params_used = {l.parameter for l in expr.atoms() if l.parameter is not None}
        if param not in params_used:
            regexes.append((name, expr))
        elif len(values) == 1:
            spec = ParamSpec(base=expr, parameters=frozenset(params_used))
            regexes.append((name, substitute(spec, {param: values[0]})))
        else:
            for value in values:
                spec = ParamSpec(base=expr, parameters=frozenset(params_used))
                regexes.append((f"{name}_{value}", substitute(spec, {param: value})))
    instantiated = BehavioralType(
        id=f"{t.id}_{param}_{'_'.join(values)}",
        automata=tuple(automata),
        regexes=tuple(regexes),
        maxtimes=t.maxtimes,
        meta=t.meta,
        param_locations=param_locations,
    )
    save_type(instantiated, args.output)
    _emit({"written": args.output, "id": instantiated.id,
           "automata": len(instantiated.automata)})
    return 0


# -- monitor ----------------------------------------------------------------------

def _cmd_monitor_gen(args) -> int:
    t = _load_type(args.type)
    descriptor = generate_monitor(t, _pick_automaton(t, args.automaton, args.type),
                                  mode=MonitorMode(args.mode))
    Path(args.output).write_text(descriptor_to_json(descriptor), encoding="utf-8")
    payload = {"written": args.output, "name": descriptor.name,
               "locations": len(descriptor.locations),
               "transitions": len(descriptor.transitions)}
    if args.emit_source:
        source = emit_monitor_source(descriptor, template=args.template)
        Path(args.emit_source).write_text(source, encoding="utf-8")
        payload["source"] = args.emit_source
    _emit(payload)
    return 0


def _cmd_monitor_run(args) -> int:
    descriptor = descriptor_from_json(Path(args.monitor).read_text(encoding="utf-8"))
    events = load_trace(args.trace, strict=_STRICT)
    group = MonitorGroup(descriptor, dispatch=DispatchMode(args.dispatch),
                         latching=not args.no_latch)
    result = run_trace(group, events)
    for violation in result.violations:
        sys.stdout.write(json.dumps(violation.to_record()) + "\n")
    for warning in result.warnings:
        sys.stderr.write(f"warning: {warning}\n")
    _emit({"verdict": "ok" if result.ok else "violations",
           "events": result.events_processed,
           "violations": len(result.violations)})
    return 0 if result.ok else 1


# -- registry ----------------------------------------------------------------------

def _cmd_registry_load(args) -> int:
    registry = load_registry_dir(args.directory, strict=_STRICT)
    entries = []
    for entry in sorted(registry.entries(), key=lambda e: e.component_id):
        entries.append({
            "component": entry.component_id,
            "interfaces": list(entry.interfaces),
            "models": [m.id for m in entry.models()],
        })
    _emit({"components": len(registry), "entries": entries})
    return 0


def _cmd_registry_discover(args) -> int:
    registry = load_registry_dir(args.directory, strict=_STRICT)
    t = _load_type(args.need)
    required = t.automaton(_pick_automaton(t, args.automaton, args.need))
    matches = registry.discover(required, Relation(args.relation), Role(args.role))
    _emit({"matches": [
        {"component": m.component_id, "model": m.model_name,
         "automaton": m.automaton_name, "strength": m.strength.value}
        for m in matches
    ]})
    return 0 if matches else 1


# -- canonicalize --------------------------------------------------------------------

def _cmd_canonicalize(args) -> int:
    t = _load_type(args.file)
    automata = tuple((name, canonicalize(automaton)) for name, automaton in t.automata)
    canonical = BehavioralType(id=t.id, automata=automata, regexes=t.regexes,
                               maxtimes=t.maxtimes, meta=t.meta)
    save_type(canonical, args.output)
    _emit({"written": args.output, "automata": len(automata)})
    return 0


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="protomata",
        description="Check, compose, instantiate and monitor behavioral protocol types.")
    parser.add_argument("--lenient", action="store_true",
                        help="warn about unknown input-file fields instead of rejecting")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="pairwise protocol checks")
    check_sub = check.add_subparsers(dest="check_command", required=True)

    p = check_sub.add_parser("equal", help="language equality of two automata")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--automaton", help="automaton name in both files")
    p.add_argument("--compare-location-names", action="store_true",
                   help="location names must match as well")
    p.add_argument("--alphabet",
                   help="comma-separated comparison universe "
                        "(default: union of both alphabets)")
    p.set_defaults(handler=_cmd_check_equal)

    p = check_sub.add_parser("refine", help="trace inclusion after hiding")
    p.add_argument("--abstract", required=True)
    p.add_argument("--concrete", required=True)
    p.add_argument("--shared", help="comma-separated labels kept for comparison "
                                    "(default: the abstract alphabet)")
    p.add_argument("--mode", choices=["tau", "delete"], default="tau",
                   help="how hidden edges disappear (default tau)")
    p.add_argument("--automaton")
    p.set_defaults(handler=_cmd_check_refine)

    p = check_sub.add_parser("compat", help="caller/callee compatibility")
    p.add_argument("--caller", required=True)
    p.add_argument("--callee", required=True)
    p.add_argument("--automaton", help="automaton name in the caller file")
    p.add_argument("--callee-automaton", help="automaton name in the callee file")
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    p.set_defaults(handler=_cmd_check_compat)

    p = sub.add_parser("deadlock", help="find reachable deadlocks of a network")
    p.add_argument("network")
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND,
                   help=f"product-state limit (default {DEFAULT_BOUND})")
    p.set_defaults(handler=_cmd_deadlock)

    p = sub.add_parser("priorities",
                       help="synthesize deadlock-avoiding edge priorities")
    p.add_argument("network")
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    p.set_defaults(handler=_cmd_priorities)

    p = sub.add_parser("select-protocol",
                       help="pick the initial call to use against a peer")
    p.add_argument("--own", required=True)
    p.add_argument("--peer", required=True)
    p.add_argument("--automaton", help="own automaton name")
    p.add_argument("--peer-automaton", help="peer automaton name")
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    p.set_defaults(handler=_cmd_select_protocol)

    p = sub.add_parser("instantiate", help="bind a specification parameter")
    p.add_argument("spec")
    p.add_argument("--param", required=True, metavar="F=v1,v2,...")
    p.add_argument("--scheme", choices=["per-instance", "shared"],
                   default="per-instance")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=_cmd_instantiate)

    monitor = sub.add_parser("monitor", help="generate and run monitors")
    monitor_sub = monitor.add_subparsers(dest="monitor_command", required=True)

    p = monitor_sub.add_parser("gen", help="descriptor from a behavioral type")
    p.add_argument("type")
    p.add_argument("--automaton")
    p.add_argument("--mode", choices=[m.value for m in MonitorMode],
                   default=MonitorMode.BOTH.value)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--emit-source", help="also render monitor source code here")
    p.add_argument("--template", default="fig10")
    p.set_defaults(handler=_cmd_monitor_gen)

    p = monitor_sub.add_parser("run", help="replay a trace against a monitor")
    p.add_argument("monitor")
    p.add_argument("trace")
    p.add_argument("--dispatch", choices=[m.value for m in DispatchMode],
                   default=DispatchMode.SINGLETON.value)
    p.add_argument("--no-latch", action="store_true",
                   help="keep matching events after the first violation")
    p.set_defaults(handler=_cmd_monitor_run)

    registry = sub.add_parser("registry", help="component discovery")
    registry_sub = registry.add_subparsers(dest="registry_command", required=True)

    p = registry_sub.add_parser("load", help="validate and list a registry store")
    p.add_argument("directory")
    p.set_defaults(handler=_cmd_registry_load)

    p = registry_sub.add_parser("discover", help="find matching components")
    p.add_argument("--dir", dest="directory", required=True,
                   help="registry store directory")
    p.add_argument("--need", required=True, help="required behavior (.bt.json)")
    p.add_argument("--relation", choices=[r.value for r in Relation],
                   required=True)
    p.add_argument("--role", choices=[r.value for r in Role],
                   default=Role.AS_CALLER.value,
                   help="which side of a compatibility check the required "
                        "behavior plays (default caller)")
    p.add_argument("--automaton")
    p.set_defaults(handler=_cmd_registry_discover)

    p = sub.add_parser("canonicalize",
                       help="complete+determinize+minimize+normalize a type file")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=_cmd_canonicalize)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    global _STRICT
    _STRICT = not getattr(args, "lenient", False)
    try:
        return args.handler(args)
    except (ProtomataError, FileNotFoundError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
