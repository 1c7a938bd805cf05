"""Runtime monitors generated from behavioral types.

A monitor descriptor is the executable form of one automaton: a deterministic
transition table keyed by method name plus the per-method time budgets.
Instances replay recorded call-start/call-end events; a protocol violation or
an exceeded time budget latches the instance (optionally disabled, in which
case the state simply does not advance on rejected events).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from .automata import BehavioralTypeAutomaton, edge_sort_key, determinize
from .btypes import BehavioralType, MaxTimeTable
from .errors import ContractError, ParseError
from .labels import Direction, Label


class MonitorMode(Enum):
    INC_ONLY = "INC_ONLY"
    OUT_ONLY = "OUT_ONLY"
    BOTH = "BOTH"


class DispatchMode(Enum):
    SINGLETON = "singleton"
    PER_OBJECT = "per-object"


class ViolationKind(Enum):
    PROTOCOL = "PROTOCOL"
    TIMEOUT = "TIMEOUT"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    method: str
    state_at_failure: str
    detail: str
    event_index: int | None = None
    object_id: str | None = None
    elapsed_millis: int | None = None
    limit_millis: int | None = None

    def to_record(self) -> dict:
        record = {
            "kind": self.kind.value,
            "event_index": self.event_index,
            "method": self.method,
            "state": self.state_at_failure,
            "detail": self.detail,
        }
        if self.object_id is not None:
            record["object_id"] = self.object_id
        return record


@dataclass(frozen=True)
class MonitorDescriptor:
    name: str
    locations: tuple[str, ...]
    initial: str
    transitions: Mapping[tuple[str, str], str]
    maxtimes: MaxTimeTable = field(default_factory=MaxTimeTable)
    mode: MonitorMode = MonitorMode.BOTH

    def __post_init__(self) -> None:
        object.__setattr__(self, "locations", tuple(self.locations))
        object.__setattr__(self, "transitions", dict(self.transitions))
        declared = set(self.locations)
        if self.initial not in declared:
            raise ContractError(f"initial location {self.initial!r} not declared")
        for (src, event), dst in self.transitions.items():
            if src not in declared or dst not in declared:
                raise ContractError(
                    f"transition ({src},{event})->{dst} uses undeclared locations")

    def next_state(self, state: str, event: str) -> str | None:
        return self.transitions.get((state, event))


def _mode_filter(label: Label, mode: MonitorMode) -> bool:
    if mode is MonitorMode.INC_ONLY:
        return label.direction in (Direction.INC, Direction.NEUTRAL)
    if mode is MonitorMode.OUT_ONLY:
        return label.direction in (Direction.OUT, Direction.NEUTRAL)
    return True


def generate_monitor(t: BehavioralType, automaton_name: str,
                     mode: MonitorMode = MonitorMode.BOTH) -> MonitorDescriptor:
    """Turn a named automaton of the type into a monitor descriptor.

    Nondeterministic automata are determinized first; the table keys are bare
    method names, so a location offering the same name in both directions
    under BOTH mode is rejected.
    """
    automaton = t.automaton(automaton_name)
    if not automaton.is_deterministic():
        automaton = determinize(automaton)
    transitions: dict[tuple[str, str], str] = {}
    for src, label, dst in sorted(automaton.edges, key=edge_sort_key):
        if not _mode_filter(label, mode):
            continue
        key = (src, label.name)
        if key in transitions and transitions[key] != dst:
            raise ContractError(
                f"method {label.name!r} is ambiguous at {src!r} once directions "
                f"are stripped; monitor with a single-direction mode")
        transitions[key] = dst
    order = _discovery_order(automaton)
    return MonitorDescriptor(
        name=f"{t.id}_{automaton_name}_mon",
        locations=tuple(order),
        initial=automaton.initial,
        transitions=transitions,
        maxtimes=t.maxtimes,
        mode=mode,
    )


def _discovery_order(automaton: BehavioralTypeAutomaton) -> list[str]:
    seen = {automaton.initial}
    order = [automaton.initial]
    queue = deque([automaton.initial])
    while queue:
        loc = queue.popleft()
        for _, _, dst in automaton.edges_from(loc):
            if dst not in seen:
                seen.add(dst)
                order.append(dst)
                queue.append(dst)
    order.extend(sorted(automaton.locations - seen))
    return order


# -- live monitor instances --------------------------------------------------

class MonitorInstance:
    """Single-writer monitor state over one event stream."""

    def __init__(self, descriptor: MonitorDescriptor, latching: bool = True,
                 object_id: str | None = None):
        self.descriptor = descriptor
        self.state = descriptor.initial
        self.pending: dict[str, tuple[str, int]] = {}
        self.violation: Violation | None = None  # first failure, latch anchor
        self.last_rejection: Violation | None = None
        self.latching = latching
        self.object_id = object_id

    @property
    def latched(self) -> bool:
        return self.latching and self.violation is not None

    def _record(self, violation: Violation) -> None:
        self.last_rejection = violation
        if self.violation is None:
            self.violation = violation

    def step(self, event: str, event_index: int | None = None) -> bool:
        """Advance on an event name; False latches a PROTOCOL violation."""
        if self.latched:
            raise ContractError("cannot step a latched monitor")
        nxt = self.descriptor.next_state(self.state, event)
        if nxt is None:
            self._record(Violation(
                kind=ViolationKind.PROTOCOL,
                method=event,
                state_at_failure=self.state,
                detail=f"event {event!r} is not allowed in state {self.state!r}",
                event_index=event_index,
                object_id=self.object_id,
            ))
            return False
        self.state = nxt
        return True

    def on_call_start(self, call_id: str, method: str, timestamp_millis: int,
                      event_index: int | None = None) -> bool:
        if call_id in self.pending:
            raise ContractError(f"call id {call_id!r} is already pending")
        verdict = self.step(method, event_index)
        self.pending[call_id] = (method, timestamp_millis)
        return verdict

    def on_call_end(self, call_id: str, timestamp_millis: int,
                    event_index: int | None = None) -> bool:
        if self.latched:
            raise ContractError("cannot step a latched monitor")
        if call_id not in self.pending:
            raise ContractError(f"call id {call_id!r} has no pending start")
        method, started = self.pending.pop(call_id)
        limit = self.descriptor.maxtimes.limit(method)
        elapsed = timestamp_millis - started
        if limit is not None and elapsed > limit:
            self._record(Violation(
                kind=ViolationKind.TIMEOUT,
                method=method,
                state_at_failure=self.state,
                detail=f"{method} took {elapsed} ms, budget is {limit} ms",
                event_index=event_index,
                object_id=self.object_id,
                elapsed_millis=elapsed,
                limit_millis=limit,
            ))
            return False
        return True


class MonitorGroup:
    """Routes events to one shared instance or to per-object instances.

    Per-object instances are created lazily: an object's first event
    constructs its monitor and is stepped through it, so any event enabled at
    the initial location acts as the constructor.  A first event the initial
    location rejects is a protocol violation attributed to that object.
    """

    def __init__(self, descriptor: MonitorDescriptor,
                 dispatch: DispatchMode = DispatchMode.SINGLETON,
                 latching: bool = True):
        self.descriptor = descriptor
        self.dispatch = dispatch
        self.latching = latching
        self.instances: dict[str | None, MonitorInstance] = {}

    def _key(self, object_id: str | None, component: str | None) -> str | None:
        if self.dispatch is DispatchMode.SINGLETON:
            return None
        return object_id if object_id is not None else component

    def instance_for(self, object_id: str | None,
                     component: str | None = None) -> MonitorInstance:
        key = self._key(object_id, component)
        if key not in self.instances:
            self.instances[key] = MonitorInstance(
                self.descriptor, latching=self.latching,
                object_id=key if self.dispatch is DispatchMode.PER_OBJECT else None)
        return self.instances[key]


# -- monitor source emission --------------------------------------------------

def _emit_java_class(d: MonitorDescriptor) -> str:
    """Java class with a maxtimes map filled by the constructor, a location
    enumeration, and a boolean nextState dispatch."""
    lines = [
        "package monitors;",
        "",
        "import java.util.HashMap;",
        "import java.util.Map;",
        "",
        f"public class {d.name} {{",
        "",
        "   public Map<String,Long> maxtimes = new HashMap<String,Long>();",
        "",
        f"   public {d.name}() {{",
    ]
    for method in sorted(d.maxtimes.entries):
        millis = d.maxtimes.entries[method]
        lines.append(f'      maxtimes.put("{method}",new Long({millis}));')
    lines += [
        "   }",
        "",
        "   public static enum LOCATION {",
        "     " + " , ".join(d.locations),
        "   }",
        "",
        f"   protected LOCATION state = LOCATION.{d.initial};",
        "",
        "   public boolean nextState(String event) {",
        "      boolean rval = false;",
        "      switch (state) {",
    ]
    for loc in d.locations:
        lines.append(f"         case {loc}:")
        for (src, event), dst in sorted(d.transitions.items()):
            if src != loc:
                continue
            lines += [
                f'            if (event.equals("{event}")) {{',
                f"               state = LOCATION.{dst};",
                "               rval = true;",
                "            }",
            ]
        lines.append("            break;")
    lines += [
        "      }",
        "      return rval;",
        "   }",
        "}",
        "",
    ]
    return "\n".join(lines)


TEMPLATES = {
    "fig10": _emit_java_class,
}


def emit_monitor_source(d: MonitorDescriptor, template: str = "fig10") -> str:
    try:
        renderer = TEMPLATES[template]
    except KeyError:
        raise ContractError(
            f"unknown template {template!r}; known: {sorted(TEMPLATES)}") from None
    return renderer(d)


# -- descriptor file format (.mon.json) ---------------------------------------

def descriptor_to_json(d: MonitorDescriptor) -> str:
    payload = {
        "name": d.name,
        "mode": d.mode.value,
        "locations": list(d.locations),
        "initial": d.initial,
        "transitions": [[src, event, dst]
                        for (src, event), dst in sorted(d.transitions.items())],
        "maxtimes": {m: d.maxtimes.entries[m] for m in sorted(d.maxtimes.entries)},
    }
    return json.dumps(payload, indent=2) + "\n"


def descriptor_from_json(text: str) -> MonitorDescriptor:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad monitor descriptor: {exc.msg}",
                         line=exc.lineno, column=exc.colno) from None
    required = {"name", "mode", "locations", "initial", "transitions", "maxtimes"}
    missing = required - set(payload)
    if missing:
        raise ParseError(f"monitor descriptor misses fields: {sorted(missing)}")
    unknown = set(payload) - required
    if unknown:
        raise ParseError(f"monitor descriptor has unknown fields: {sorted(unknown)}")
    transitions = {}
    for entry in payload["transitions"]:
        if not (isinstance(entry, list) and len(entry) == 3):
            raise ParseError(f"bad transition entry {entry!r}")
        src, event, dst = entry
        transitions[(src, event)] = dst
    try:
        mode = MonitorMode(payload["mode"])
    except ValueError:
        raise ParseError(f"unknown monitor mode {payload['mode']!r}") from None
    return MonitorDescriptor(
        name=payload["name"],
        locations=tuple(payload["locations"]),
        initial=payload["initial"],
        transitions=transitions,
        maxtimes=MaxTimeTable(payload["maxtimes"]),
        mode=mode,
    )


# -- trace replay --------------------------------------------------------------

@dataclass(frozen=True)
class RunResult:
    violations: tuple[Violation, ...]
    warnings: tuple[str, ...]
    events_processed: int

    @property
    def ok(self) -> bool:
        return not self.violations


def run_trace(group: MonitorGroup, events) -> RunResult:
    """Replay recorded call events through a monitor group.

    Latched instances ignore their remaining events so one violation is
    reported per instance; without latching every rejected event is reported.
    Calls left open when the trace ends are warnings, not violations.
    """
    from .traceio import TraceKind  # local import keeps module deps one-way

    violations: list[Violation] = []
    processed = 0
    for index, event in enumerate(events):
        processed += 1
        instance = group.instance_for(event.object_id, event.component)
        if instance.latched:
            continue
        instance.last_rejection = None
        try:
            if event.kind is TraceKind.CALL_START:
                instance.on_call_start(event.call_id, event.method,
                                       event.timestamp_millis, index)
            else:
                instance.on_call_end(event.call_id, event.timestamp_millis, index)
        except ContractError as exc:
            raise ContractError(f"event {index}: {exc}") from None
        if instance.last_rejection is not None:
            violations.append(instance.last_rejection)
    warnings = []
    for key, instance in sorted(group.instances.items(), key=lambda kv: str(kv[0])):
        for call_id, (method, started) in sorted(instance.pending.items()):
            who = f" of {key}" if key is not None else ""
            warnings.append(
                f"call {call_id!r} ({method}{who}) started at {started} ms "
                f"never finished")
    return RunResult(tuple(violations), tuple(warnings), events_processed=processed)
