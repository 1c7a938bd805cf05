"""Parsing and serialization of event traces (.jsonl), behavioral type files
(.bt.json) and network files (.net.json)."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable

from .automata import BehavioralTypeAutomaton, edge_sort_key
from .btypes import BehavioralType, MaxTimeTable
from .composition import Network
from .errors import ContractError, ParseError
from .labels import Direction, Label, parse_label
from .regex import RegularExpr, parse_regex


class TraceKind(Enum):
    CALL_START = "CALL_START"
    CALL_END = "CALL_END"


@dataclass(frozen=True)
class TraceEvent:
    seq: int
    kind: TraceKind
    component: str
    method: str
    call_id: str
    timestamp_millis: int
    object_id: str | None = None

    def __post_init__(self) -> None:
        if self.timestamp_millis < 0:
            raise ContractError("timestamps must be non-negative")


_TRACE_FIELDS = {"seq", "kind", "component", "method", "call_id",
                 "timestamp_millis", "object_id"}
_TRACE_REQUIRED = _TRACE_FIELDS - {"object_id"}


def parse_trace(text: str, strict: bool = True) -> list[TraceEvent]:
    """Newline-delimited JSON records; validates ordering and start/end
    pairing with line-precise diagnostics."""
    events: list[TraceEvent] = []
    open_calls: set[str] = set()
    last_seq: int | None = None
    last_ts: int | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad trace record: {exc.msg}",
                             line=lineno, column=exc.colno) from None
        if not isinstance(record, dict):
            raise ParseError("trace record must be a JSON object", line=lineno)
        missing = _TRACE_REQUIRED - set(record)
        if missing:
            raise ParseError(f"trace record misses fields: {sorted(missing)}",
                             line=lineno)
        unknown = set(record) - _TRACE_FIELDS
        if unknown:
            if strict:
                raise ParseError(f"unknown trace fields: {sorted(unknown)}",
                                 line=lineno)
            warnings.warn(f"line {lineno}: ignoring unknown trace fields "
                          f"{sorted(unknown)}")
        try:
            kind = TraceKind(record["kind"])
        except ValueError:
            raise ParseError(f"unknown event kind {record['kind']!r}",
                             line=lineno) from None
        try:
            event = TraceEvent(
                seq=int(record["seq"]),
                kind=kind,
                component=str(record["component"]),
                method=str(record["method"]),
                call_id=str(record["call_id"]),
                timestamp_millis=int(record["timestamp_millis"]),
                object_id=None if record.get("object_id") is None
                else str(record["object_id"]),
            )
        except (ContractError, ValueError) as exc:
            raise ParseError(f"bad trace record: {exc}", line=lineno) from None
        if last_seq is not None and event.seq <= last_seq:
            raise ParseError(
                f"seq {event.seq} does not increase over {last_seq}", line=lineno)
        if last_ts is not None and event.timestamp_millis < last_ts:
            raise ParseError(
                f"timestamp {event.timestamp_millis} decreases below {last_ts}",
                line=lineno)
        if event.kind is TraceKind.CALL_START:
            if event.call_id in open_calls:
                raise ParseError(f"call id {event.call_id!r} started twice",
                                 line=lineno)
            open_calls.add(event.call_id)
        else:
            if event.call_id not in open_calls:
                raise ParseError(
                    f"call id {event.call_id!r} ends without a start", line=lineno)
            open_calls.discard(event.call_id)
        last_seq, last_ts = event.seq, event.timestamp_millis
        events.append(event)
    return events


def serialize_trace(events: Iterable[TraceEvent]) -> str:
    lines = []
    for e in events:
        record = {
            "seq": e.seq,
            "kind": e.kind.value,
            "component": e.component,
            "method": e.method,
            "call_id": e.call_id,
            "timestamp_millis": e.timestamp_millis,
        }
        if e.object_id is not None:
            record["object_id"] = e.object_id
        lines.append(json.dumps(record, separators=(", ", ": ")))
    return "\n".join(lines) + ("\n" if lines else "")


# -- behavioral type files (.bt.json) -----------------------------------------

_TYPE_FIELDS = {"id", "automata", "regexes", "maxtimes", "meta"}
_AUTOMATON_FIELDS = {"name", "alphabet", "locations", "initial", "edges",
                     "error_location", "param_locations"}


def _pointer_error(message: str, pointer: str) -> ParseError:
    return ParseError(message, pointer=pointer)


def _parse_alphabet_entry(entry: dict, pointer: str) -> Label:
    if not isinstance(entry, dict) or "name" not in entry or "dir" not in entry:
        raise _pointer_error("alphabet entries need 'dir' and 'name'", pointer)
    unknown = set(entry) - {"dir", "name", "param"}
    if unknown:
        raise _pointer_error(f"unknown alphabet fields: {sorted(unknown)}", pointer)
    try:
        direction = Direction(entry["dir"])
    except ValueError:
        raise _pointer_error(f"unknown direction {entry['dir']!r}", pointer) from None
    try:
        return Label(direction, entry["name"], entry.get("param"))
    except ContractError as exc:
        raise _pointer_error(str(exc), pointer) from None


def _parse_automaton(payload: dict, pointer: str, strict: bool
                     ) -> tuple[str, BehavioralTypeAutomaton, frozenset[str]]:
    if not isinstance(payload, dict):
        raise _pointer_error("automaton must be a JSON object", pointer)
    missing = {"name", "alphabet", "locations", "initial", "edges"} - set(payload)
    if missing:
        raise _pointer_error(f"automaton misses fields: {sorted(missing)}", pointer)
    unknown = set(payload) - _AUTOMATON_FIELDS
    if unknown:
        if strict:
            raise _pointer_error(f"unknown automaton fields: {sorted(unknown)}",
                                 pointer)
        warnings.warn(f"{pointer}: ignoring unknown automaton fields "
                      f"{sorted(unknown)}")
    alphabet = [
        _parse_alphabet_entry(entry, f"{pointer}/alphabet/{i}")
        for i, entry in enumerate(payload["alphabet"])
    ]
    edges = []
    for i, entry in enumerate(payload["edges"]):
        if not (isinstance(entry, list) and len(entry) == 3):
            raise _pointer_error(f"edge must be [src, label, dst], got {entry!r}",
                                 f"{pointer}/edges/{i}")
        src, label_text, dst = entry
        try:
            label = parse_label(label_text)
        except ParseError as exc:
            raise _pointer_error(str(exc), f"{pointer}/edges/{i}") from None
        edges.append((src, label, dst))
    try:
        automaton = BehavioralTypeAutomaton(
            alphabet=frozenset(alphabet),
            locations=frozenset(payload["locations"]),
            initial=payload["initial"],
            edges=frozenset(edges),
            error_location=payload.get("error_location"),
        )
    except ContractError as exc:
        raise _pointer_error(f"automaton {payload['name']!r}: {exc}", pointer) from None
    param_locations = frozenset(payload.get("param_locations", ()))
    return payload["name"], automaton, param_locations


def parse_type(text: str, strict: bool = True) -> BehavioralType:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad type file: {exc.msg}",
                         line=exc.lineno, column=exc.colno) from None
    if not isinstance(payload, dict):
        raise ParseError("type file must be a JSON object")
    if "id" not in payload:
        raise ParseError("type file misses the 'id' field")
    unknown = set(payload) - _TYPE_FIELDS
    if unknown:
        if strict:
            raise ParseError(f"unknown type fields: {sorted(unknown)}")
        warnings.warn(f"ignoring unknown type fields {sorted(unknown)}")
    automata: list[tuple[str, BehavioralTypeAutomaton]] = []
    param_locations: dict[str, frozenset[str]] = {}
    for i, entry in enumerate(payload.get("automata", [])):
        name, automaton, plocs = _parse_automaton(entry, f"/automata/{i}", strict)
        automata.append((name, automaton))
        if plocs:
            param_locations[name] = plocs
    regexes: list[tuple[str, RegularExpr]] = []
    for i, entry in enumerate(payload.get("regexes", [])):
        if not isinstance(entry, dict) or "name" not in entry or "expr" not in entry:
            raise _pointer_error("regex entries need 'name' and 'expr'",
                                 f"/regexes/{i}")
        try:
            regexes.append((entry["name"], parse_regex(entry["expr"])))
        except ParseError as exc:
            raise _pointer_error(str(exc), f"/regexes/{i}") from None
    try:
        return BehavioralType(
            id=payload["id"],
            automata=tuple(automata),
            regexes=tuple(regexes),
            maxtimes=MaxTimeTable(payload.get("maxtimes", {})),
            meta=payload.get("meta", {}),
            param_locations=param_locations,
        )
    except ContractError as exc:
        raise ParseError(f"invalid behavioral type: {exc}") from None


def _automaton_payload(name: str, a: BehavioralTypeAutomaton,
                       param_locations: frozenset[str]) -> dict:
    payload: dict = {
        "name": name,
        "alphabet": [
            {"dir": l.direction.value, "name": l.name,
             **({"param": l.parameter} if l.parameter is not None else {})}
            for l in sorted(a.alphabet, key=Label.sort_key)
        ],
        "locations": sorted(a.locations),
        "initial": a.initial,
        "edges": [[src, str(label), dst]
                  for src, label, dst in sorted(a.edges, key=edge_sort_key)],
    }
    if a.error_location is not None:
        payload["error_location"] = a.error_location
    if param_locations:
        payload["param_locations"] = sorted(param_locations)
    return payload


def serialize_type(t: BehavioralType) -> str:
    payload = {
        "id": t.id,
        "automata": [
            _automaton_payload(name, automaton,
                               t.param_locations.get(name, frozenset()))
            for name, automaton in t.automata
        ],
        "regexes": [{"name": name, "expr": str(expr)} for name, expr in t.regexes],
        "maxtimes": {m: t.maxtimes.entries[m] for m in sorted(t.maxtimes.entries)},
        "meta": {k: t.meta[k] for k in sorted(t.meta)},
    }
    return json.dumps(payload, indent=2) + "\n"


def load_type(path: str | Path, strict: bool = True) -> BehavioralType:
    return parse_type(Path(path).read_text(encoding="utf-8"), strict=strict)


def save_type(t: BehavioralType, path: str | Path) -> None:
    Path(path).write_text(serialize_type(t), encoding="utf-8")


def load_trace(path: str | Path, strict: bool = True) -> list[TraceEvent]:
    return parse_trace(Path(path).read_text(encoding="utf-8"), strict=strict)


# -- network files (.net.json) -------------------------------------------------

def load_network(path: str | Path, strict: bool = True) -> Network:
    """Network file: {"components": [{id, type_file, automaton_name}]} with
    type files resolved relative to the network file."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad network file: {exc.msg}",
                         line=exc.lineno, column=exc.colno) from None
    if not isinstance(payload, dict) or "components" not in payload:
        raise ParseError("network file needs a 'components' list")
    unknown = set(payload) - {"components"}
    if unknown and strict:
        raise ParseError(f"unknown network fields: {sorted(unknown)}")
    components = []
    for i, entry in enumerate(payload["components"]):
        missing = {"id", "type_file", "automaton_name"} - set(entry)
        if missing:
            raise _pointer_error(f"component misses fields: {sorted(missing)}",
                                 f"/components/{i}")
        behavioral_type = load_type(path.parent / entry["type_file"], strict=strict)
        components.append((entry["id"],
                           behavioral_type.automaton(entry["automaton_name"])))
    return Network(tuple(components))
