"""In-process component registry: behavioral models are registered under the
"BEHAVIOR" property key and discovered by behavioral relation."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping

from .automata import BehavioralTypeAutomaton
from .btypes import BehavioralType
from .compare import check_equal, check_refines
from .composition import check_compatibility
from .errors import ContractError, ParseError

BEHAVIOR_KEY = "BEHAVIOR"


@dataclass(frozen=True)
class RegistryEntry:
    component_id: str
    interfaces: tuple[str, ...] = ()
    properties: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "interfaces", tuple(self.interfaces))
        object.__setattr__(self, "properties", dict(self.properties))
        if not self.component_id:
            raise ContractError("component id must be non-empty")
        behavior = self.properties.get(BEHAVIOR_KEY)
        if behavior is not None:
            if not isinstance(behavior, (list, tuple)) or not behavior:
                raise ContractError(
                    f"{BEHAVIOR_KEY} must be a non-empty list of behavioral types")
            for model in behavior:
                if not isinstance(model, BehavioralType):
                    raise ContractError(
                        f"{BEHAVIOR_KEY} holds a non-behavioral value: {model!r}")

    def models(self) -> tuple[BehavioralType, ...]:
        return tuple(self.properties.get(BEHAVIOR_KEY, ()))


class Relation(Enum):
    EQUAL = "equal"
    REFINES = "refines"
    COMPATIBLE = "compatible"


class Role(Enum):
    AS_CALLER = "caller"
    AS_CALLEE = "callee"


_STRENGTH_RANK = {Relation.EQUAL: 0, Relation.REFINES: 1, Relation.COMPATIBLE: 2}


@dataclass(frozen=True)
class DiscoverMatch:
    component_id: str
    model_name: str
    strength: Relation
    automaton_name: str

    def sort_key(self):
        return (_STRENGTH_RANK[self.strength], self.component_id, self.model_name)


class Registry:
    """Concurrent readers, exclusive writers; discovery works on a snapshot."""

    def __init__(self) -> None:
        self._entries: dict[str, RegistryEntry] = {}
        self._lock = threading.RLock()

    def register(self, entry: RegistryEntry) -> None:
        """Re-registering a component id replaces the previous entry."""
        with self._lock:
            self._entries[entry.component_id] = entry

    def unregister(self, component_id: str) -> None:
        with self._lock:
            self._entries.pop(component_id, None)

    def entries(self) -> list[RegistryEntry]:
        with self._lock:
            return list(self._entries.values())

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def __contains__(self, component_id: str) -> bool:
        with self._lock:
            return component_id in self._entries

    def entry(self, component_id: str) -> RegistryEntry:
        with self._lock:
            if component_id not in self._entries:
                raise ContractError(f"no component {component_id!r} registered")
            return self._entries[component_id]

    # -- discovery ---------------------------------------------------------

    def discover(self, required: BehavioralTypeAutomaton, relation: Relation,
                 role: Role = Role.AS_CALLER) -> list[DiscoverMatch]:
        """Components whose registered behavior stands in the requested
        relation to the required automaton, strongest matches first."""
        snapshot = self.entries()
        matches: list[DiscoverMatch] = []
        for entry in snapshot:
            for model in entry.models():
                hit = _match_model(required, model, relation, role)
                if hit is not None:
                    matches.append(DiscoverMatch(
                        component_id=entry.component_id,
                        model_name=model.id,
                        strength=hit[0],
                        automaton_name=hit[1]))
        return sorted(matches, key=DiscoverMatch.sort_key)


def _holds(required: BehavioralTypeAutomaton, candidate: BehavioralTypeAutomaton,
           relation: Relation, role: Role) -> bool:
    if relation is Relation.EQUAL:
        return check_equal(required, candidate).equal
    if relation is Relation.REFINES:
        # the required automaton is the abstract side; compare over its alphabet
        return check_refines(candidate, required, required.alphabet).equal
    if role is Role.AS_CALLER:
        return check_compatibility(required, candidate).compatible
    return check_compatibility(candidate, required).compatible


def _match_model(required: BehavioralTypeAutomaton, model: BehavioralType,
                 relation: Relation, role: Role) -> tuple[Relation, str] | None:
    """Strongest relation any automaton of the model satisfies, provided the
    requested relation holds for at least one of them."""
    satisfied: dict[str, Relation] = {}
    for name, automaton in model.automata:
        for strength in (Relation.EQUAL, Relation.REFINES, Relation.COMPATIBLE):
            if _holds(required, automaton, strength, role):
                satisfied[name] = strength
                break
    requested = [name for name, _ in model.automata
                 if name in satisfied
                 and _holds(required, model.automaton(name), relation, role)]
    if not requested:
        return None
    best = min(requested, key=lambda n: (_STRENGTH_RANK[satisfied[n]], n))
    return satisfied[best], best


# -- persistence ---------------------------------------------------------------

def load_registry_dir(path: str | Path, strict: bool = True) -> Registry:
    """Directory layout: <component_id>/entry.json plus one .bt.json per
    behavioral model, named by the model id."""
    import json

    from .traceio import load_type

    root = Path(path)
    if not root.is_dir():
        raise ContractError(f"registry directory {root} does not exist")
    registry = Registry()
    for component_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        entry_file = component_dir / "entry.json"
        interfaces: tuple[str, ...] = ()
        meta: dict = {}
        if entry_file.exists():
            try:
                payload = json.loads(entry_file.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad entry file {entry_file}: {exc.msg}",
                                 line=exc.lineno) from None
            interfaces = tuple(payload.get("interfaces", ()))
            meta = payload.get("meta", {})
        models = []
        for model_file in sorted(component_dir.glob("*.bt.json")):
            model = load_type(model_file, strict=strict)
            expected = model_file.name[:-len(".bt.json")]
            if model.id != expected:
                raise ParseError(
                    f"model id {model.id!r} does not match file name",
                    pointer=str(model_file))
            models.append(model)
        properties: dict[str, object] = {"meta": meta}
        if models:
            properties[BEHAVIOR_KEY] = models
        registry.register(RegistryEntry(
            component_id=component_dir.name,
            interfaces=interfaces,
            properties=properties))
    return registry
