"""protomata: behavioral protocol types for components.

Component protocols are finite automata (or regular expressions) over
incoming/outgoing method-call events.  The package checks equality,
refinement, compatibility and deadlock freedom between protocols, synthesizes
edge priorities that steer systems away from deadlocks, instantiates
parameterized specifications, and generates runtime monitors that replay
recorded event traces with per-method time budgets.
"""

from .automata import (BehavioralTypeAutomaton, HideMode, accepts, complete,
                       determinize, hide, minimize, normalize)
from .btypes import BehavioralType, MaxTimeTable
from .compare import (EqualityVerdict, canonicalize, check_equal,
                      check_refines)
from .composition import (CompatibilityVerdict, DeadlockReport, Network,
                          Priority, Product, apply_priorities,
                          check_compatibility, compose, find_deadlocks,
                          product_automaton, select_protocol,
                          synthesize_priorities)
from .errors import (ContractError, IncompatibleProtocolError, ParseError,
                     ProtomataError, StateLimitError, SynthesisUnsat)
from .labels import Direction, Label, inc, neutral, out, parse_label
from .monitor import (DispatchMode, MonitorDescriptor, MonitorGroup,
                      MonitorInstance, MonitorMode, RunResult, Violation,
                      ViolationKind, descriptor_from_json, descriptor_to_json,
                      emit_monitor_source, generate_monitor, run_trace)
from .params import (ParamSpec, instantiate_per_instance, instantiate_shared,
                     substitute)
from .regex import (Alt, Atom, Concat, Epsilon, RegularExpr, Star,
                    parse_regex, regex_to_automaton)
from .registry import (BEHAVIOR_KEY, DiscoverMatch, Registry, RegistryEntry,
                       Relation, Role, load_registry_dir)
from .traceio import (TraceEvent, TraceKind, load_network, load_trace,
                      load_type, parse_trace, parse_type, save_type,
                      serialize_trace, serialize_type)

__version__ = "0.1.0"
