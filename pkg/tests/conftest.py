from __future__ import annotations

import random
from pathlib import Path

import pytest
from hypothesis import settings

from protomata.automata import BehavioralTypeAutomaton
from protomata.labels import Direction, Label

settings.register_profile("corpus", deadline=None, derandomize=True)
settings.load_profile("corpus")

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


@pytest.fixture(scope="session")
def corpus() -> Path:
    return CORPUS


NAME_POOL = ("alpha", "beta", "gamma", "delta")


def random_automaton(rng: random.Random, max_locations: int = 5,
                     max_labels: int = 4,
                     directions: tuple[Direction, ...] = (Direction.NEUTRAL,),
                     deterministic: bool = False) -> BehavioralTypeAutomaton:
    """Small random automaton; the alphabet is whatever ends up on edges."""
    n = rng.randint(1, max_locations)
    locations = [f"l{i}" for i in range(n)]
    k = rng.randint(1, max_labels)
    labels = [Label(rng.choice(directions), NAME_POOL[i]) for i in range(k)]
    edge_count = rng.randint(0, 2 * n)
    edges = set()
    for _ in range(edge_count):
        edges.add((rng.choice(locations), rng.choice(labels), rng.choice(locations)))
    if deterministic:
        seen = set()
        pruned = set()
        for edge in sorted(edges, key=lambda e: (e[0], str(e[1]), e[2])):
            if (edge[0], edge[1]) not in seen:
                seen.add((edge[0], edge[1]))
                pruned.add(edge)
        edges = pruned
    return BehavioralTypeAutomaton(
        alphabet=frozenset(l for _, l, _ in edges),
        locations=frozenset(locations),
        initial="l0",
        edges=frozenset(edges),
    )


def reachable_restriction(a: BehavioralTypeAutomaton) -> BehavioralTypeAutomaton:
    live = a.reachable_locations()
    edges = frozenset(e for e in a.edges if e[0] in live)
    return BehavioralTypeAutomaton(
        alphabet=frozenset(l for _, l, _ in edges),
        locations=frozenset(live),
        initial=a.initial,
        edges=edges,
    )
