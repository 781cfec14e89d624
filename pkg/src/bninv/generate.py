"""Graph families for exhaustive and randomized checking."""

from __future__ import annotations

import random
from itertools import combinations, product
from typing import Iterator, List, Optional, Sequence

from .graph import Dag, TopologicalOrdering


def default_labels(n: int) -> List[str]:
    return [f"n{i}" for i in range(n)]


def _acyclic(n: int, pmask: List[int]) -> bool:
    placed = 0
    full = (1 << n) - 1
    while placed != full:
        ready = 0
        for i in range(n):
            if not placed >> i & 1 and pmask[i] & ~placed == 0:
                ready |= 1 << i
        if not ready:
            return False
        placed |= ready
    return True


def all_dags(nodes: Sequence[str]) -> Iterator[Dag]:
    """Every DAG over ``nodes`` (543 for four nodes, 29281 for five)."""
    nodes = list(nodes)
    n = len(nodes)
    pairs = list(combinations(range(n), 2))
    for choice in product((0, 1, 2), repeat=len(pairs)):
        pmask = [0] * n
        edges = []
        for (i, j), c in zip(pairs, choice):
            if c == 1:
                pmask[j] |= 1 << i
                edges.append((nodes[i], nodes[j]))
            elif c == 2:
                pmask[i] |= 1 << j
                edges.append((nodes[j], nodes[i]))
        if _acyclic(n, pmask):
            yield Dag(nodes, edges)


def random_dag(nodes: Sequence[str], rng: random.Random, density: Optional[float] = None) -> Dag:
    """A random DAG: shuffle a ranking, keep each ascending pair with probability ``density``."""
    nodes = list(nodes)
    if density is None:
        density = rng.uniform(0.2, 0.8)
    order = nodes[:]
    rng.shuffle(order)
    edges = [(s, t) for s, t in combinations(order, 2) if rng.random() < density]
    return Dag(nodes, edges)


def random_superdag(g: Dag, rng: random.Random, density: float = 0.5) -> Dag:
    """``g`` plus random extra edges, all consonant with one ordering of ``g``."""
    orderings = list(_sample_orderings(g, rng, 1))
    order = orderings[0].sequence
    extra = [(s, t) for s, t in combinations(order, 2)
             if not g.is_joined(s, t) and rng.random() < density]
    return g.with_edges(extra)


def _sample_orderings(g: Dag, rng: random.Random, k: int):
    """Random consonant orderings (random tie-breaking in Kahn's scheme)."""
    for _ in range(k):
        pm = list(g.parent_masks)
        n = len(g)
        placed = 0
        seq = []
        while len(seq) < n:
            ready = [i for i in range(n) if not placed >> i & 1 and pm[i] & ~placed == 0]
            i = rng.choice(ready)
            seq.append(g.nodes[i])
            placed |= 1 << i
        yield TopologicalOrdering(seq)


def sample_orderings(g: Dag, rng: random.Random, k: int):
    return list(_sample_orderings(g, rng, k))
