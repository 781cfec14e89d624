"""Minimal inversions of a generative DAG and the two recognition goals.

The inversion procedure starts from the reversed graph, joins co-parents of
the generative graph, then visits nodes from youngest to oldest under the
chosen ordering and joins each node's current parents.  Every added edge is
oriented by the ordering, so the ordering stays consonant throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Tuple

from .errors import PreconditionError
from .graph import DEFAULT_MAX_ORDERINGS, Dag, Edge, TopologicalOrdering
from .inclusion import markov_included


@dataclass(frozen=True)
class InversionStep:
    index: int  # subscript of the graph H_index this step produces
    focus: Optional[str]
    added: Tuple[Edge, ...]

    def line(self) -> str:
        body = ", ".join(f"({s}->{t})" for s, t in self.added) or "()"
        return f"H_{self.index} += {body}"

    def as_dict(self) -> dict:
        return {"step": self.index, "focus": self.focus, "added": [list(e) for e in self.added]}


@dataclass(frozen=True)
class InversionTrace:
    ordering: TopologicalOrdering
    steps: Tuple[InversionStep, ...]
    final: Dag
    single_root: bool

    @property
    def added_edges(self) -> Tuple[Edge, ...]:
        """Edges beyond the reversed graph, in the order they were added."""
        return tuple(e for step in self.steps if step.index >= 0 for e in step.added)

    @property
    def note(self) -> str:
        if self.single_root:
            return "single root: result is contained in every inclusive graph with this ordering that contains the reversed graph"
        return ("several roots: result is perfect and moral-covering, hence inclusive; "
                "it can contain edges that some inclusive graph with this ordering omits")


def minimal_inversion(g: Dag, ordering: Optional[TopologicalOrdering] = None) -> Tuple[Dag, InversionTrace]:
    """Run the inversion procedure for ``g`` under ``ordering``.

    ``ordering`` must be consonant with the reversed graph; by default the
    canonical ordering of the reversed graph is used.
    """
    star = g.reverse()
    if ordering is None:
        ordering = star.topological_ordering()
    if not ordering.consonant_with(star):
        raise PreconditionError(f"ordering {ordering} is not consonant with the reversed graph")
    rank = ordering.rank
    parents: Dict[str, set] = {s: set(star.parents(s)) for s in g.nodes}
    edges = set(star.edges)

    def join(nodes: Iterable[str]) -> Tuple[Edge, ...]:
        added = []
        for s, t in combinations(sorted(nodes, key=rank), 2):
            if (s, t) not in edges and (t, s) not in edges:
                edges.add((s, t))
                parents[t].add(s)
                added.append((s, t))
        return tuple(added)

    steps = [InversionStep(-1, None, tuple(sorted(star.edges, key=lambda e: (rank(e[0]), rank(e[1])))))]
    coparents: List[Edge] = []
    for s in g.nodes:
        coparents.extend(join(g.parents(s)))
    steps.append(InversionStep(0, None, tuple(sorted(coparents, key=lambda e: (rank(e[0]), rank(e[1]))))))
    seq = ordering.sequence
    n = len(seq)
    # the oldest node has no parents, so its step (which would produce H_n) adds nothing
    for i in range(n - 1):
        focus = seq[n - 1 - i]
        steps.append(InversionStep(i + 1, focus, join(parents[focus])))
    final = Dag(g.nodes, edges)
    return final, InversionTrace(ordering, tuple(steps), final, len(g.roots()) == 1)


@dataclass(frozen=True)
class Inversion:
    graph: Dag
    orderings: Tuple[TopologicalOrdering, ...]


def all_minimal_inversions(g: Dag, max_orderings: int = DEFAULT_MAX_ORDERINGS) -> List[Inversion]:
    """One inversion per ordering of the reversed graph, duplicates merged in first-seen order."""
    found: Dict[Dag, List[TopologicalOrdering]] = {}
    for o in g.reverse().all_topological_orderings(max_orderings):
        h, _ = minimal_inversion(g, o)
        found.setdefault(h, []).append(o)
    return [Inversion(h, tuple(os)) for h, os in found.items()]


# --- goal conversions ----------------------------------------------------


def complete_leaves(g: Dag, gp: Dag, ordering: TopologicalOrdering) -> Dag:
    """``gp`` with the leaves of ``g`` pairwise joined, oriented by ``ordering``."""
    leaves = sorted(g.leaves(), key=ordering.rank)
    return gp.with_edges(combinations(leaves, 2)) if len(leaves) > 1 else gp


def goal2_from_goal1(g: Dag, gp: Dag, ordering: Optional[TopologicalOrdering] = None) -> Dag:
    """Turn a leaves-as-roots recognition graph into one that includes ``g``'s distributions."""
    if ordering is None:
        ordering = gp.topological_ordering()
    if not ordering.consonant_with(gp):
        raise PreconditionError(f"ordering {ordering} is not consonant with the recognition graph")
    stray = g.leaves() - gp.roots()
    if stray:
        s = g.ordered(stray)[0]
        raise PreconditionError(f"leaf {s} of the generative graph has parents in the recognition graph")
    return complete_leaves(g, gp, ordering)


def check_leaf_parents(g: Dag, gp: Dag) -> None:
    """Raise unless every ``gp`` parent of a leaf of ``g`` is itself a leaf of ``g``."""
    leaves = g.leaves()
    for t in g.ordered(leaves):
        for s in gp.ordered(gp.parents(t)):
            if s not in leaves:
                raise PreconditionError(f"edge {s}->{t} gives leaf {t} a parent that is not a leaf")


def goal1_from_goal2(g: Dag, gp: Dag) -> Dag:
    """Drop every ``gp`` edge between two leaves of ``g``."""
    check_leaf_parents(g, gp)
    leaves = g.leaves()
    return gp.without_edges((s, t) for s, t in gp.edges if s in leaves and t in leaves)


def verify_goal1(g: Dag, gp: Dag) -> bool:
    if set(g.nodes) != set(gp.nodes):
        return False
    if not g.leaves() <= gp.roots():
        return False
    return markov_included(g, goal2_from_goal1(g, gp)).verdict
