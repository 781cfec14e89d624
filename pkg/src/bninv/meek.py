"""Single-edge operations: covered reversal, removal and addition.

A sequence of covered reversals and removals leading from ``gp`` to ``g``
certifies that ``gp`` represents every distribution of ``g``.  The searches
here are breadth-first with operations tried in a fixed order (removals
before reversals before additions, then canonical edge order), so the
sequence returned is the least one among those of minimal length.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Tuple

from .errors import BninvError, PreconditionError
from .graph import Dag, Edge
from .inclusion import markov_included

REVERSAL = "covered_reversal"
REMOVAL = "removal"
ADDITION = "addition"
_KIND_RANK = {REMOVAL: 0, REVERSAL: 1, ADDITION: 2}
_VERB = {REMOVAL: "remove", REVERSAL: "reverse", ADDITION: "add"}

DEFAULT_MAX_STATES = 200_000


class EdgeOpError(PreconditionError):
    pass


class NotCoveredError(EdgeOpError):
    pass


class MissingEdgeError(EdgeOpError):
    pass


class EdgeExistsError(EdgeOpError):
    pass


@dataclass(frozen=True)
class EdgeOp:
    kind: str
    edge: Edge

    def __post_init__(self):
        if self.kind not in _KIND_RANK:
            raise ValueError(f"unknown edge operation {self.kind!r}")

    def __str__(self):
        s, t = self.edge
        return f"{_VERB[self.kind]} {s}->{t}"

    def inverse(self) -> "EdgeOp":
        s, t = self.edge
        if self.kind == REVERSAL:
            return EdgeOp(REVERSAL, (t, s))
        return EdgeOp(ADDITION if self.kind == REMOVAL else REMOVAL, self.edge)


def apply(g: Dag, op: EdgeOp) -> Dag:
    s, t = op.edge
    if op.kind == ADDITION:
        if g.is_joined(s, t):
            raise EdgeExistsError(f"{s} and {t} are already joined")
        return g.with_edges([(s, t)])
    if not g.has_edge(s, t):
        raise MissingEdgeError(f"edge {s}->{t} is not in the graph")
    if op.kind == REMOVAL:
        return g.without_edges([(s, t)])
    if not g.is_covered((s, t)):
        raise NotCoveredError(f"edge {s}->{t} is not covered")
    return Dag(g.nodes, (g.edges - {(s, t)}) | {(t, s)})


@dataclass(frozen=True)
class OpSequence:
    start: Dag
    ops: Tuple[EdgeOp, ...]
    end: Dag

    def __len__(self):
        return len(self.ops)

    def graphs(self) -> List[Dag]:
        out = [self.start]
        for op in self.ops:
            out.append(apply(out[-1], op))
        return out

    def count(self, kind: str) -> int:
        return sum(op.kind == kind for op in self.ops)


def verify_sequence(seq: OpSequence, allow_additions: bool = True) -> bool:
    """Replay ``seq``; False on any failed precondition or a wrong endpoint."""
    g = seq.start
    for op in seq.ops:
        if op.kind == ADDITION and not allow_additions:
            return False
        try:
            g = apply(g, op)
        except BninvError:
            return False
    return g == seq.end


# --- search --------------------------------------------------------------


def _moves(g: Dag, kinds: Tuple[str, ...], keep: Callable[[Edge], bool]) -> Iterator[Tuple[EdgeOp, FrozenSet[Edge]]]:
    """Applicable operations with the edge sets they produce (always acyclic)."""
    edges = g.edges
    for kind in sorted(kinds, key=_KIND_RANK.__getitem__):
        if kind == ADDITION:
            n = len(g)
            for i in range(n):
                for j in range(n):
                    # adding i->j is acyclic iff j is not an ancestor of i
                    if i == j or g.ancestor_mask(i) >> j & 1:
                        continue
                    s, t = g.nodes[i], g.nodes[j]
                    if g.is_joined(s, t):
                        continue
                    yield EdgeOp(ADDITION, (s, t)), edges | {(s, t)}
            continue
        for e in g.sorted_edges():
            if kind == REMOVAL:
                if not keep(e):
                    yield EdgeOp(REMOVAL, e), edges - {e}
            elif g.is_covered(e):
                yield EdgeOp(REVERSAL, e), (edges - {e}) | {(e[1], e[0])}


@dataclass(frozen=True)
class SearchResult:
    status: str  # "found", "exhausted" (provably no sequence) or "inconclusive" (bound hit)
    sequence: Optional[OpSequence]
    states: int


def _bfs(start: Dag, kinds, is_goal, keep, max_ops: int, max_states: int):
    """Breadth-first search; returns (status, goal graph, ops, state count, parent map)."""
    graphs: Dict[FrozenSet[Edge], Dag] = {start.edges: start}
    parent: Dict[Dag, Optional[Tuple[Dag, EdgeOp]]] = {start: None}
    frontier = [start]
    depth = 0

    def path_to(g):
        ops = []
        while parent[g] is not None:
            g, op = parent[g]
            ops.append(op)
        return tuple(reversed(ops))

    if is_goal(start):
        return "found", start, (), 1, parent
    while frontier:
        if depth >= max_ops:
            return "inconclusive", None, None, len(parent), parent
        depth += 1
        nxt = []
        for g in frontier:
            for op, edges in _moves(g, kinds, keep):
                if edges in graphs:
                    continue
                h = graphs[edges] = Dag(g.nodes, edges)
                parent[h] = (g, op)
                if is_goal(h):
                    return "found", h, path_to(h), len(parent), parent
                if len(parent) >= max_states:
                    return "inconclusive", None, None, len(parent), parent
                nxt.append(h)
        frontier = nxt
    return "exhausted", None, None, len(parent), parent


def default_max_ops(gp: Dag, g: Dag) -> int:
    return len(gp.edges) + len(gp.edges - g.edges) + 8


def search_transformation(gp: Dag, g: Dag, max_ops: Optional[int] = None,
                          max_states: int = DEFAULT_MAX_STATES) -> SearchResult:
    """Look for covered reversals and removals turning ``gp`` into ``g``.

    Edges joining pairs adjacent in ``g`` are never removed, since nothing
    could restore them.
    """
    if set(gp.nodes) != set(g.nodes):
        raise PreconditionError("both graphs must share one node set")
    if max_ops is None:
        max_ops = default_max_ops(gp, g)
    skel = g.skeleton()
    status, end, ops, states, _ = _bfs(gp, (REMOVAL, REVERSAL), lambda h: h == g,
                                        lambda e: skel.has_link(*e), max_ops, max_states)
    seq = OpSequence(gp, ops, end) if status == "found" else None
    return SearchResult(status, seq, states)


def find_transformation(gp: Dag, g: Dag, max_ops: Optional[int] = None,
                        max_states: int = DEFAULT_MAX_STATES) -> Optional[OpSequence]:
    """A certificate sequence from ``gp`` to ``g``, or None if none was found within the bounds.

    None is inconclusive unless :func:`search_transformation` reports the
    search space as exhausted.
    """
    return search_transformation(gp, g, max_ops, max_states).sequence


def transformation_map(gp: Dag, max_ops: Optional[int] = None,
                       max_states: int = DEFAULT_MAX_STATES) -> Dict[Dag, OpSequence]:
    """Least shortest sequence from ``gp`` to every graph reachable by reversals and removals.

    Same search order as :func:`find_transformation`, run to completion
    instead of stopping at one target.
    """
    if max_ops is None:
        max_ops = len(gp.edges) * 4 + 8
    _, _, _, _, parent = _bfs(gp, (REMOVAL, REVERSAL), lambda h: False, lambda e: False, max_ops, max_states)
    out: Dict[Dag, OpSequence] = {}

    def seq_for(h):
        if h in out:
            return out[h]
        if parent[h] is None:
            seq = OpSequence(gp, (), h)
        else:
            prev, op = parent[h]
            seq = OpSequence(gp, seq_for(prev).ops + (op,), h)
        out[h] = seq
        return seq

    for h in parent:
        seq_for(h)
    return out


@dataclass(frozen=True)
class SynthesisResult:
    graph: Dag
    sequence: OpSequence

    @property
    def n_additions(self) -> int:
        return self.sequence.count(ADDITION)

    @property
    def n_reversals(self) -> int:
        return self.sequence.count(REVERSAL)


def synthesize_inversion(g: Dag, max_ops: Optional[int] = None,
                         max_states: int = DEFAULT_MAX_STATES) -> Optional[SynthesisResult]:
    """Grow an inversion of ``g`` by covered reversals and additions.

    The target is any graph in which every edge of ``g`` appears reversed and
    the leaves of ``g`` only have leaves as parents.  Returns None when the
    bounds are exhausted first.
    """
    if max_ops is None:
        max_ops = len(g) * (len(g) - 1)
    wanted = g.reverse().edges
    leaves = g.leaves()

    def is_goal(h: Dag) -> bool:
        if not wanted <= h.edges:
            return False
        return all(h.parents(t) <= leaves for t in leaves)

    status, end, ops, _, _ = _bfs(g, (REVERSAL, ADDITION), is_goal, lambda e: True, max_ops, max_states)
    if status != "found":
        return None
    if not markov_included(g, end).verdict:
        raise AssertionError("synthesized inversion fails the inclusion check")  # pragma: no cover
    return SynthesisResult(end, OpSequence(g, ops, end))
