"""Markov inclusion between a generative DAG and a recognition DAG.

Every checker takes the generative graph ``g`` first and the candidate
recognition graph ``gp`` second; a positive verdict means every distribution
that factorizes over ``g`` also factorizes over ``gp``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

from .dsep import Trail, _reach_mask, d_separated, find_active_trail
from .errors import GraphError, PreconditionError, ResourceLimitError
from .graph import Dag, Edge, TopologicalOrdering, bits

DEFAULT_SUBSET_NODE_LIMIT = 6
DEFAULT_PERFECT_EDGE_LIMIT = 20


@dataclass(frozen=True)
class Violation:
    """``node`` is d-connected to ``other`` in the generative graph given ``given``.

    The witness trail is found on first access.
    """

    node: str
    other: str
    given: FrozenSet[str]
    condition: str
    graph: Dag = field(repr=False, compare=False)

    @cached_property
    def trail(self) -> Trail:
        return find_active_trail(self.graph, self.node, self.other, self.given)

    def line(self) -> str:
        return f"VIOLATION s={self.node} t={self.other} trail={self.trail}"

    def as_dict(self) -> dict:
        return {
            "condition": self.condition,
            "s": self.node,
            "t": self.other,
            "given": list(self.graph.ordered(self.given)),
            "trail": str(self.trail),
        }


@dataclass(frozen=True)
class InclusionReport:
    condition: str
    violations: Tuple[Violation, ...]
    # (A, B, S) for condition (ii)
    counterexample: Optional[Tuple[FrozenSet[str], FrozenSet[str], FrozenSet[str]]] = None

    @property
    def verdict(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.verdict


def _require_same_nodes(g: Dag, gp: Dag):
    if set(g.nodes) != set(gp.nodes):
        raise GraphError("generative and recognition graphs must share one node set")


def _first_connected(g: Dag, s: str, candidates: Iterable[str], given: FrozenSet[str]) -> str:
    for t in g.ordered(candidates):
        if not d_separated(g, s, t, given):
            return t
    raise AssertionError("set query reported connection but no member is connected")  # pragma: no cover


def _local_check(g: Dag, gp: Dag, condition: str, others_of) -> InclusionReport:
    violations = []
    for s in g.nodes:
        given = gp.parents(s)
        others = others_of(s)
        if not d_separated(g, s, others, given):
            t = _first_connected(g, s, others, given)
            violations.append(Violation(s, t, given, condition, g))
    return InclusionReport(condition, tuple(violations))


def check_condition_iii(g: Dag, gp: Dag) -> InclusionReport:
    """Each node separated in ``g`` from its ``gp`` non-descendants by its ``gp`` parents."""
    _require_same_nodes(g, gp)
    return _local_check(g, gp, "iii", gp.non_descendants)


def check_condition_iv(g: Dag, gp: Dag, ordering: Optional[TopologicalOrdering] = None) -> InclusionReport:
    """Each node separated in ``g`` from its predecessors under ``ordering`` by its ``gp`` parents."""
    _require_same_nodes(g, gp)
    if ordering is None:
        ordering = gp.topological_ordering()
    if not ordering.consonant_with(gp):
        raise PreconditionError(f"ordering {ordering} is not consonant with the recognition graph")
    return _local_check(g, gp, "iv", ordering.predecessors)


def markov_included(g: Dag, gp: Dag) -> InclusionReport:
    """Decide whether ``gp`` can represent every distribution of ``g``."""
    return check_condition_iii(g, gp)


# --- condition (ii): all separation statements ---------------------------


def _subset_indicator(n: int):
    """For each mask C, an int whose bit B is set iff B is a subset of C."""
    size = 1 << n
    out = [0] * size
    for c in range(size):
        m = 0
        sub = c
        while True:
            m |= 1 << sub
            if sub == 0:
                break
            sub = (sub - 1) & c
        out[c] = m
    return out


_INDICATORS: Dict[int, list] = {}


def separation_table(g: Dag) -> int:
    """Every separation statement of ``g`` as one bitset.

    Bit ``(A * 2**n + S) * 2**n + B`` is set iff ``A`` and ``B`` are
    d-separated by ``S`` (node sets as masks over canonical order).
    """
    cached = g._cache.get("septable")
    if cached is not None:
        return cached
    n = len(g)
    size = 1 << n
    full = size - 1
    ind = _INDICATORS.get(n)
    if ind is None:
        ind = _INDICATORS[n] = _subset_indicator(n)
    chunks = []
    for a in range(size):
        for sm in range(size):
            reach = 0
            for i in bits(a):
                reach |= _reach_mask(g, i, sm)
            chunks.append(ind[full & ~reach])
    table = 0
    for k in reversed(range(len(chunks))):
        table = (table << size) | chunks[k]
    g._cache["septable"] = table
    return table


def check_condition_ii(g: Dag, gp: Dag, max_nodes: int = DEFAULT_SUBSET_NODE_LIMIT) -> InclusionReport:
    """Every separation statement of ``gp`` also holds in ``g``.

    Exhaustive over all triples of node subsets; the first counterexample in
    (A, S, B) mask order is reported.
    """
    _require_same_nodes(g, gp)
    n = len(g)
    if n > max_nodes:
        raise ResourceLimitError(f"condition (ii) enumerates all subset triples; limit is {max_nodes} nodes, got {n}")
    # gp bit positions must line up with g's canonical order
    gp_aligned = gp if gp.nodes == g.nodes else Dag(g.nodes, gp.edges)
    bad = separation_table(gp_aligned) & ~separation_table(g)
    if not bad:
        return InclusionReport("ii", ())
    pos = (bad & -bad).bit_length() - 1
    size = 1 << n
    bm = pos % size
    sm = (pos // size) % size
    am = pos // (size * size)
    a, b, s = g.names(am), g.names(bm), g.names(sm)
    for x in g.ordered(am):
        for y in g.ordered(bm):
            if not d_separated(g, x, y, s):
                return InclusionReport("ii", (Violation(x, y, s, "ii", g),), (a, b, s))
    raise AssertionError("separation table and pairwise queries disagree")  # pragma: no cover


# --- perfectness-based conditions ----------------------------------------


def _gp_edge_for(gp: Dag, link: FrozenSet[str]) -> Optional[Edge]:
    s, t = tuple(link)
    if gp.has_edge(s, t):
        return (s, t)
    if gp.has_edge(t, s):
        return (t, s)
    return None


def check_sufficient_perfect(g: Dag, gp: Dag, max_edges: int = DEFAULT_PERFECT_EDGE_LIMIT) -> Optional[Dag]:
    """Smallest perfect subgraph of ``gp`` whose skeleton covers the moral graph of ``g``.

    Returns None when no such subgraph exists.  The search is exact: every
    moral link forces the ``gp`` edge joining its pair, and the remaining
    ``gp`` edges are tried as subsets in order of increasing size.
    """
    _require_same_nodes(g, gp)
    if len(gp.edges) > max_edges:
        raise ResourceLimitError(
            f"perfect-subgraph search is exponential in edges; {len(gp.edges)} exceeds {max_edges}. "
            "Use the procedural check instead: is minimal_inversion(g, o) a subgraph of gp?")
    forced = set()
    for link in g.moral_graph().links:
        e = _gp_edge_for(gp, link)
        if e is None:
            return None
        forced.add(e)
    optional = gp.sorted_edges(gp.edges - forced)
    nodes = gp.nodes
    for k in range(len(optional) + 1):
        for extra in combinations(optional, k):
            h = Dag(nodes, forced.union(extra))
            if h.is_perfect():
                return h
    return None


@dataclass(frozen=True)
class NecessaryReport:
    missing_links: Tuple[Edge, ...]
    failed_nodes: Tuple[str, ...]
    witnesses: Dict[str, Dag] = field(compare=False)

    @property
    def passed(self) -> bool:
        return not self.missing_links and not self.failed_nodes

    def __bool__(self):
        return self.passed


def check_necessary(g: Dag, gp: Dag, max_edges: int = DEFAULT_PERFECT_EDGE_LIMIT) -> NecessaryReport:
    """Structural conditions every inclusive ``gp`` containing the reversed ``g`` must meet.

    (a) the skeleton of ``gp`` covers the moral graph of ``g``;
    (b) for each node ``s``, restricting both graphs to ``s`` and its
    descendants in ``g`` leaves a perfect moral-covering subgraph.
    A failure proves non-inclusion; passing proves nothing.
    """
    _require_same_nodes(g, gp)
    missing = g.reverse().edges - gp.edges
    if missing:
        s, t = g.sorted_edges(missing)[0]
        raise PreconditionError(f"recognition graph lacks reversed edge {s}->{t}; the necessary condition assumes it")
    skel = gp.skeleton()
    missing_links = tuple(l for l in g.moral_graph().sorted_links() if not skel.has_link(*l))
    failed = []
    witnesses = {}
    for s in g.nodes:
        block = {s} | g.descendants(s)
        h = check_sufficient_perfect(g.induced_subgraph(block), gp.induced_subgraph(block), max_edges)
        if h is None:
            failed.append(s)
        else:
            witnesses[s] = h
    return NecessaryReport(missing_links, tuple(failed), witnesses)


def check_star_inversion(g: Dag) -> bool:
    """True iff reversing every edge of ``g`` keeps its distributions: all parent and child sets complete."""
    return all(g.is_complete(g.parents(s)) and g.is_complete(g.children(s)) for s in g.nodes)


def check_star_equivalence(g: Dag) -> bool:
    forward = check_star_inversion(g)
    backward = check_star_inversion(g.reverse())
    if forward != backward:
        raise AssertionError("star inversion disagrees between a graph and its reverse")  # pragma: no cover
    return forward


def induced_inclusion_holds(g: Dag, gp: Dag, nodes: Iterable[str]) -> bool:
    nodes = set(nodes)
    g.mask(nodes)
    return markov_included(g.induced_subgraph(nodes), gp.induced_subgraph(nodes)).verdict
