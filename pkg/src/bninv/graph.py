"""Immutable DAG value type and the derived constructions built on it.

Nodes are text labels. A :class:`Dag` remembers the order its nodes were
given in; that order is the canonical order used for every deterministic
iteration and for every sorted output.  Internally node sets are handled as
integer bitmasks over that order, which keeps the exhaustive sweeps cheap.
"""

from __future__ import annotations

import heapq
import re
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import CycleError, GraphError, PreconditionError, ResourceLimitError, UnknownNodeError

Edge = Tuple[str, str]

DEFAULT_MAX_ORDERINGS = 10**6

_BAD_LABEL = re.compile(r"\s|->|,|;")


def check_label(name) -> str:
    if not isinstance(name, str) or not name:
        raise GraphError(f"node labels must be non-empty strings, got {name!r}")
    if _BAD_LABEL.search(name):
        raise GraphError(f"node label {name!r} contains whitespace, '->', ',' or ';'")
    return name


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class UndirectedGraph:
    """Undirected view of a DAG (skeleton or moral graph)."""

    __slots__ = ("_nodes", "_links", "_index")

    def __init__(self, nodes: Iterable[str], links: Iterable[Iterable[str]] = ()):
        self._nodes = tuple(nodes)
        self._index = {s: i for i, s in enumerate(self._nodes)}
        if len(self._index) != len(self._nodes):
            raise GraphError("duplicate node labels")
        out = set()
        for link in links:
            pair = frozenset(link)
            if len(pair) != 2:
                raise GraphError(f"self-link or malformed link {tuple(link)!r}")
            for s in pair:
                if s not in self._index:
                    raise UnknownNodeError(s)
            out.add(pair)
        self._links = frozenset(out)

    @property
    def nodes(self) -> Tuple[str, ...]:
        return self._nodes

    @property
    def links(self) -> FrozenSet[FrozenSet[str]]:
        return self._links

    def has_link(self, s: str, t: str) -> bool:
        return frozenset((s, t)) in self._links

    def sorted_links(self) -> List[Edge]:
        idx = self._index
        pairs = [tuple(sorted(link, key=idx.__getitem__)) for link in self._links]
        return sorted(pairs, key=lambda p: (idx[p[0]], idx[p[1]]))

    def issuperset(self, other: "UndirectedGraph") -> bool:
        return set(other.nodes) <= set(self._nodes) and other.links <= self._links

    __ge__ = issuperset

    def __le__(self, other):
        return other.issuperset(self)

    def __eq__(self, other):
        if not isinstance(other, UndirectedGraph):
            return NotImplemented
        return set(self._nodes) == set(other._nodes) and self._links == other._links

    def __hash__(self):
        return hash((frozenset(self._nodes), self._links))

    def __repr__(self):
        body = ", ".join(f"{s}--{t}" for s, t in self.sorted_links())
        return f"UndirectedGraph(nodes={list(self._nodes)}, links=[{body}])"


class TopologicalOrdering:
    """An injective ranking of nodes, ranks running 1..n.

    Built from the node sequence in rank order.  Whether it is consonant with
    a particular graph is a separate question, see :meth:`consonant_with`.
    """

    __slots__ = ("_seq", "_rank")

    def __init__(self, sequence: Iterable[str]):
        self._seq = tuple(sequence)
        self._rank = {s: i + 1 for i, s in enumerate(self._seq)}
        if len(self._rank) != len(self._seq):
            raise GraphError(f"ordering repeats a node: {self._seq!r}")

    @classmethod
    def from_ranks(cls, ranks: Mapping[str, int]) -> "TopologicalOrdering":
        n = len(ranks)
        if sorted(ranks.values()) != list(range(1, n + 1)):
            raise GraphError(f"ranks must be a permutation of 1..{n}")
        return cls(sorted(ranks, key=ranks.__getitem__))

    @property
    def sequence(self) -> Tuple[str, ...]:
        return self._seq

    @property
    def ranks(self) -> Dict[str, int]:
        return dict(self._rank)

    def rank(self, s: str) -> int:
        try:
            return self._rank[s]
        except KeyError:
            raise UnknownNodeError(s) from None

    def predecessors(self, s: str) -> FrozenSet[str]:
        return frozenset(self._seq[: self.rank(s) - 1])

    def consonant_with(self, g: "Dag") -> bool:
        if set(self._seq) != set(g.nodes):
            return False
        rank = self._rank
        return all(rank[s] < rank[t] for s, t in g.edges)

    def __iter__(self):
        return iter(self._seq)

    def __len__(self):
        return len(self._seq)

    def __eq__(self, other):
        if not isinstance(other, TopologicalOrdering):
            return NotImplemented
        return self._seq == other._seq

    def __hash__(self):
        return hash(self._seq)

    def __repr__(self):
        return f"TopologicalOrdering({', '.join(self._seq)})"

    def __str__(self):
        return ",".join(self._seq)


def is_consonant(g: "Dag", o: TopologicalOrdering) -> bool:
    return o.consonant_with(g)


class Dag:
    """A directed acyclic graph over labelled nodes.

    Parameters
    ----------
    nodes:
        Node labels; their order becomes the canonical order.
    edges:
        ``(s, t)`` pairs meaning ``s -> t``.

    Construction rejects self-loops, dangling endpoints, pairs present in both
    directions and directed cycles.  Equality is node-set plus edge-set
    equality; the canonical order does not take part in it.
    """

    __slots__ = ("_nodes", "_index", "_edges", "_pmask", "_cmask", "_hash", "_cache")

    def __init__(self, nodes: Iterable[str], edges: Iterable[Edge] = ()):
        self._nodes = tuple(nodes)
        index = {}
        for i, s in enumerate(self._nodes):
            check_label(s)
            if s in index:
                raise GraphError(f"duplicate node label {s!r}")
            index[s] = i
        self._index = index
        n = len(self._nodes)
        pmask = [0] * n
        cmask = [0] * n
        edge_set = set()
        for e in edges:
            s, t = e
            if s == t:
                raise GraphError(f"self-loop on {s!r}")
            if s not in index:
                raise UnknownNodeError(s)
            if t not in index:
                raise UnknownNodeError(t)
            edge_set.add((s, t))
            i, j = index[s], index[t]
            pmask[j] |= 1 << i
            cmask[i] |= 1 << j
        for s, t in edge_set:
            if (t, s) in edge_set:
                raise CycleError((s, t, s))
        self._edges = frozenset(edge_set)
        self._pmask = tuple(pmask)
        self._cmask = tuple(cmask)
        self._hash = None
        self._cache = {}
        if self._kahn() is None:
            raise CycleError(self._find_cycle())

    @classmethod
    def from_edges(cls, edges: Iterable[Edge], nodes: Iterable[str] = ()) -> "Dag":
        """Build a graph whose canonical order is ``nodes`` then first appearance in ``edges``."""
        edges = list(edges)
        order = list(dict.fromkeys(list(nodes) + [s for e in edges for s in e]))
        return cls(order, edges)

    # --- internals -------------------------------------------------------

    def _kahn(self) -> Optional[List[int]]:
        n = len(self._nodes)
        indeg = [bin(m).count("1") for m in self._pmask]
        heap = [i for i in range(n) if indeg[i] == 0]
        heapq.heapify(heap)
        out = []
        while heap:
            i = heapq.heappop(heap)
            out.append(i)
            for j in bits(self._cmask[i]):
                indeg[j] -= 1
                if indeg[j] == 0:
                    heapq.heappush(heap, j)
        return out if len(out) == n else None

    def _find_cycle(self) -> List[str]:
        color = {}
        stack: List[int] = []

        def visit(i):
            color[i] = 1
            stack.append(i)
            for j in bits(self._cmask[i]):
                if color.get(j) == 1:
                    k = stack.index(j)
                    return stack[k:] + [j]
                if j not in color:
                    found = visit(j)
                    if found:
                        return found
            color[i] = 2
            stack.pop()
            return None

        for i in range(len(self._nodes)):
            if i not in color:
                found = visit(i)
                if found:
                    return [self._nodes[k] for k in found]
        return []

    def _i(self, s: str) -> int:
        try:
            return self._index[s]
        except (KeyError, TypeError):
            raise UnknownNodeError(s) from None

    def mask(self, nodes) -> int:
        """Bitmask of ``nodes`` (a single label or an iterable of labels)."""
        if isinstance(nodes, str):
            return 1 << self._i(nodes)
        m = 0
        for s in nodes:
            m |= 1 << self._i(s)
        return m

    def names(self, mask: int) -> FrozenSet[str]:
        return frozenset(self._nodes[i] for i in bits(mask))

    def ordered(self, mask_or_nodes) -> Tuple[str, ...]:
        """Canonically ordered tuple of a node set or mask."""
        if not isinstance(mask_or_nodes, int):
            mask_or_nodes = self.mask(mask_or_nodes)
        return tuple(self._nodes[i] for i in bits(mask_or_nodes))

    def sorted_edges(self, edges: Optional[Iterable[Edge]] = None) -> List[Edge]:
        idx = self._index
        return sorted(self._edges if edges is None else edges, key=lambda e: (idx[e[0]], idx[e[1]]))

    @property
    def parent_masks(self) -> Tuple[int, ...]:
        return self._pmask

    @property
    def child_masks(self) -> Tuple[int, ...]:
        return self._cmask

    @property
    def full_mask(self) -> int:
        return (1 << len(self._nodes)) - 1

    def descendant_mask(self, i: int) -> int:
        key = ("des", i)
        m = self._cache.get(key)
        if m is None:
            m = 0
            frontier = self._cmask[i]
            while frontier:
                m |= frontier
                nxt = 0
                for j in bits(frontier):
                    nxt |= self._cmask[j]
                frontier = nxt & ~m
            self._cache[key] = m
        return m

    def ancestor_mask(self, i: int) -> int:
        key = ("anc", i)
        m = self._cache.get(key)
        if m is None:
            m = 0
            frontier = self._pmask[i]
            while frontier:
                m |= frontier
                nxt = 0
                for j in bits(frontier):
                    nxt |= self._pmask[j]
                frontier = nxt & ~m
            self._cache[key] = m
        return m

    def ancestral_closure(self, mask: int) -> int:
        """``mask`` together with all ancestors of its members."""
        out = mask
        for i in bits(mask):
            out |= self.ancestor_mask(i)
        return out

    # --- basic accessors -------------------------------------------------

    @property
    def nodes(self) -> Tuple[str, ...]:
        return self._nodes

    @property
    def edges(self) -> FrozenSet[Edge]:
        return self._edges

    def index(self, s: str) -> int:
        return self._i(s)

    def __contains__(self, s) -> bool:
        return s in self._index

    def __len__(self):
        return len(self._nodes)

    def has_edge(self, s: str, t: str) -> bool:
        return (s, t) in self._edges

    def is_joined(self, s: str, t: str) -> bool:
        return (s, t) in self._edges or (t, s) in self._edges

    def parents(self, s: str) -> FrozenSet[str]:
        return self.names(self._pmask[self._i(s)])

    def children(self, s: str) -> FrozenSet[str]:
        return self.names(self._cmask[self._i(s)])

    def descendants(self, s: str) -> FrozenSet[str]:
        return self.names(self.descendant_mask(self._i(s)))

    def ancestors(self, s: str) -> FrozenSet[str]:
        return self.names(self.ancestor_mask(self._i(s)))

    def non_descendants(self, s: str) -> FrozenSet[str]:
        i = self._i(s)
        return self.names(self.full_mask & ~self.descendant_mask(i) & ~(1 << i))

    def roots(self) -> FrozenSet[str]:
        return frozenset(s for s, m in zip(self._nodes, self._pmask) if not m)

    def leaves(self) -> FrozenSet[str]:
        return frozenset(s for s, m in zip(self._nodes, self._cmask) if not m)

    def is_complete(self, nodes: Iterable[str]) -> bool:
        """True when every pair of ``nodes`` is joined by an edge."""
        ms = [self._i(s) for s in nodes]
        adj = [p | c for p, c in zip(self._pmask, self._cmask)]
        return all(adj[i] >> j & 1 for i, j in combinations(ms, 2))

    # --- derived graphs --------------------------------------------------

    def reverse(self) -> "Dag":
        rev = self._cache.get("reverse")
        if rev is None:
            rev = Dag(self._nodes, ((t, s) for s, t in self._edges))
            rev._cache["reverse"] = self
            self._cache["reverse"] = rev
        return rev

    def skeleton(self) -> UndirectedGraph:
        return UndirectedGraph(self._nodes, self._edges)

    def coparent_pairs(self) -> FrozenSet[FrozenSet[str]]:
        out = set()
        for m in self._pmask:
            for i, j in combinations(bits(m), 2):
                out.add(frozenset((self._nodes[i], self._nodes[j])))
        return frozenset(out)

    def moral_graph(self) -> UndirectedGraph:
        return UndirectedGraph(self._nodes, set(map(frozenset, self._edges)) | self.coparent_pairs())

    def induced_subgraph(self, nodes: Iterable[str]) -> "Dag":
        keep = self.mask(nodes)
        order = [s for s in self._nodes if keep >> self._index[s] & 1]
        kept = set(order)
        return Dag(order, [(s, t) for s, t in self._edges if s in kept and t in kept])

    def is_perfect(self) -> bool:
        adj = [p | c for p, c in zip(self._pmask, self._cmask)]
        for m in self._pmask:
            for i in bits(m):
                # every other parent must be adjacent to i
                if (m & ~(1 << i)) & ~adj[i]:
                    return False
        return True

    def is_covered(self, edge: Edge) -> bool:
        s, t = edge
        if (s, t) not in self._edges:
            raise PreconditionError(f"edge {s}->{t} is not in the graph")
        i, j = self._index[s], self._index[t]
        return self._pmask[j] == self._pmask[i] | (1 << i)

    def with_edges(self, added: Iterable[Edge]) -> "Dag":
        return Dag(self._nodes, self._edges | set(added))

    def without_edges(self, removed: Iterable[Edge]) -> "Dag":
        return Dag(self._nodes, self._edges - set(removed))

    def is_subgraph_of(self, other: "Dag") -> bool:
        return set(self._nodes) <= set(other._nodes) and self._edges <= other._edges

    def __le__(self, other):
        return self.is_subgraph_of(other)

    def __ge__(self, other):
        return other.is_subgraph_of(self)

    def _same_universe(self, other: "Dag"):
        if set(self._nodes) != set(other._nodes):
            raise GraphError("edge-set algebra needs graphs over the same node set")

    def union(self, other: "Dag") -> "Dag":
        self._same_universe(other)
        return Dag(self._nodes, self._edges | other._edges)

    def difference(self, other: "Dag") -> "Dag":
        self._same_universe(other)
        return Dag(self._nodes, self._edges - other._edges)

    # --- orderings -------------------------------------------------------

    def topological_ordering(self) -> TopologicalOrdering:
        """Kahn's scheme, ties broken by canonical node order."""
        o = self._cache.get("topo")
        if o is None:
            o = TopologicalOrdering(self._nodes[i] for i in self._kahn())
            self._cache["topo"] = o
        return o

    def iter_topological_orderings(self) -> Iterator[TopologicalOrdering]:
        """All consonant orderings, lexicographic in canonical node order."""
        n = len(self._nodes)
        pm = self._pmask
        seq: List[int] = []

        def rec(placed: int):
            if len(seq) == n:
                yield TopologicalOrdering(self._nodes[i] for i in seq)
                return
            for i in range(n):
                if not placed >> i & 1 and pm[i] & ~placed == 0:
                    seq.append(i)
                    yield from rec(placed | 1 << i)
                    seq.pop()

        yield from rec(0)

    def all_topological_orderings(self, limit: int = DEFAULT_MAX_ORDERINGS) -> List[TopologicalOrdering]:
        out = []
        for o in self.iter_topological_orderings():
            if len(out) >= limit:
                raise ResourceLimitError(f"graph has more than {limit} topological orderings")
            out.append(o)
        return out

    # --- dunder ----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Dag):
            return NotImplemented
        if self._edges != other._edges:
            return False
        if self._nodes == other._nodes:
            return True
        return set(self._nodes) == set(other._nodes)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self._nodes), self._edges))
        return self._hash

    def __repr__(self):
        edges = ", ".join(f"{s}->{t}" for s, t in self.sorted_edges())
        return f"Dag(nodes={list(self._nodes)}, edges=[{edges}])"

    def __getstate__(self):
        return (self._nodes, self.sorted_edges())

    def __setstate__(self, state):
        Dag.__init__(self, *state)


def complete_dag(ordering: Sequence[str]) -> Dag:
    """The complete DAG in which every edge ascends ``ordering``."""
    order = list(ordering)
    return Dag(order, combinations(order, 2))


def join_consonant(g: Dag, nodes: Iterable[str], ordering: TopologicalOrdering) -> set:
    """Edges (oriented by ``ordering``) needed to make ``nodes`` complete in ``g``."""
    ranked = sorted(nodes, key=ordering.rank)
    return {(s, t) for s, t in combinations(ranked, 2) if not g.is_joined(s, t)}
