"""d-separation: trails, blocking, and three independent deciders.

``d_separated`` is the primary decider (ancestral moral graph plus undirected
reachability).  ``d_connected`` answers the same question for one source node
by active-trail reachability and is used to build whole separation tables.
``d_separated_bruteforce`` enumerates simple trails and applies the blocking
rule literally; it exists to cross-check the other two on small graphs.

Query sets need not be disjoint.  A trail whose endpoint lies in the
conditioning set is always blocked, and a node shared by both sides but not
conditioned on is connected to itself by the one-node trail.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterable, Iterator, List, Optional, Tuple, Union

from .errors import InvalidTrailError, ResourceLimitError
from .graph import Dag, bits

NodeArg = Union[str, Iterable[str]]

DEFAULT_TRAIL_NODE_LIMIT = 10


@dataclass(frozen=True)
class Trail:
    """A sequence of distinct nodes, consecutive ones joined by an edge.

    ``forward[i]`` is True when the edge between ``nodes[i]`` and
    ``nodes[i + 1]`` points from ``nodes[i]`` to ``nodes[i + 1]``.
    """

    nodes: Tuple[str, ...]
    forward: Tuple[bool, ...]

    def __post_init__(self):
        if not self.nodes:
            raise InvalidTrailError("a trail has at least one node")
        if len(self.forward) != len(self.nodes) - 1:
            raise InvalidTrailError("one direction flag per step is required")
        if len(set(self.nodes)) != len(self.nodes):
            raise InvalidTrailError(f"trail repeats a node: {self.nodes!r}")

    @classmethod
    def through(cls, g: Dag, nodes: Iterable[str]) -> "Trail":
        """Read the direction flags off ``g``."""
        nodes = tuple(nodes)
        flags = []
        for u, v in zip(nodes, nodes[1:]):
            if g.has_edge(u, v):
                flags.append(True)
            elif g.has_edge(v, u):
                flags.append(False)
            else:
                raise InvalidTrailError(f"{u} and {v} are not joined")
        return cls(nodes, tuple(flags))

    def __len__(self):
        return len(self.forward)

    @property
    def start(self) -> str:
        return self.nodes[0]

    @property
    def end(self) -> str:
        return self.nodes[-1]

    def colliders(self) -> Tuple[int, ...]:
        """Positions of the v-structures (interior nodes entered from both sides)."""
        f = self.forward
        return tuple(i for i in range(1, len(self.nodes) - 1) if f[i - 1] and not f[i])

    def reversed(self) -> "Trail":
        return Trail(self.nodes[::-1], tuple(not f for f in self.forward[::-1]))

    def edges(self) -> List[Tuple[str, str]]:
        n = self.nodes
        return [(n[i], n[i + 1]) if f else (n[i + 1], n[i]) for i, f in enumerate(self.forward)]

    def validate(self, g: Dag) -> None:
        for s in self.nodes:
            g.index(s)
        for (u, v), f in zip(zip(self.nodes, self.nodes[1:]), self.forward):
            if not (g.has_edge(u, v) if f else g.has_edge(v, u)):
                arrow = "->" if f else "<-"
                raise InvalidTrailError(f"step {u} {arrow} {v} is not an edge of the graph")

    def __str__(self):
        out = [self.nodes[0]]
        for v, f in zip(self.nodes[1:], self.forward):
            out.append("->" if f else "<-")
            out.append(v)
        return " ".join(out)


def is_blocked(g: Dag, trail: Trail, given: NodeArg = ()) -> bool:
    trail.validate(g)
    sm = g.mask(given)
    colliders = set(trail.colliders())
    for pos, u in enumerate(trail.nodes):
        i = g.index(u)
        if pos in colliders:
            if not (sm >> i & 1) and not (g.descendant_mask(i) & sm):
                return True
        elif sm >> i & 1:
            return True
    return False


# --- moral-graph decider -------------------------------------------------


def _moral_separated(g: Dag, am: int, bm: int, sm: int) -> bool:
    am &= ~sm
    bm &= ~sm
    if not am or not bm:
        return True
    if am & bm:
        return False
    anc = g.ancestral_closure(am | bm | sm)
    pm, cm = g.parent_masks, g.child_masks
    adj = {}
    for i in bits(anc):
        adj[i] = adj.get(i, 0) | ((pm[i] | cm[i]) & anc)
        # all parents of an ancestral node are ancestral
        for p in bits(pm[i]):
            adj[p] = adj.get(p, 0) | (pm[i] & ~(1 << p))
    allowed = anc & ~sm
    seen = am
    frontier = am
    while frontier:
        nxt = 0
        for i in bits(frontier):
            nxt |= adj[i]
        nxt &= allowed & ~seen
        if nxt & bm:
            return False
        seen |= nxt
        frontier = nxt
    return True


def d_separated(g: Dag, a: NodeArg, b: NodeArg, given: NodeArg = ()) -> bool:
    """True iff every trail from ``a`` to ``b`` is blocked by ``given``.

    Memoized on the graph, so repeated queries against one graph are cheap.
    """
    am, bm, sm = g.mask(a), g.mask(b), g.mask(given)
    key = ("dsep", am, bm, sm)
    cache = g._cache
    hit = cache.get(key)
    if hit is None:
        hit = cache[key] = _moral_separated(g, am, bm, sm)
    return hit


# --- reachability decider ------------------------------------------------


def _reach_mask(g: Dag, i: int, sm: int) -> int:
    """Nodes joined to node ``i`` by an unblocked trail given ``sm`` (``i`` included)."""
    if sm >> i & 1:
        return 0
    key = ("reach", i, sm)
    cache = g._cache
    hit = cache.get(key)
    if hit is not None:
        return hit
    pm, cm = g.parent_masks, g.child_masks
    active = g.ancestral_closure(sm)
    # state: (node, arrived_from_child); arrived_from_child means moving "up"
    seen_up = 0
    seen_down = 0
    reach = 0
    stack = [(i, True)]
    while stack:
        j, up = stack.pop()
        bit = 1 << j
        if up:
            if seen_up & bit:
                continue
            seen_up |= bit
        else:
            if seen_down & bit:
                continue
            seen_down |= bit
        in_s = sm & bit
        if not in_s:
            reach |= bit
        if up and not in_s:
            stack.extend((p, True) for p in bits(pm[j]))
            stack.extend((c, False) for c in bits(cm[j]))
        elif not up:
            if not in_s:
                stack.extend((c, False) for c in bits(cm[j]))
            if active & bit:
                stack.extend((p, True) for p in bits(pm[j]))
    cache[key] = reach
    return reach


def d_connected(g: Dag, a: str, given: NodeArg = ()) -> FrozenSet[str]:
    """All nodes ``t`` (``a`` itself included) with ``a`` and ``t`` not d-separated by ``given``."""
    return g.names(_reach_mask(g, g.index(a), g.mask(given)))


def d_separated_by_reachability(g: Dag, a: NodeArg, b: NodeArg, given: NodeArg = ()) -> bool:
    sm = g.mask(given)
    bm = g.mask(b)
    return not any(_reach_mask(g, i, sm) & bm for i in bits(g.mask(a)))


# --- brute force ---------------------------------------------------------


def _neighbours(g: Dag, i: int) -> List[int]:
    return list(bits(g.parent_masks[i] | g.child_masks[i]))


def enumerate_trails(g: Dag, s: str, t: str, node_limit: int = DEFAULT_TRAIL_NODE_LIMIT) -> List[Trail]:
    """All simple trails from ``s`` to ``t``, depth-first in canonical neighbour order."""
    if len(g) > node_limit:
        raise ResourceLimitError(f"trail enumeration is capped at {node_limit} nodes, graph has {len(g)}")
    si, ti = g.index(s), g.index(t)
    if si == ti:
        return [Trail((s,), ())]
    out = []
    path = [si]

    def rec(i, used):
        for j in _neighbours(g, i):
            if used >> j & 1:
                continue
            path.append(j)
            if j == ti:
                out.append(Trail.through(g, (g.nodes[k] for k in path)))
            else:
                rec(j, used | 1 << j)
            path.pop()

    rec(si, 1 << si)
    return out


def d_separated_bruteforce(g: Dag, a: NodeArg, b: NodeArg, given: NodeArg = (),
                           node_limit: int = DEFAULT_TRAIL_NODE_LIMIT) -> bool:
    given = g.ordered(given)
    for s in g.ordered(a):
        for t in g.ordered(b):
            for trail in enumerate_trails(g, s, t, node_limit):
                if not is_blocked(g, trail, given):
                    return False
    return True


# --- witnesses -----------------------------------------------------------


def _active_trails_of_length(g: Dag, start: int, targets: int, sm: int, length: int,
                             allowed: int) -> Iterator[List[int]]:
    """Depth-first search for unblocked simple trails with exactly ``length`` edges."""
    pm, cm = g.parent_masks, g.child_masks
    path = [start]
    into = []  # into[k]: edge k points into path[k + 1]

    def ok_interior(k):
        u = path[k]
        collider = into[k - 1] and not into[k]
        if collider:
            return bool(sm >> u & 1) or bool(g.descendant_mask(u) & sm)
        return not sm >> u & 1

    def rec(used):
        i = path[-1]
        if len(path) - 1 == length:
            if targets >> i & 1:
                yield list(path)
            return
        for j in bits((pm[i] | cm[i]) & allowed & ~used):
            path.append(j)
            into.append(bool(cm[i] >> j & 1))
            if len(path) < 3 or ok_interior(len(path) - 2):
                yield from rec(used | 1 << j)
            path.pop()
            into.pop()

    yield from rec(1 << start)


def find_active_trail(g: Dag, a: NodeArg, b: NodeArg, given: NodeArg = ()) -> Optional[Trail]:
    """A shortest unblocked trail from ``a`` to ``b``, or None when separated.

    Ties are broken by canonical order of the start node, then of each
    successive node.  Every node of an unblocked trail is an ancestor of
    ``a``, ``b`` or ``given``, so the search stays inside that set.
    """
    am, bm, sm = g.mask(a), g.mask(b), g.mask(given)
    if _moral_separated(g, am, bm, sm):
        return None
    am &= ~sm
    bm &= ~sm
    allowed = g.ancestral_closure(am | bm | sm)
    for length in range(len(g)):
        for i in bits(am):
            for path in _active_trails_of_length(g, i, bm, sm, length, allowed):
                return Trail.through(g, (g.nodes[k] for k in path))
    raise AssertionError("moral-graph test and trail search disagree")  # pragma: no cover
