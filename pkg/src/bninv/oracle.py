"""Exact distributional checks over small discrete Bayesian networks.

Everything here works on full joint tables, so it only scales to a
handful of nodes.  It is the ground truth the graphical checks are
tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np

from .dsep import Trail, is_blocked
from .errors import PreconditionError, ResourceLimitError
from .graph import Dag
from .invert import check_leaf_parents, complete_leaves

DEFAULT_TOL = 1e-9
ROW_TOL = 1e-12
MASS_TOL = 1e-10
DEFAULT_MAX_STATES = 1 << 20
# conditioning configurations lighter than this are treated as impossible
ZERO_MASS = 1e-15


class DiscreteBayesNet:
    """A DAG with one conditional probability table per node.

    ``kernels[s]`` has one axis per parent of ``s`` (parents in the DAG's
    canonical order) followed by an axis for ``s`` itself; every slice along
    the last axis sums to one.
    """

    def __init__(self, dag: Dag, cardinalities: Mapping[str, int], kernels: Mapping[str, np.ndarray]):
        self.dag = dag
        self.cardinalities = {s: int(cardinalities[s]) for s in dag.nodes}
        for s, c in self.cardinalities.items():
            if c < 2:
                raise ValueError(f"node {s} needs at least two states, got {c}")
        self.kernels: Dict[str, np.ndarray] = {}
        for s in dag.nodes:
            k = np.asarray(kernels[s], dtype=float)
            shape = tuple(self.cardinalities[p] for p in self.parents(s)) + (self.cardinalities[s],)
            if k.shape != shape:
                raise ValueError(f"kernel of {s} has shape {k.shape}, expected {shape}")
            if (k < 0).any():
                raise ValueError(f"kernel of {s} has negative entries")
            if not np.allclose(k.sum(axis=-1), 1.0, rtol=0, atol=ROW_TOL):
                raise ValueError(f"kernel rows of {s} do not sum to 1")
            self.kernels[s] = k

    def parents(self, s: str) -> Tuple[str, ...]:
        return self.dag.ordered(self.dag.parents(s))

    def n_states(self) -> int:
        return prod(self.cardinalities.values())


@dataclass(frozen=True)
class JointTable:
    """Probabilities of every full configuration; axes follow ``nodes``."""

    nodes: Tuple[str, ...]
    table: np.ndarray

    def __post_init__(self):
        if self.table.ndim != len(self.nodes):
            raise ValueError("one axis per node is required")
        if (self.table < 0).any():
            raise ValueError("negative probability")
        if abs(self.table.sum() - 1.0) > MASS_TOL:
            raise ValueError(f"total mass {self.table.sum()!r} is not 1")

    @property
    def cardinalities(self) -> Dict[str, int]:
        return dict(zip(self.nodes, self.table.shape))

    @property
    def flat(self) -> np.ndarray:
        """Row-major, first node slowest."""
        return self.table.reshape(-1)

    def axes(self, nodes: Iterable[str]) -> Tuple[int, ...]:
        pos = {s: i for i, s in enumerate(self.nodes)}
        try:
            return tuple(sorted({pos[s] for s in nodes}))
        except KeyError as exc:
            raise PreconditionError(f"node {exc.args[0]!r} is not in the table") from None


def joint(bn: DiscreteBayesNet, max_states: int = DEFAULT_MAX_STATES) -> JointTable:
    """Multiply out every kernel."""
    if bn.n_states() > max_states:
        raise ResourceLimitError(f"joint table would have {bn.n_states()} entries, limit is {max_states}")
    g = bn.dag
    shape = [bn.cardinalities[s] for s in g.nodes]
    table = np.ones(shape)
    for s in g.nodes:
        own = [g.index(p) for p in bn.parents(s)] + [g.index(s)]
        k = np.moveaxis(bn.kernels[s], range(len(own)), np.argsort(np.argsort(own)))
        view = [1] * len(shape)
        for i in own:
            view[i] = shape[i]
        table = table * k.reshape(view)
    return JointTable(g.nodes, table)


def test_ci(p: JointTable, a: Iterable[str], b: Iterable[str], s: Iterable[str] = (),
            tol: float = DEFAULT_TOL) -> bool:
    """True iff ``a`` and ``b`` are conditionally independent given ``s`` under ``p``.

    Sets may overlap.  Only configurations of ``s`` with positive mass are
    examined, and conditionals are compared entrywise within ``tol``.
    """
    a, b, s = set(a), set(b), set(s)
    if not a or not b:
        return True
    gap = ci_gap(p.table[None], p.axes(a), p.axes(b), p.axes(s))
    return bool(gap[0] <= tol)


def ci_gap(tables: np.ndarray, a: Tuple[int, ...], b: Tuple[int, ...], s: Tuple[int, ...]) -> np.ndarray:
    """Largest conditional-independence defect for each table in a batch.

    ``tables`` has a leading batch axis; ``a``, ``b``, ``s`` are axis
    positions within one table.  Configurations of ``s`` without mass are
    skipped.
    """
    nd = tables.ndim - 1
    keep = set(a) | set(b) | set(s)
    m = tables.sum(axis=tuple(i + 1 for i in range(nd) if i not in keep), keepdims=True)

    def marginal(ax):
        return m.sum(axis=tuple(i + 1 for i in keep if i not in ax), keepdims=True)

    ps = marginal(set(s))
    pas = marginal(set(a) | set(s))
    pbs = marginal(set(b) | set(s))
    live = np.broadcast_to(ps > ZERO_MASS, m.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        diff = np.abs(m / ps - (pas / ps) * (pbs / ps))
    diff = np.where(live, diff, 0.0)
    return diff.reshape(len(tables), -1).max(axis=1)


def factorizes(p: JointTable, h: Dag, tol: float = DEFAULT_TOL) -> bool:
    """True iff the distribution lies in the model of ``h``.

    Checked node by node along the canonical ordering of ``h``: each node
    must be independent of its other predecessors given its parents.
    """
    return factorization_failure(p, h, tol) is None


def factorization_failure(p: JointTable, h: Dag, tol: float = DEFAULT_TOL) -> Optional[str]:
    """The first node (in the canonical ordering of ``h``) whose local independence fails."""
    if set(p.nodes) != set(h.nodes):
        raise PreconditionError("table and graph must share one node set")
    o = h.topological_ordering()
    for s in o:
        pa = h.parents(s)
        rest = o.predecessors(s) - pa
        if rest and not test_ci(p, {s}, rest, pa, tol):
            return s
    return None


def conditional_models(p: JointTable, g: Dag, gp: Dag, tol: float = DEFAULT_TOL) -> bool:
    """Can ``gp``'s kernels represent the conditional of the non-leaves given the leaves of ``g``?"""
    check_leaf_parents(g, gp)
    return factorizes(p, complete_leaves(g, gp, gp.topological_ordering()), tol)


Cards = Union[None, int, Mapping[str, int]]


def _cards(g: Dag, cardinalities: Cards) -> Dict[str, int]:
    if cardinalities is None:
        cardinalities = 2
    if isinstance(cardinalities, int):
        return {s: cardinalities for s in g.nodes}
    return {s: int(cardinalities[s]) for s in g.nodes}


def random_net(g: Dag, cardinalities: Cards = None, seed: Optional[int] = None) -> DiscreteBayesNet:
    """Kernel rows drawn independently from a flat Dirichlet; reproducible from ``seed``."""
    cards = _cards(g, cardinalities)
    rng = np.random.default_rng(seed)
    kernels = {}
    for s in g.nodes:
        pshape = tuple(cards[q] for q in g.ordered(g.parents(s)))
        rows = rng.dirichlet(np.ones(cards[s]), size=prod(pshape))
        kernels[s] = rows.reshape(pshape + (cards[s],))
    return DiscreteBayesNet(g, cards, kernels)


# --- parity witnesses ----------------------------------------------------


def parity_net(g: Dag, edges: Iterable[Tuple[str, str]]) -> DiscreteBayesNet:
    """Binary net over ``g``: a node with incoming ``edges`` is the sum mod 2 of
    those parents, every other node is a fair coin."""
    active: Dict[str, set] = {s: set() for s in g.nodes}
    for s, t in edges:
        if not g.has_edge(s, t):
            raise PreconditionError(f"{s}->{t} is not an edge of the graph")
        active[t].add(s)
    kernels = {}
    for s in g.nodes:
        pa = g.ordered(g.parents(s))
        k = np.empty((2,) * len(pa) + (2,))
        for cfg in np.ndindex(*((2,) * len(pa))):
            if active[s]:
                x = sum(v for q, v in zip(pa, cfg) if q in active[s]) % 2
                k[cfg] = (1.0 - x, float(x))
            else:
                k[cfg] = (0.5, 0.5)
        kernels[s] = k
    return DiscreteBayesNet(g, {s: 2 for s in g.nodes}, kernels)


def _paths_to(g: Dag, given: frozenset) -> Dict[str, Optional[str]]:
    """Next hop on a shortest directed path into ``given`` (None for members)."""
    nxt: Dict[str, Optional[str]] = {s: None for s in g.ordered(given)}
    frontier = list(nxt)
    while frontier:
        new = []
        for v in frontier:
            for u in g.ordered(g.parents(v)):
                if u not in nxt:
                    nxt[u] = v
                    new.append(u)
        frontier = new
    return nxt


def _path(nxt, c: str) -> List[str]:
    out = [c]
    while nxt[out[-1]] is not None:
        out.append(nxt[out[-1]])
    return out


def witness_edges(g: Dag, trail: Trail, given: Iterable[str] = ()) -> Tuple[Trail, List[Tuple[str, str]]]:
    """Reroute ``trail`` until no collider's path into ``given`` crosses it.

    Returns the final trail and the edges that get parity kernels: the
    trail's own edges plus a shortest directed path from every collider
    outside ``given`` into ``given``.
    """
    given = frozenset(given)
    if is_blocked(g, trail, given):
        raise PreconditionError(f"trail {trail} is blocked")
    nxt = _paths_to(g, given)
    nodes = list(trail.nodes)
    # each rewrite lowers the summed collider distances, which is below |N|**2
    for _ in range(len(g) ** 2 + 1):
        t = Trail.through(g, nodes)
        pos = {u: k for k, u in enumerate(nodes)}
        for i in t.colliders():
            c = nodes[i]
            if c in given:
                continue
            path = _path(nxt, c)
            hit = next(((j, pos[w]) for j, w in enumerate(path) if j and w in pos), None)
            if hit is None:
                continue
            j, k = hit
            if k > i:
                nodes = nodes[:i] + path[:j] + nodes[k:]
            else:
                nodes = nodes[:k] + path[j::-1] + nodes[i + 1:]
            break
        else:
            break
    else:  # pragma: no cover
        raise AssertionError("trail rerouting did not terminate")
    t = Trail.through(g, nodes)
    edges = set(t.edges())
    for i in t.colliders():
        path = _path(nxt, nodes[i])
        edges.update(zip(path, path[1:]))
    if is_blocked(g, t, given):  # pragma: no cover
        raise AssertionError("rerouting produced a blocked trail")
    return t, g.sorted_edges(edges)


def xor_witness(g: Dag, trail: Trail, given: Iterable[str] = ()) -> DiscreteBayesNet:
    """A binary net over ``g`` in which the trail's endpoints stay dependent given ``given``."""
    _, edges = witness_edges(g, trail, given)
    return parity_net(g, edges)
