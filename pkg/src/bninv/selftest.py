"""Golden checks against the shipped figure fixtures, plus the slow oracle sweep."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from itertools import combinations
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from .dsep import d_separated, find_active_trail
from .errors import BninvError
from .generate import all_dags, default_labels
from .graph import TopologicalOrdering, bits
from .inclusion import (check_condition_ii, check_condition_iii, check_condition_iv,
                        check_sufficient_perfect, markov_included)
from .invert import check_leaf_parents, minimal_inversion, verify_goal1
from .io import read_graph
from .oracle import DEFAULT_TOL, ci_gap, factorizes, joint, random_net, test_ci, xor_witness

MANIFEST = "fixtures.json"


def fixture_dir() -> Path:
    return Path(str(resources.files("bninv") / "fixtures"))


def load_manifest(directory: Optional[Path] = None) -> Dict[str, dict]:
    directory = Path(directory) if directory else fixture_dir()
    with open(directory / MANIFEST, encoding="utf-8") as fh:
        return json.load(fh)


@dataclass
class FixtureResult:
    name: str
    problems: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.problems

    def line(self) -> str:
        if self.passed:
            return f"PASS {self.name}"
        return f"FAIL {self.name}: " + "; ".join(self.problems)


def _ordering(text: str) -> TopologicalOrdering:
    return TopologicalOrdering(text.split(","))


def _edges(pairs) -> set:
    return {tuple(p) for p in pairs}


def _fig1(graphs, expect, fail):
    g, gp = graphs["generative"], graphs["recognition"]
    report = markov_included(g, gp)
    if report.verdict != expect["included"]:
        fail(f"inclusion verdict {report.verdict}, expected {expect['included']}")
    elif report.violations and str(report.violations[0].trail) != expect["witness"]:
        fail(f"witness {report.violations[0].trail}, expected {expect['witness']}")
    ce = check_condition_ii(g, gp).counterexample
    want = tuple(frozenset(x) for x in expect["counterexample"])
    if ce != want:
        fail(f"condition (ii) counterexample {ce}, expected {want}")
    parity = joint(xor_witness(g, find_active_trail(g, "z1", "z2", "x"), {"x"}))
    if not factorizes(parity, g) or factorizes(parity, gp):
        fail("parity net should factorize over the generative graph only")
    for e in expect["fill_edges"]:
        filled = gp.with_edges([tuple(e)])
        if not markov_included(g, filled).verdict or not factorizes(parity, filled):
            fail(f"adding {e[0]}->{e[1]} should restore inclusion")
    h, _ = minimal_inversion(g, _ordering(expect["ordering"]))
    if h.edges != _edges(expect["inversion"]):
        fail(f"inversion edges {h.sorted_edges()}")


def _fig2(graphs, expect, fail):
    g = graphs["generative"]
    if g.leaves() != set(expect["leaves"]):
        fail(f"leaves {sorted(g.leaves())}")
    extra = {tuple(sorted(l)) for l in g.moral_graph().links} - {tuple(sorted(l)) for l in g.skeleton().links}
    if extra != {tuple(sorted(e)) for e in expect["moral_extra"]}:
        fail(f"moral graph adds {sorted(extra)}")
    dep = expect["dependence"]
    if d_separated(g, dep["a"], dep["b"], dep["given"]):
        fail(f"{dep['a']} and {dep['b']} should be dependent")
    else:
        trail = find_active_trail(g, dep["a"], dep["b"], dep["given"])
        if str(trail) != dep["trail"]:
            fail(f"witness {trail}, expected {dep['trail']}")
    for key, want in expect["goal1"].items():
        got = verify_goal1(g, graphs[key])
        if got != want:
            fail(f"goal I for {key}: {got}, expected {want}")


def _fig3(graphs, expect, fail):
    g, gp = graphs["generative"], graphs["recognition"]
    if g.leaves() != set(expect["leaves"]):
        fail(f"leaves {sorted(g.leaves())}")
    try:
        check_leaf_parents(g, gp)
    except BninvError as exc:
        fail(str(exc))
    got = [str(o) for o in gp.all_topological_orderings()]
    if got != expect["orderings"]:
        fail(f"orderings {got}")
    k = len(expect["leaves"])
    first = [str(o) for o in gp.all_topological_orderings() if set(o.sequence[:k]) == g.leaves()]
    if first != expect["leaves_first"]:
        fail(f"leaves-first orderings {first}")


def _fig5(graphs, expect, fail):
    g, gp = graphs["generative"], graphs["recognition"]
    for check in (check_condition_ii, check_condition_iii, check_condition_iv):
        verdict = check(g, gp).verdict
        if verdict != expect["included"]:
            fail(f"{check.__name__} gave {verdict}")
    h = check_sufficient_perfect(g, gp)
    if (h is None) != (expect["perfect_subgraph"] is None):
        fail(f"perfect subgraph {h}")


def _fig6(graphs, expect, fail):
    g, gp = graphs["generative"], graphs["recognition"]
    o = _ordering(expect["ordering"])
    h, trace = minimal_inversion(g, o)
    lines = [s.line() for s in trace.steps]
    if lines != expect["trace"]:
        fail("trace " + " | ".join(lines))
    if check_condition_iv(g, gp, o).verdict != expect["condition_iv"]:
        fail("condition (iv) verdict on the displayed recognition graph")
    if not h.is_perfect() or not h <= gp:
        fail("inversion should be perfect and contained in the displayed recognition graph")


CHECKS: Dict[str, Callable] = {
    "fig1": _fig1,
    "fig2-4": _fig2,
    "fig3": _fig3,
    "fig5": _fig5,
    "fig6-8": _fig6,
}


def run_fixtures(directory: Optional[Path] = None) -> List[FixtureResult]:
    """One result per fixture; a broken file fails only its own fixture."""
    directory = Path(directory) if directory else fixture_dir()
    try:
        manifest = load_manifest(directory)
    except (OSError, ValueError) as exc:
        return [FixtureResult(name, [f"manifest unreadable: {exc}"]) for name in CHECKS]
    results = []
    for name, check in CHECKS.items():
        res = FixtureResult(name)
        expect = manifest.get(name)
        if expect is None:
            res.problems.append("missing from manifest")
        else:
            try:
                graphs = {k: read_graph(directory / f) for k, f in expect["files"].items()}
                check(graphs, expect, res.problems.append)
            except (BninvError, KeyError, TypeError, ValueError) as exc:
                res.problems.append(f"{type(exc).__name__}: {exc}")
        results.append(res)
    return results


# --- slow sweep ----------------------------------------------------------


@dataclass
class SweepResult:
    graphs: int = 0
    separated: int = 0
    refuted: int = 0
    failures: List[str] = field(default_factory=list)


def _disjoint_triples(n: int):
    """All (A, B, S) masks with A, B nonempty and the three sets disjoint."""
    for code in range(4 ** n):
        a = b = s = 0
        for i in range(n):
            part = code >> (2 * i) & 3
            if part == 1:
                a |= 1 << i
            elif part == 2:
                b |= 1 << i
            elif part == 3:
                s |= 1 << i
        if a and b:
            yield a, b, s


def _axes(mask: int):
    return tuple(bits(mask))


def oracle_sweep(max_nodes: int = 4, nets: int = 20, tol: float = DEFAULT_TOL,
                 seed: int = 0) -> SweepResult:
    """Check d-separation against exact joints on every DAG with up to ``max_nodes`` nodes.

    Separated disjoint triples must be independent under ``nets`` random
    binary nets; every dependent singleton query must be refuted by its
    parity witness.
    """
    out = SweepResult()
    for n in range(1, max_nodes + 1):
        triples = list(_disjoint_triples(n))
        for g in all_dags(default_labels(n)):
            out.graphs += 1
            tables = np.stack([joint(random_net(g, 2, seed + k)).table for k in range(nets)])
            for am, bm, sm in triples:
                if not d_separated(g, g.names(am), g.names(bm), g.names(sm)):
                    continue
                out.separated += 1
                gap = ci_gap(tables, _axes(am), _axes(bm), _axes(sm)).max()
                if gap > tol:
                    out.failures.append(f"{g!r}: {g.names(am)} _|_ {g.names(bm)} | {g.names(sm)} off by {gap:.3g}")
            for a in g.nodes:
                for b in g.nodes:
                    for k in range(n + 1):
                        for given in combinations(g.nodes, k):
                            if d_separated(g, a, b, given):
                                continue
                            trail = find_active_trail(g, a, b, given)
                            p = joint(xor_witness(g, trail, given))
                            out.refuted += 1
                            if test_ci(p, {a}, {b}, given, tol):
                                out.failures.append(f"{g!r}: parity witness for {a}, {b} | {given} is independent")
    return out
