"""Command-line entry point: ``bninv <verb> ...``.

Exit codes: 0 affirmative verdict, 3 negative verdict, 2 usage or input
error, 4 a resource bound was hit (including an inconclusive search).
Bounds default from ``BNINV_*`` environment variables when set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional, Sequence

from . import __version__
from .dsep import d_separated, find_active_trail
from .errors import BninvError, ParseError, PreconditionError, ResourceLimitError
from .graph import DEFAULT_MAX_ORDERINGS, TopologicalOrdering
from .inclusion import (DEFAULT_PERFECT_EDGE_LIMIT, DEFAULT_SUBSET_NODE_LIMIT, check_condition_ii,
                        check_condition_iii, check_condition_iv, check_necessary,
                        check_sufficient_perfect)
from .invert import all_minimal_inversions, minimal_inversion
from .io import format_dot, format_net, graph_to_dict, read_graph, read_net
from .meek import DEFAULT_MAX_STATES, search_transformation, synthesize_inversion
from .oracle import (DEFAULT_MAX_STATES as DEFAULT_JOINT_STATES, DEFAULT_TOL, conditional_models,
                     factorization_failure, joint, random_net, test_ci)

EXIT_OK, EXIT_USAGE, EXIT_NEGATIVE, EXIT_RESOURCE = 0, 2, 3, 4


class UsageError(BninvError):
    pass


def _env_int(name: str, default: Optional[int]) -> Optional[int]:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {raw!r}") from None
    if value <= 0:
        raise UsageError(f"{name} must be positive, got {value}")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _node_list(text: str) -> List[str]:
    return [s for s in text.split(",") if s]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("dot", "json", "text"), default="text",
                        help="output format (graphs are written as DOT under text)")

    p = argparse.ArgumentParser(prog="bninv", description="Invert Bayesian networks and check recognition graphs.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="verb", required=True, metavar="VERB")

    inv = sub.add_parser("invert", parents=[common], help="minimal inversion of a generative graph")
    inv.add_argument("--graph", required=True)
    grp = inv.add_mutually_exclusive_group()
    grp.add_argument("--ordering", type=_node_list, help="comma-separated ordering of the reversed graph")
    grp.add_argument("--all", action="store_true", help="one inversion per ordering, duplicates merged")
    inv.add_argument("--trace", action="store_true", help="print one line per step before the graph")
    inv.add_argument("--max-orderings", type=_positive,
                     default=_env_int("BNINV_MAX_ORDERINGS", DEFAULT_MAX_ORDERINGS))

    chk = sub.add_parser("check", parents=[common], help="does the recognition graph include the generative model?")
    chk.add_argument("--generative", required=True)
    chk.add_argument("--recognition", required=True)
    chk.add_argument("--condition", choices=("ii", "iii", "iv"), default="iii")
    chk.add_argument("--ordering", type=_node_list, help="ordering of the recognition graph for condition iv")
    chk.add_argument("--necessary", action="store_true", help="also run the structural necessary condition")
    chk.add_argument("--sufficient", action="store_true", help="also search for a perfect moral-covering subgraph")
    chk.add_argument("--subset-nodes", type=_positive,
                     default=_env_int("BNINV_SUBSET_NODES", DEFAULT_SUBSET_NODE_LIMIT))
    chk.add_argument("--perfect-edges", type=_positive,
                     default=_env_int("BNINV_PERFECT_EDGES", DEFAULT_PERFECT_EDGE_LIMIT))

    ds = sub.add_parser("dsep", parents=[common], help="d-separation query")
    ds.add_argument("--graph", required=True)
    ds.add_argument("--a", type=_node_list, required=True)
    ds.add_argument("--b", type=_node_list, required=True)
    ds.add_argument("--given", type=_node_list, default=[])

    mk = sub.add_parser("meek", parents=[common], help="covered reversals and removals between two graphs")
    mk.add_argument("--from", dest="source", help="start graph (the recognition graph)")
    mk.add_argument("--to", dest="target", help="target graph (the generative graph)")
    mk.add_argument("--synthesize", metavar="GRAPH", help="grow an inversion of GRAPH by reversals and additions")
    mk.add_argument("--max-ops", type=_positive, default=_env_int("BNINV_MAX_OPS", None))
    mk.add_argument("--max-states", type=_positive, default=_env_int("BNINV_STATE_BOUND", DEFAULT_MAX_STATES))

    orc = sub.add_parser("oracle", parents=[common], help="exact checks on a discrete net")
    orc.add_argument("--net", help="net in JSON form")
    orc.add_argument("--check-factorizes", metavar="GRAPH")
    orc.add_argument("--conditional-models", metavar="GRAPH",
                     help="can GRAPH's kernels represent the posterior given the net's leaves?")
    orc.add_argument("--check-ci", action="store_true", help="test --a independent of --b given --given")
    orc.add_argument("--a", type=_node_list, default=[])
    orc.add_argument("--b", type=_node_list, default=[])
    orc.add_argument("--given", type=_node_list, default=[])
    orc.add_argument("--tol", type=float, default=DEFAULT_TOL)
    orc.add_argument("--random-net", metavar="GRAPH", help="write a random net over GRAPH as JSON")
    orc.add_argument("--cardinality", type=_positive, default=2)
    orc.add_argument("--seed", type=int, default=_env_int("BNINV_SEED", 0))
    orc.add_argument("--max-states", type=_positive,
                     default=_env_int("BNINV_JOINT_STATES", DEFAULT_JOINT_STATES))

    st = sub.add_parser("selftest", parents=[common], help="run the golden figure fixtures")
    st.add_argument("--list", action="store_true", help="print fixture names only")
    st.add_argument("--slow", action="store_true", help="also sweep all small DAGs against the oracle")
    st.add_argument("--fixtures", metavar="DIR", help="fixture directory (default: the shipped one)")
    return p


class Output:
    def __init__(self, fmt: str):
        self.fmt = fmt
        self.lines: List[str] = []

    def line(self, text: str = ""):
        self.lines.append(text)

    def block(self, text: str):
        self.lines.extend(text.rstrip("\n").split("\n"))

    def report(self, verdict: bool, violations=(), trace=(), **extra) -> None:
        obj = {"verdict": verdict, "violations": list(violations), "trace": list(trace)}
        obj.update(extra)
        self.lines = [json.dumps(obj, indent=2)]

    @property
    def json(self) -> bool:
        return self.fmt == "json"

    def render(self) -> str:
        return "".join(s + "\n" for s in self.lines)


# --- verbs ---------------------------------------------------------------


def _invert(args, out: Output) -> int:
    g = read_graph(args.graph)
    if args.all:
        invs = all_minimal_inversions(g, args.max_orderings)
        if out.json:
            out.report(True, inversions=[{"orderings": [str(o) for o in inv.orderings],
                                          "graph": graph_to_dict(inv.graph)} for inv in invs])
            return EXIT_OK
        for k, inv in enumerate(invs):
            out.line("// orderings: " + "; ".join(str(o) for o in inv.orderings))
            out.block(format_dot(inv.graph, f"inversion{k}"))
        return EXIT_OK
    ordering = TopologicalOrdering(args.ordering) if args.ordering else None
    h, trace = minimal_inversion(g, ordering)
    if out.json:
        out.report(True, trace=[s.as_dict() for s in trace.steps], ordering=str(trace.ordering),
                   graph=graph_to_dict(h), note=trace.note)
        return EXIT_OK
    if args.trace:
        out.line(f"// ordering: {trace.ordering}")
        for step in trace.steps:
            out.line(step.line())
        out.line(f"// {trace.note}")
    out.block(format_dot(h, "inversion"))
    return EXIT_OK


def _check(args, out: Output) -> int:
    g = read_graph(args.generative)
    gp = read_graph(args.recognition)
    if args.condition == "ii":
        report = check_condition_ii(g, gp, args.subset_nodes)
    elif args.condition == "iv":
        ordering = TopologicalOrdering(args.ordering) if args.ordering else None
        report = check_condition_iv(g, gp, ordering)
    else:
        report = check_condition_iii(g, gp)
    ok = report.verdict
    extra = {"condition": report.condition}
    text = [v.line() for v in report.violations]
    if report.counterexample:
        a, b, s = (list(g.ordered(x)) for x in report.counterexample)
        extra["counterexample"] = {"a": a, "b": b, "given": s}
        text.append(f"COUNTEREXAMPLE a={','.join(a)} b={','.join(b)} given={','.join(s)}")
    text.append("included" if report.verdict else "not included")
    if args.necessary:
        nec = check_necessary(g, gp, args.perfect_edges)
        ok = ok and nec.passed
        extra["necessary"] = {"passed": nec.passed,
                              "missing_links": [list(l) for l in nec.missing_links],
                              "failed_nodes": list(nec.failed_nodes)}
        text += [f"MISSING_LINK {s}--{t}" for s, t in nec.missing_links]
        text += [f"NO_PERFECT_SUBGRAPH s={s}" for s in nec.failed_nodes]
        text.append("necessary condition " + ("passes" if nec.passed else "fails"))
    if args.sufficient:
        h = check_sufficient_perfect(g, gp, args.perfect_edges)
        ok = ok and h is not None
        extra["sufficient"] = {"witness": graph_to_dict(h) if h is not None else None}
        if h is None:
            text.append("PERFECT_SUBGRAPH none")
        else:
            text.append("PERFECT_SUBGRAPH " + ", ".join(f"{s}->{t}" for s, t in h.sorted_edges()))
    if out.json:
        out.report(report.verdict, [v.as_dict() for v in report.violations], passed=ok, **extra)
    else:
        for t in text:
            out.line(t)
    return EXIT_OK if ok else EXIT_NEGATIVE


def _dsep(args, out: Output) -> int:
    g = read_graph(args.graph)
    sep = d_separated(g, args.a, args.b, args.given)
    trail = None if sep else find_active_trail(g, args.a, args.b, args.given)
    if out.json:
        out.report(sep, [] if sep else [{"trail": str(trail), "nodes": list(trail.nodes)}])
    else:
        out.line("separated" if sep else str(trail))
    return EXIT_OK if sep else EXIT_NEGATIVE


def _meek(args, out: Output) -> int:
    if args.synthesize:
        if args.source or args.target:
            raise UsageError("--synthesize cannot be combined with --from/--to")
        g = read_graph(args.synthesize)
        res = synthesize_inversion(g, args.max_ops, args.max_states)
        if res is None:
            if out.json:
                out.report(False, status="inconclusive")
            else:
                out.line("INCONCLUSIVE")
            return EXIT_RESOURCE
        ops = [str(op) for op in res.sequence.ops]
        if out.json:
            out.report(True, trace=ops, graph=graph_to_dict(res.graph),
                       additions=res.n_additions, reversals=res.n_reversals)
        else:
            out.line(f"// additions={res.n_additions} reversals={res.n_reversals}")
            for op in ops:
                out.line(op)
            out.block(format_dot(res.graph, "inversion"))
        return EXIT_OK
    if not (args.source and args.target):
        raise UsageError("meek needs --from and --to, or --synthesize")
    gp, g = read_graph(args.source), read_graph(args.target)
    res = search_transformation(gp, g, args.max_ops, args.max_states)
    ops = [str(op) for op in res.sequence.ops] if res.sequence else []
    if out.json:
        out.report(res.status == "found", trace=ops, status=res.status, states=res.states)
    elif res.status == "found":
        for op in ops:
            out.line(op)
    else:
        out.line("INCONCLUSIVE" if res.status == "inconclusive" else "NO_SEQUENCE")
    return {"found": EXIT_OK, "exhausted": EXIT_NEGATIVE}.get(res.status, EXIT_RESOURCE)


def _oracle(args, out: Output) -> int:
    if args.random_net:
        g = read_graph(args.random_net)
        out.block(format_net(random_net(g, args.cardinality, args.seed)))
        return EXIT_OK
    if not args.net:
        raise UsageError("oracle needs --net (or --random-net GRAPH)")
    if not (args.check_factorizes or args.check_ci or args.conditional_models):
        raise UsageError("oracle needs --check-factorizes, --conditional-models or --check-ci")
    bn = read_net(args.net)
    p = joint(bn, args.max_states)
    ok = True
    violations = []
    text = []
    if args.check_factorizes:
        h = read_graph(args.check_factorizes)
        bad = factorization_failure(p, h, args.tol)
        if bad is not None:
            ok = False
            violations.append({"check": "factorizes", "s": bad})
            text.append(f"VIOLATION s={bad} check=factorizes")
        text.append("factorizes" if bad is None else "does not factorize")
    if args.conditional_models:
        h = read_graph(args.conditional_models)
        good = conditional_models(p, bn.dag, h, args.tol)
        ok = ok and good
        if not good:
            violations.append({"check": "conditional_models"})
            text.append("VIOLATION check=conditional_models")
        text.append("models the posterior" if good else "cannot model the posterior")
    if args.check_ci:
        if not args.a or not args.b:
            raise UsageError("--check-ci needs --a and --b")
        good = test_ci(p, args.a, args.b, args.given, args.tol)
        ok = ok and good
        if not good:
            violations.append({"check": "ci", "a": args.a, "b": args.b, "given": args.given})
            text.append(f"VIOLATION check=ci a={','.join(args.a)} b={','.join(args.b)} given={','.join(args.given)}")
        text.append("independent" if good else "dependent")
    if out.json:
        out.report(ok, violations)
    else:
        for t in text:
            out.line(t)
    return EXIT_OK if ok else EXIT_NEGATIVE


def _selftest(args, out: Output) -> int:
    from .selftest import CHECKS, oracle_sweep, run_fixtures

    if args.list:
        for name in CHECKS:
            out.line(name)
        return EXIT_OK
    results = run_fixtures(args.fixtures)
    lines = [r.line() for r in results]
    ok = all(r.passed for r in results)
    if args.slow:
        sweep = oracle_sweep()
        good = not sweep.failures
        ok = ok and good
        lines.append(f"{'PASS' if good else 'FAIL'} oracle-sweep: {sweep.graphs} graphs, "
                     f"{sweep.separated} separated triples, {sweep.refuted} parity refutations")
        lines += [f"  {f}" for f in sweep.failures[:20]]
    if out.json:
        out.report(ok, [l for l in lines if l.startswith("FAIL")], lines)
    else:
        for l in lines:
            out.line(l)
    return EXIT_OK if ok else EXIT_NEGATIVE


VERBS = {"invert": _invert, "check": _check, "dsep": _dsep, "meek": _meek, "oracle": _oracle,
         "selftest": _selftest}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        parser = build_parser()
    except UsageError as exc:
        print(f"bninv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = Output(args.format)
    try:
        code = VERBS[args.verb](args, out)
    except ResourceLimitError as exc:
        print(f"bninv: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ParseError, PreconditionError, UsageError, BninvError, ValueError) as exc:
        print(f"bninv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(out.render())
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
