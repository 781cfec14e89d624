"""Reading and writing graphs (a DOT subset and JSON) and discrete nets (JSON)."""

from __future__ import annotations

import json
import re
from itertools import product
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np

from .errors import BninvError, GraphError, ParseError
from .graph import Dag, check_label

PathLike = Union[str, Path]

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*|\#[^\n]*|/\*.*?\*/)
  | (?P<arrow>->)
  | (?P<undirected>--)
  | (?P<punct>[{}\[\];,=:])
  | (?P<quoted>"(?:[^"\\]|\\.)*")
  | (?P<id>[A-Za-z0-9_.\x80-\U0010ffff]+)
  | (?P<bad>.)
""", re.VERBOSE | re.DOTALL)

_KEYWORDS = {"graph", "node", "edge", "subgraph", "strict", "digraph"}


def _tokens(text: str, source: str):
    line = 1
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        value = m.group()
        if kind == "nl":
            line += 1
        elif kind == "comment":
            line += value.count("\n")
        elif kind == "bad":
            raise ParseError("unexpected character", source, line, value)
        elif kind != "ws":
            if kind == "quoted":
                line_here = line
                line += value.count("\n")
                yield "qid", value[1:-1].replace('\\"', '"'), line_here
                continue
            yield kind, value, line
    yield "eof", "", line


class _DotParser:
    def __init__(self, text: str, source: str):
        self.source = source
        self.toks = list(_tokens(text, source))
        self.pos = 0
        self.nodes: Dict[str, None] = {}
        self.edges: List[Tuple[str, str]] = []
        self.name = ""

    def peek(self):
        return self.toks[self.pos]

    def take(self, kind=None, value=None):
        tok = self.peek()
        # quoted ids are ids that can never be keywords
        if kind == "id" and tok[0] == "qid":
            kind = "qid"
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            raise ParseError(f"expected {want}", self.source, tok[2], tok[1] or "end of input")
        self.pos += 1
        return tok

    def node(self):
        _, name, line = self.take("id")
        try:
            check_label(name)
        except GraphError as exc:
            raise ParseError(str(exc), self.source, line, name) from None
        self.nodes.setdefault(name)
        return name

    def skip_attrs(self):
        while self.peek()[1] == "[":
            self.take()
            while self.peek()[1] != "]":
                if self.peek()[0] == "eof":
                    self.take("punct", "]")
                self.take()
            self.take()

    def parse(self):
        kind, value, line = self.peek()
        if value == "strict":
            self.take()
        tok = self.peek()
        if tok[1] == "graph":
            raise ParseError("only directed graphs are supported", self.source, tok[2], tok[1])
        self.take("id", "digraph")
        if self.peek()[0] in ("id", "qid"):
            self.name = self.take()[1]
        self.take("punct", "{")
        while self.peek()[1] != "}":
            self.statement()
        self.take("punct", "}")
        self.take("eof")
        try:
            return Dag(self.nodes, self.edges)
        except BninvError as exc:
            raise ParseError(str(exc), self.source, self.toks[-1][2]) from None

    def statement(self):
        kind, value, line = self.peek()
        if kind == "punct" and value == ";":
            self.take()
            return
        if kind == "undirected":
            raise ParseError("undirected edge in a digraph", self.source, line, value)
        if kind == "id" and value in _KEYWORDS:
            if value == "subgraph":
                raise ParseError("subgraphs are not supported", self.source, line, value)
            self.take()
            self.skip_attrs()
            return
        if kind in ("id", "qid") and self.toks[self.pos + 1][1] == "=":
            # graph attribute such as rankdir=LR
            self.take()
            self.take()
            if self.peek()[0] not in ("id", "qid"):
                self.take("id")
            self.take()
            return
        prev = self.node()
        while self.peek()[0] == "arrow":
            self.take()
            nxt = self.node()
            self.edges.append((prev, nxt))
            prev = nxt
        tok = self.peek()
        if tok[0] == "undirected":
            raise ParseError("undirected edge in a digraph", self.source, tok[2], tok[1])
        self.skip_attrs()


def parse_dot(text: str, source: str = "<input>") -> Dag:
    """Parse ``digraph name { a -> b; c; }``.  Attributes and comments are ignored."""
    return _DotParser(text, source).parse()


_PLAIN_ID = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _dot_id(s: str) -> str:
    if _PLAIN_ID.match(s) and s not in _KEYWORDS:
        return s
    return '"' + s.replace('"', '\\"') + '"'


def format_dot(g: Dag, name: str = "G") -> str:
    lines = [f"digraph {_dot_id(name)} {{"]
    lines += [f"  {_dot_id(s)};" for s in g.nodes]
    lines += [f"  {_dot_id(s)} -> {_dot_id(t)};" for s, t in g.sorted_edges()]
    lines.append("}")
    return "\n".join(lines) + "\n"


# --- JSON graphs ---------------------------------------------------------


def graph_to_dict(g: Dag) -> dict:
    return {"nodes": list(g.nodes), "edges": [list(e) for e in g.sorted_edges()]}


def graph_from_dict(data, source: str = "<input>") -> Dag:
    if not isinstance(data, dict) or not isinstance(data.get("nodes"), list):
        raise ParseError("graph object needs a 'nodes' list", source)
    edges = data.get("edges", [])
    if not isinstance(edges, list) or not all(
            isinstance(e, list) and len(e) == 2 and all(isinstance(x, str) for x in e) for e in edges):
        raise ParseError("'edges' must be a list of [source, target] pairs", source)
    if not all(isinstance(s, str) for s in data["nodes"]):
        raise ParseError("node labels must be strings", source)
    try:
        return Dag(data["nodes"], [tuple(e) for e in edges])
    except BninvError as exc:
        raise ParseError(str(exc), source) from None


def format_json_graph(g: Dag) -> str:
    return json.dumps(graph_to_dict(g)) + "\n"


def _load_json(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        lines = text.splitlines()
        near = lines[exc.lineno - 1][exc.colno - 1:][:12] if exc.lineno <= len(lines) else ""
        raise ParseError(exc.msg, source, exc.lineno, near or "end of input") from None


def parse_graph(text: str, source: str = "<input>", fmt: str = "auto") -> Dag:
    if fmt == "auto":
        fmt = "json" if text.lstrip().startswith("{") else "dot"
    if fmt == "json":
        data = _load_json(text, source)
        if isinstance(data, dict) and "dag" in data and "nodes" not in data:
            data = data["dag"]
        return graph_from_dict(data, source)
    return parse_dot(text, source)


def read_graph(path: PathLike) -> Dag:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(exc.strerror or "cannot read file", str(path)) from None
    fmt = {".json": "json", ".dot": "dot", ".gv": "dot"}.get(path.suffix.lower(), "auto")
    return parse_graph(text, str(path), fmt)


# --- nets ----------------------------------------------------------------


def _config_key(parents, cfg) -> str:
    return ",".join(f"{p}={v}" for p, v in zip(parents, cfg))


def net_to_dict(bn) -> dict:
    g = bn.dag
    kernels = {}
    for s in g.nodes:
        pa = bn.parents(s)
        k = bn.kernels[s]
        kernels[s] = {_config_key(pa, cfg): [float(x) for x in k[cfg]]
                      for cfg in product(*(range(bn.cardinalities[p]) for p in pa))}
    return {"dag": graph_to_dict(g), "cardinalities": dict(bn.cardinalities), "kernels": kernels}


def net_from_dict(data, source: str = "<input>"):
    from .oracle import DiscreteBayesNet

    if not isinstance(data, dict) or "dag" not in data or "kernels" not in data:
        raise ParseError("net object needs 'dag' and 'kernels'", source)
    g = graph_from_dict(data["dag"], source)
    cards = data.get("cardinalities") or {}
    cards = {s: int(cards.get(s, 2)) for s in g.nodes}
    kernels = {}
    for s in g.nodes:
        rows = data["kernels"].get(s)
        if not isinstance(rows, dict):
            raise ParseError(f"missing kernel for node {s}", source, token=s)
        pa = g.ordered(g.parents(s))
        k = np.empty(tuple(cards[p] for p in pa) + (cards[s],))
        for cfg in product(*(range(cards[p]) for p in pa)):
            key = _config_key(pa, cfg)
            if key not in rows:
                raise ParseError(f"kernel of {s} lacks parent configuration", source, token=key or "<root>")
            k[cfg] = rows[key]
        kernels[s] = k
    try:
        return DiscreteBayesNet(g, cards, kernels)
    except ValueError as exc:
        raise ParseError(str(exc), source) from None


def read_net(path: PathLike):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(exc.strerror or "cannot read file", str(path)) from None
    return net_from_dict(_load_json(text, str(path)), str(path))


def format_net(bn) -> str:
    return json.dumps(net_to_dict(bn), indent=2) + "\n"
