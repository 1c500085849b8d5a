"""Discrete Bayesian networks: parsing, forward sampling, and graph truths."""
from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .data import Dataset
from .graphs import LocalStructure, Pdag, dag_to_cpdag

__all__ = [
    "NetworkError",
    "NodeSpec",
    "Network",
    "parse_network_json",
    "parse_bif",
    "load_network",
    "forward_sample",
    "d_separated",
    "true_pc",
    "true_local_cpdag",
    "cpdag_of",
]

ROW_SUM_TOL = 1e-6


class NetworkError(ValueError):
    """Malformed network description."""


@dataclass(frozen=True)
class NodeSpec:
    """One variable: state labels, parent indices (in CPT order), and CPT.

    ``cpt`` has shape (q, r): one row per parent configuration (mixed radix
    over the parents in listed order, first parent most significant), one
    column per state.
    """

    name: str
    states: tuple
    parents: tuple
    cpt: np.ndarray

    @property
    def arity(self) -> int:
        return len(self.states)


class Network:
    """An immutable DAG of discrete variables with full CPTs."""

    def __init__(self, nodes: Sequence[NodeSpec]):
        self.nodes: Tuple[NodeSpec, ...] = tuple(nodes)
        if not self.nodes:
            raise NetworkError("network needs at least one node")
        names = [nd.name for nd in self.nodes]
        if len(set(names)) != len(names):
            raise NetworkError("duplicate variable name")
        self._index: Dict[str, int] = {nm: i for i, nm in enumerate(names)}
        self._children: List[List[int]] = [[] for _ in self.nodes]
        for i, nd in enumerate(self.nodes):
            for p in nd.parents:
                if not 0 <= p < len(self.nodes) or p == i:
                    raise NetworkError(f"bad parent index {p} for node {nd.name}")
                self._children[p].append(i)
            if len(set(nd.parents)) != len(nd.parents):
                raise NetworkError(f"duplicate parent for node {nd.name}")
        for kids in self._children:
            kids.sort()
        self._topo = self._toposort()
        self._validate_cpts()

    # -- construction helpers ---------------------------------------------

    def _toposort(self) -> List[int]:
        indeg = [len(nd.parents) for nd in self.nodes]
        ready = sorted(i for i, d in enumerate(indeg) if d == 0)
        order: List[int] = []
        while ready:
            u = ready.pop(0)
            order.append(u)
            for v in self._children[u]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    ready.append(v)
            ready.sort()
        if len(order) != len(self.nodes):
            raise NetworkError("parent structure contains a cycle")
        return order

    def _validate_cpts(self) -> None:
        for nd in self.nodes:
            q = 1
            for p in nd.parents:
                q *= self.nodes[p].arity
            cpt = nd.cpt
            if cpt.shape != (q, nd.arity):
                raise NetworkError(
                    f"CPT of {nd.name} has shape {cpt.shape}, expected {(q, nd.arity)}"
                )
            if np.any(cpt < 0) or np.any(cpt > 1):
                raise NetworkError(f"CPT of {nd.name} has entries outside [0, 1]")
            sums = cpt.sum(axis=1)
            if np.any(np.abs(sums - 1.0) > ROW_SUM_TOL):
                j = int(np.argmax(np.abs(sums - 1.0)))
                raise NetworkError(
                    f"CPT row {j} of {nd.name} sums to {sums[j]:.8f}, not 1"
                )

    # -- queries -----------------------------------------------------------

    @property
    def n_vars(self) -> int:
        return len(self.nodes)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(nd.name for nd in self.nodes)

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise NetworkError(f"unknown variable name {name!r}") from None

    def arity(self, i: int) -> int:
        return self.nodes[i].arity

    def parents_of(self, i: int) -> Tuple[int, ...]:
        return self.nodes[i].parents

    def children_of(self, i: int) -> Tuple[int, ...]:
        return tuple(self._children[i])

    def topological_order(self) -> Tuple[int, ...]:
        return tuple(self._topo)

    def edges(self) -> List[Tuple[int, int]]:
        out = []
        for i, nd in enumerate(self.nodes):
            out.extend((p, i) for p in nd.parents)
        return sorted(out)

    def adjacent(self, a: int, b: int) -> bool:
        return b in self.nodes[a].parents or a in self.nodes[b].parents


# ---------------------------------------------------------------------------
# JSON format


def parse_network_json(text: str) -> Network:
    """Parse the JSON network schema.

    {"nodes": [{"name": ..., "states": k or [labels...],
                "parents": [names...], "cpt": [[p, ...] x q]}, ...]}
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "nodes" not in doc:
        raise NetworkError('top level must be an object with a "nodes" list')
    raw_nodes = doc["nodes"]
    if not isinstance(raw_nodes, list) or not raw_nodes:
        raise NetworkError('"nodes" must be a non-empty list')

    order = []
    for entry in raw_nodes:
        if not isinstance(entry, dict) or "name" not in entry:
            raise NetworkError("every node needs a name")
        order.append(str(entry["name"]))
    if len(set(order)) != len(order):
        raise NetworkError("duplicate variable name")
    index = {nm: i for i, nm in enumerate(order)}

    nodes: List[NodeSpec] = []
    for entry in raw_nodes:
        name = str(entry["name"])
        states = entry.get("states")
        if isinstance(states, int):
            if states < 1:
                raise NetworkError(f"node {name}: states must be >= 1")
            labels = tuple(f"s{i}" for i in range(states))
        elif isinstance(states, list) and states:
            labels = tuple(str(s) for s in states)
        else:
            raise NetworkError(f"node {name}: states must be an int or label list")
        parent_names = entry.get("parents", [])
        try:
            parents = tuple(index[str(p)] for p in parent_names)
        except KeyError as exc:
            raise NetworkError(f"node {name}: unknown parent {exc.args[0]!r}") from None
        cpt_rows = entry.get("cpt")
        if not isinstance(cpt_rows, list):
            raise NetworkError(f"node {name}: cpt must be a list of rows")
        try:
            cpt = np.asarray(cpt_rows, dtype=np.float64)
        except ValueError:
            raise NetworkError(f"node {name}: ragged cpt") from None
        if cpt.ndim != 2:
            raise NetworkError(f"node {name}: cpt must be two-dimensional")
        nodes.append(NodeSpec(name=name, states=labels, parents=parents, cpt=cpt))
    return Network(nodes)


def network_to_json(net: Network) -> str:
    """Serialize a network back into the JSON schema (round-trip aid)."""
    doc = {
        "nodes": [
            {
                "name": nd.name,
                "states": list(nd.states),
                "parents": [net.nodes[p].name for p in nd.parents],
                "cpt": [[float(p) for p in row] for row in nd.cpt],
            }
            for nd in net.nodes
        ]
    }
    return json.dumps(doc, indent=1)


# ---------------------------------------------------------------------------
# BIF format (0.15-style subset)

_BIF_COMMENT = re.compile(r"//[^\n]*|/\*.*?\*/", re.DOTALL)
_BIF_NETWORK = re.compile(r"\bnetwork\b[^{]*\{", re.DOTALL)
_BIF_VARIABLE = re.compile(r"\bvariable\s+([^\s{]+)\s*\{")
_BIF_TYPE = re.compile(
    r"type\s+discrete\s*\[\s*(\d+)\s*\]\s*\{([^}]*)\}\s*;", re.DOTALL
)
_BIF_PROBABILITY = re.compile(r"\bprobability\s*\(([^)]*)\)\s*\{")


def _matching_brace(text: str, open_idx: int) -> int:
    depth = 0
    for i in range(open_idx, len(text)):
        if text[i] == "{":
            depth += 1
        elif text[i] == "}":
            depth -= 1
            if depth == 0:
                return i
    raise NetworkError("unbalanced braces in BIF input")


def _split_tokens(payload: str) -> List[str]:
    return [tok.strip() for tok in payload.split(",") if tok.strip() != ""]


def parse_bif(text: str) -> Network:
    """Parse the supported BIF subset.

    Accepts ``variable`` blocks with ``type discrete [ k ] { labels };`` and
    ``probability`` blocks whose bodies contain either ``table p1, ...;`` rows
    or per-parent-configuration rows ``( s1, s2 ) p1, ...;`` in any order.
    ``property`` lines are ignored.
    """
    text = _BIF_COMMENT.sub(" ", text)

    variables: Dict[str, Tuple[str, ...]] = {}
    order: List[str] = []
    for m in _BIF_VARIABLE.finditer(text):
        name = m.group(1)
        if name in variables:
            raise NetworkError(f"duplicate variable block for {name}")
        close = _matching_brace(text, m.end() - 1)
        body = text[m.end() : close]
        tm = _BIF_TYPE.search(body)
        if tm is None:
            raise NetworkError(f"variable {name}: missing discrete type declaration")
        declared = int(tm.group(1))
        labels = _split_tokens(tm.group(2))
        if len(labels) != declared:
            raise NetworkError(
                f"variable {name}: declares {declared} states but lists {len(labels)}"
            )
        if len(set(labels)) != len(labels):
            raise NetworkError(f"variable {name}: duplicate state label")
        variables[name] = tuple(labels)
        order.append(name)
    if not order:
        raise NetworkError("no variable blocks found")
    index = {nm: i for i, nm in enumerate(order)}

    parents_of: Dict[str, Tuple[str, ...]] = {}
    cpts: Dict[str, np.ndarray] = {}
    for m in _BIF_PROBABILITY.finditer(text):
        header = m.group(1)
        close = _matching_brace(text, m.end() - 1)
        body = text[m.end() : close]

        if "|" in header:
            child_part, parent_part = header.split("|", 1)
            parent_names = _split_tokens(parent_part)
        else:
            child_part, parent_names = header, []
        child_tokens = _split_tokens(child_part)
        if len(child_tokens) != 1:
            raise NetworkError(f"probability header {header!r} needs one child")
        child = child_tokens[0]
        if child not in variables:
            raise NetworkError(f"probability block for unknown variable {child}")
        if child in cpts:
            raise NetworkError(f"duplicate probability block for {child}")
        for p in parent_names:
            if p not in variables:
                raise NetworkError(f"{child}: unknown parent {p}")

        r = len(variables[child])
        p_arities = [len(variables[p]) for p in parent_names]
        q = 1
        for a in p_arities:
            q *= a
        cpt = np.full((q, r), np.nan, dtype=np.float64)

        statements = [s.strip() for s in body.split(";") if s.strip() != ""]
        for stmt in statements:
            if stmt.startswith("property"):
                continue
            if stmt.startswith("table"):
                values = _split_tokens(stmt[len("table") :])
                numbers = _parse_floats(child, values)
                if len(numbers) == r and q == 1:
                    cpt[0, :] = numbers
                elif len(numbers) == q * r:
                    # flat layout: parent configurations in mixed-radix order
                    cpt[:, :] = np.asarray(numbers).reshape(q, r)
                else:
                    raise NetworkError(
                        f"{child}: table lists {len(numbers)} values, "
                        f"expected {r} or {q * r}"
                    )
                continue
            cm = re.match(r"^\(([^)]*)\)(.*)$", stmt, re.DOTALL)
            if cm is None:
                raise NetworkError(f"{child}: unparseable row {stmt!r}")
            state_tokens = _split_tokens(cm.group(1))
            if len(state_tokens) != len(parent_names):
                raise NetworkError(
                    f"{child}: row names {len(state_tokens)} parent states, "
                    f"expected {len(parent_names)}"
                )
            j = 0
            for tok, pname in zip(state_tokens, parent_names):
                labels = variables[pname]
                try:
                    v = labels.index(tok)
                except ValueError:
                    raise NetworkError(
                        f"{child}: unknown state {tok!r} of parent {pname}"
                    ) from None
                j = j * len(labels) + v
            if not np.isnan(cpt[j]).all():
                raise NetworkError(f"{child}: duplicate row for configuration {stmt!r}")
            numbers = _parse_floats(child, _split_tokens(cm.group(2)))
            if len(numbers) != r:
                raise NetworkError(
                    f"{child}: row lists {len(numbers)} probabilities, expected {r}"
                )
            cpt[j, :] = numbers

        if np.isnan(cpt).any():
            missing = int(np.isnan(cpt).any(axis=1).sum())
            raise NetworkError(
                f"{child}: {missing} parent configuration(s) have no probability row"
            )
        parents_of[child] = tuple(parent_names)
        cpts[child] = cpt

    nodes: List[NodeSpec] = []
    for name in order:
        if name not in cpts:
            raise NetworkError(f"variable {name} has no probability block")
        nodes.append(
            NodeSpec(
                name=name,
                states=variables[name],
                parents=tuple(index[p] for p in parents_of[name]),
                cpt=cpts[name],
            )
        )
    return Network(nodes)


def _parse_floats(child: str, tokens: List[str]) -> List[float]:
    try:
        return [float(tok) for tok in tokens]
    except ValueError:
        raise NetworkError(f"{child}: non-numeric probability") from None


def load_network(path: Union[str, os.PathLike]) -> Network:
    """Load a network file, dispatching on the .json / .bif extension."""
    path = os.fspath(path)
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    lower = path.lower()
    if lower.endswith(".json"):
        return parse_network_json(text)
    if lower.endswith(".bif"):
        return parse_bif(text)
    raise NetworkError(f"cannot infer network format from {path!r}")


# ---------------------------------------------------------------------------
# Forward sampling


def forward_sample(net: Network, n: int, seed: int) -> Dataset:
    """Draw n joint samples by ancestral sampling.

    Each node consumes its own child stream spawned from the seed, so the
    sampled column of a node is unchanged when unrelated nodes are added.
    """
    if n < 1:
        raise NetworkError("sample size must be >= 1")
    streams = np.random.SeedSequence(seed).spawn(net.n_vars)
    rows = np.empty((n, net.n_vars), dtype=np.int64)
    for i in net.topological_order():
        nd = net.nodes[i]
        rng = np.random.Generator(np.random.PCG64(streams[i]))
        u = rng.random(n)
        cum = np.cumsum(nd.cpt, axis=1)
        if nd.parents:
            dims = tuple(net.nodes[p].arity for p in nd.parents)
            j = np.ravel_multi_index(tuple(rows[:, p] for p in nd.parents), dims=dims)
            draws = (u[:, None] >= cum[j]).sum(axis=1)
        else:
            draws = np.searchsorted(cum[0], u, side="right")
        rows[:, i] = np.minimum(draws, nd.arity - 1)
    return Dataset(
        names=net.names,
        arities=np.array([nd.arity for nd in net.nodes], dtype=np.int64),
        rows=rows,
    )


# ---------------------------------------------------------------------------
# Graph truths


def d_separated(net: Network, x: int, y: int, z: Iterable[int] = ()) -> bool:
    """Is x d-separated from y given z? Ball-passing reachability."""
    zset = frozenset(int(v) for v in z)
    if x == y or x in zset or y in zset:
        raise NetworkError("d-separation needs distinct x, y outside z")

    ancestors = set(zset)
    frontier = list(zset)
    while frontier:
        u = frontier.pop()
        for p in net.parents_of(u):
            if p not in ancestors:
                ancestors.add(p)
                frontier.append(p)

    # states: (node, direction); direction True = reached from a child (going up)
    start = (x, True)
    seen = {start}
    stack = [start]
    while stack:
        u, up = stack.pop()
        if u == y:
            return False
        moves = []
        if up and u not in zset:
            moves.extend((p, True) for p in net.parents_of(u))
            moves.extend((c, False) for c in net.children_of(u))
        elif not up:
            if u not in zset:
                moves.extend((c, False) for c in net.children_of(u))
            if u in ancestors:
                moves.extend((p, True) for p in net.parents_of(u))
        for state in moves:
            if state not in seen:
                seen.add(state)
                stack.append(state)
    return True


def true_pc(net: Network, t: int) -> List[int]:
    """Parents and children of t in the true DAG, ascending."""
    return sorted(set(net.parents_of(t)) | set(net.children_of(t)))


def cpdag_of(net: Network) -> Pdag:
    """CPDAG of the network's DAG (v-structures plus Meek closure)."""
    return dag_to_cpdag([net.parents_of(i) for i in range(net.n_vars)])


def true_local_cpdag(net: Network, t: int, cpdag: Optional[Pdag] = None) -> LocalStructure:
    """The target's incident edges in the true CPDAG, classified."""
    if cpdag is None:
        cpdag = cpdag_of(net)
    return LocalStructure.from_pdag(cpdag, t)
