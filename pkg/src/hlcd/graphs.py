"""Partially directed graphs, Meek-rule closure, and CPDAG construction."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

__all__ = [
    "InconsistentPdagError",
    "Pdag",
    "LocalStructure",
    "meek_orient",
    "dag_to_cpdag",
]

# edge marks, stored symmetrically: _adj[u][v] is the mark of the edge seen from u
UNDIRECTED = 0
OUT = 1  # u -> v
IN = -1  # v -> u


class InconsistentPdagError(RuntimeError):
    """An orientation would create a directed cycle."""


class Pdag:
    """Partially directed graph over nodes 0..n-1 with deterministic iteration."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("Pdag needs at least one node")
        self.n = int(n)
        self._adj: List[Dict[int, int]] = [dict() for _ in range(self.n)]

    # -- queries ---------------------------------------------------------

    def adjacent(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def mark(self, u: int, v: int) -> Optional[int]:
        """UNDIRECTED / OUT (u->v) / IN (v->u), or None when not adjacent."""
        return self._adj[u].get(v)

    def has_directed(self, u: int, v: int) -> bool:
        return self._adj[u].get(v) == OUT

    def has_undirected(self, u: int, v: int) -> bool:
        return self._adj[u].get(v) == UNDIRECTED

    def neighbors(self, u: int) -> List[int]:
        return sorted(self._adj[u])

    def parents_of(self, u: int) -> List[int]:
        return sorted(v for v, m in self._adj[u].items() if m == IN)

    def children_of(self, u: int) -> List[int]:
        return sorted(v for v, m in self._adj[u].items() if m == OUT)

    def undirected_neighbors(self, u: int) -> List[int]:
        return sorted(v for v, m in self._adj[u].items() if m == UNDIRECTED)

    def degree(self, u: int) -> int:
        return len(self._adj[u])

    def edges(self) -> List[Tuple[int, int, bool]]:
        """Deterministic edge list: (u, v, directed); undirected uses u < v."""
        out = []
        for u in range(self.n):
            for v in sorted(self._adj[u]):
                m = self._adj[u][v]
                if m == OUT:
                    out.append((u, v, True))
                elif m == UNDIRECTED and u < v:
                    out.append((u, v, False))
        return out

    def copy(self) -> "Pdag":
        dup = Pdag(self.n)
        dup._adj = [dict(d) for d in self._adj]
        return dup

    def __eq__(self, other) -> bool:
        return isinstance(other, Pdag) and self.n == other.n and self._adj == other._adj

    # -- mutation --------------------------------------------------------

    def add_undirected(self, u: int, v: int) -> bool:
        """Add u - v unless any edge already joins the pair. True if added."""
        self._check_pair(u, v)
        if v in self._adj[u]:
            return False
        self._adj[u][v] = UNDIRECTED
        self._adj[v][u] = UNDIRECTED
        return True

    def orient(self, u: int, v: int) -> None:
        """Set mark u -> v (edge may be new or previously undirected/reversed)."""
        self._check_pair(u, v)
        self._adj[u][v] = OUT
        self._adj[v][u] = IN

    def remove_edge(self, u: int, v: int) -> None:
        self._adj[u].pop(v, None)
        self._adj[v].pop(u, None)

    def _check_pair(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError("self loops are not allowed")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError("node index out of range")

    # -- directed-path machinery ------------------------------------------

    def has_directed_path(self, src: int, dst: int) -> bool:
        """True when src reaches dst through directed edges only."""
        if src == dst:
            return True
        seen = {src}
        stack = [src]
        while stack:
            u = stack.pop()
            for v, m in self._adj[u].items():
                if m == OUT and v not in seen:
                    if v == dst:
                        return True
                    seen.add(v)
                    stack.append(v)
        return False

    def orientation_creates_cycle(self, u: int, v: int) -> bool:
        """Would directing u -> v close a directed cycle v ~> u?"""
        return self.has_directed_path(v, u)


@dataclass(frozen=True)
class LocalStructure:
    """Classification of one node's incident edges in a partially directed graph."""

    target: int
    parents: tuple
    children: tuple
    undirected: tuple

    @classmethod
    def from_pdag(cls, pdag: Pdag, target: int) -> "LocalStructure":
        return cls(
            target=target,
            parents=tuple(pdag.parents_of(target)),
            children=tuple(pdag.children_of(target)),
            undirected=tuple(pdag.undirected_neighbors(target)),
        )


def _try_orient(
    pdag: Pdag, u: int, v: int, raise_on_cycle: bool, stats: Optional[dict]
) -> bool:
    if pdag.orientation_creates_cycle(u, v):
        if raise_on_cycle:
            raise InconsistentPdagError(
                f"orienting {u} -> {v} would create a directed cycle"
            )
        if stats is not None:
            stats["cycle_skips"] = stats.get("cycle_skips", 0) + 1
        return False
    pdag.orient(u, v)
    if stats is not None:
        stats["oriented"] = stats.get("oriented", 0) + 1
    return True


def meek_orient(
    pdag: Pdag,
    *,
    nodes: Optional[Iterable[int]] = None,
    raise_on_cycle: bool = True,
    stats: Optional[dict] = None,
) -> Pdag:
    """Close a PDAG under the four Meek orientation rules, in place.

    Never un-directs an edge; idempotent. With ``nodes`` given, both the edges
    being oriented and all rule premises are restricted to the induced
    subgraph. An orientation that would create a directed cycle raises
    InconsistentPdagError unless ``raise_on_cycle`` is false, in which case it
    is skipped (and tallied in ``stats['cycle_skips']`` when a dict is given).
    """
    allowed: Optional[Set[int]] = None if nodes is None else set(nodes)

    def inside(x: int) -> bool:
        return allowed is None or x in allowed

    def und_pairs() -> List[Tuple[int, int]]:
        return [
            (u, v)
            for u in range(pdag.n)
            if inside(u)
            for v in pdag.undirected_neighbors(u)
            if inside(v)
        ]

    changed = True
    while changed:
        changed = False
        for b, c in und_pairs():
            if pdag.mark(b, c) != UNDIRECTED:
                continue  # oriented earlier in this sweep

            # R1: a -> b, b - c, a and c nonadjacent  =>  b -> c
            fired = False
            for a in pdag.parents_of(b):
                if inside(a) and a != c and not pdag.adjacent(a, c):
                    fired = _try_orient(pdag, b, c, raise_on_cycle, stats)
                    break
            if fired:
                changed = True
                continue

            # R2: b -> a -> c with b - c  =>  b -> c
            for a in pdag.children_of(b):
                if inside(a) and a != c and pdag.has_directed(a, c):
                    fired = _try_orient(pdag, b, c, raise_on_cycle, stats)
                    break
            if fired:
                changed = True
                continue

            # R3: b - a1, b - a2, a1 -> c, a2 -> c, a1,a2 nonadjacent  =>  b -> c
            spokes = [
                a
                for a in pdag.undirected_neighbors(b)
                if inside(a) and a != c and pdag.has_directed(a, c)
            ]
            for a1, a2 in combinations(spokes, 2):
                if not pdag.adjacent(a1, a2):
                    fired = _try_orient(pdag, b, c, raise_on_cycle, stats)
                    break
            if fired:
                changed = True
                continue

            # R4: b - a, a -> d, d -> c, a,c nonadjacent, b,d adjacent  =>  b -> c
            for a in pdag.undirected_neighbors(b):
                if not inside(a) or a == c or pdag.adjacent(a, c):
                    continue
                for d in pdag.children_of(a):
                    if (
                        inside(d)
                        and d != b
                        and d != c
                        and pdag.has_directed(d, c)
                        and pdag.adjacent(b, d)
                    ):
                        fired = _try_orient(pdag, b, c, raise_on_cycle, stats)
                        break
                if fired:
                    break
            if fired:
                changed = True
    return pdag


def dag_to_cpdag(parent_sets: Sequence[Iterable[int]]) -> Pdag:
    """CPDAG of a DAG given as per-node parent collections.

    Starts from the skeleton, orients every v-structure (x -> z <- y with x, y
    nonadjacent), then closes under the Meek rules.
    """
    n = len(parent_sets)
    parents = [sorted(int(p) for p in ps) for ps in parent_sets]
    pdag = Pdag(n)
    adjacent: Set[frozenset] = set()
    for child, ps in enumerate(parents):
        for p in ps:
            if p == child or not 0 <= p < n:
                raise ValueError(f"bad parent {p} for node {child}")
            pdag.add_undirected(p, child)
            adjacent.add(frozenset((p, child)))
    for child, ps in enumerate(parents):
        for x, y in combinations(ps, 2):
            if frozenset((x, y)) not in adjacent:
                pdag.orient(x, child)
                pdag.orient(y, child)
    return meek_orient(pdag)
