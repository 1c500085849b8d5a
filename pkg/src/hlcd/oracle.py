"""Brute-force and oracle machinery for small-scale exactness checks.

Provides exhaustive labeled-DAG enumeration, Markov-equivalence grouping,
a reference CPDAG built by orientation consensus (no Meek rules involved),
graph-oracle-driven discovery, and fuzzers for the score identities and the
d-separation routine. The CLI's verify subcommand drives everything here.
"""
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .data import Dataset
from .engine import (
    Diagnostics,
    HlcdOptions,
    LocalDiscoveryResult,
    run_local_discovery,
)
from .graphs import LocalStructure, Pdag, dag_to_cpdag
from .independence import mutual_information
from .network import d_separated, forward_sample, true_local_cpdag
from .pc_search import GraphCi, hiton_pc_ci, pc_simple_ci
from .scoring import ScoreCache, ScoreConfig, collider_statistic, gain, graph_score

ParentSets = Tuple[Tuple[int, ...], ...]

# labeled DAG counts by node count, for self-checks of the enumerator
DAG_COUNTS = (1, 1, 3, 25, 543, 29281, 3781503)


class GraphView:
    """Minimal DAG carrier satisfying the graph-query interface that
    d_separated, true_pc and cpdag_of rely on."""

    __slots__ = ("_parents", "_children", "_adjacent")

    def __init__(self, parent_sets: Sequence[Sequence[int]]):
        self._parents = tuple(tuple(sorted(p)) for p in parent_sets)
        kids: List[List[int]] = [[] for _ in parent_sets]
        adj = [set() for _ in parent_sets]
        for v, ps in enumerate(self._parents):
            for u in ps:
                kids[u].append(v)
                adj[u].add(v)
                adj[v].add(u)
        self._children = tuple(tuple(sorted(c)) for c in kids)
        self._adjacent = tuple(frozenset(a) for a in adj)

    @property
    def n_vars(self) -> int:
        return len(self._parents)

    def parents_of(self, i: int) -> Tuple[int, ...]:
        return self._parents[i]

    def children_of(self, i: int) -> Tuple[int, ...]:
        return self._children[i]

    def adjacent(self, a: int, b: int) -> bool:
        return b in self._adjacent[a]


def enumerate_dags(k: int) -> Iterator[ParentSets]:
    """Yield every labeled DAG on k nodes exactly once, as parent tuples.

    Each unordered pair branches three ways (absent, one direction, the
    other); acyclicity is maintained incrementally via reachability masks.
    """
    if k < 0:
        raise ValueError("node count must be >= 0")
    pairs = [(u, v) for u in range(k) for v in range(u + 1, k)]
    parents: List[List[int]] = [[] for _ in range(k)]
    reach = [1 << u for u in range(k)]  # reach[u]: nodes reachable from u

    def add_edge(u: int, v: int) -> List[int]:
        saved = reach[:]
        rv = reach[v]
        for w in range(k):
            if (reach[w] >> u) & 1:
                reach[w] |= rv
        return saved

    def rec(i: int) -> Iterator[ParentSets]:
        if i == len(pairs):
            yield tuple(tuple(sorted(p)) for p in parents)
            return
        u, v = pairs[i]
        yield from rec(i + 1)
        if not (reach[v] >> u) & 1:  # u -> v keeps it acyclic
            saved = add_edge(u, v)
            parents[v].append(u)
            yield from rec(i + 1)
            parents[v].pop()
            reach[:] = saved
        if not (reach[u] >> v) & 1:
            saved = add_edge(v, u)
            parents[u].append(v)
            yield from rec(i + 1)
            parents[u].pop()
            reach[:] = saved

    return rec(0)


def skeleton_of(parent_sets: ParentSets) -> FrozenSet[Tuple[int, int]]:
    return frozenset(
        (min(u, v), max(u, v)) for v, ps in enumerate(parent_sets) for u in ps
    )


def v_structures_of(parent_sets: ParentSets) -> FrozenSet[Tuple[int, int, int]]:
    """All (x, z, y) with x < y, x -> z <- y, and x, y nonadjacent."""
    skel = skeleton_of(parent_sets)
    out = set()
    for z, ps in enumerate(parent_sets):
        for x, y in combinations(sorted(ps), 2):
            if (x, y) not in skel:
                out.add((x, z, y))
    return frozenset(out)


def class_key(parent_sets: ParentSets):
    """Two DAGs share this key iff they are Markov equivalent."""
    return (skeleton_of(parent_sets), v_structures_of(parent_sets))


def brute_force_cpdag(parent_sets: ParentSets) -> Pdag:
    """Reference CPDAG by raw enumeration, bypassing the Meek rules.

    All acyclic orientations of the DAG's skeleton with the same v-structure
    set are generated; an edge is directed in the output iff every member of
    that class orients it the same way.
    """
    n = len(parent_sets)
    skel = sorted(skeleton_of(parent_sets))
    want_vs = v_structures_of(parent_sets)
    members: List[ParentSets] = []
    parents: List[List[int]] = [[] for _ in range(n)]
    reach = [1 << u for u in range(n)]

    def rec(i: int) -> None:
        if i == len(skel):
            cand = tuple(tuple(sorted(p)) for p in parents)
            if v_structures_of(cand) == want_vs:
                members.append(cand)
            return
        u, v = skel[i]
        for a, b in ((u, v), (v, u)):
            if not (reach[b] >> a) & 1:
                saved = reach[:]
                rb = reach[b]
                for w in range(n):
                    if (reach[w] >> a) & 1:
                        reach[w] |= rb
                parents[b].append(a)
                rec(i + 1)
                parents[b].pop()
                reach[:] = saved

    rec(0)
    assert members, "a DAG is always a member of its own class"
    pdag = Pdag(n)
    for u, v in skel:
        pdag.add_undirected(u, v)
        into_v = [u in m[v] for m in members]
        if all(into_v):
            pdag.orient(u, v)
        elif not any(into_v):
            pdag.orient(v, u)
    return pdag


def consensus_cpdag(members: Sequence[ParentSets]) -> Pdag:
    """Consensus orientation over the given Markov class members."""
    n = len(members[0])
    pdag = Pdag(n)
    for u, v in sorted(skeleton_of(members[0])):
        pdag.add_undirected(u, v)
        into_v = [u in m[v] for m in members]
        if all(into_v):
            pdag.orient(u, v)
        elif not any(into_v):
            pdag.orient(v, u)
    return pdag


def oracle_discover(
    network,
    target: int,
    options: Optional[HlcdOptions] = None,
    *,
    mode: str = "graph",
    n: int = 50000,
    seed: int = 0,
) -> LocalDiscoveryResult:
    """Run the discovery engine with its three data-facing callbacks replaced
    by graph oracles (mode="graph"), or on a large sample drawn from the
    network so the real scoring paths run near their limits
    (mode="asymptotic").
    """
    options = options or HlcdOptions()
    if mode == "asymptotic":
        from .engine import discover

        return discover(forward_sample(network, n, seed), target, options)
    if mode != "graph":
        raise ValueError(f"unknown oracle mode {mode!r}")

    ci = GraphCi(network)
    if options.pc.algorithm == "hiton":
        def get_pc(z: int) -> Tuple[int, ...]:
            return hiton_pc_ci(ci, z, options.pc.max_cond_size)
    else:
        # fcbf has no conditional-independence form; pc-simple covers it here
        def get_pc(z: int) -> Tuple[int, ...]:
            return pc_simple_ci(ci, z, options.pc.max_cond_size)

    def keep_edge(x: int, z: int) -> bool:
        return network.adjacent(x, z)

    def stat(x: int, z: int, y: int) -> float:
        # +1 exactly on true colliders: x -> z <- y with x, y nonadjacent
        ps = network.parents_of(z)
        if x in ps and y in ps and not network.adjacent(x, y):
            return 1.0
        return -1.0

    diag = Diagnostics()
    result = run_local_discovery(
        network.n_vars,
        target,
        get_pc,
        keep_edge,
        stat,
        require_nonadjacent_pairs=options.require_nonadjacent_pairs,
        names=tuple(getattr(network, "names", ())),
        diagnostics=diag,
    )
    diag.ci_tests = ci.n_tests
    return result


def matches_truth(result: LocalDiscoveryResult, truth: LocalStructure) -> bool:
    return (
        set(result.parents) == set(truth.parents)
        and set(result.children) == set(truth.children)
        and set(result.undirected) == set(truth.undirected)
    )


def _dsep_reference(view: GraphView, x: int, y: int, z: FrozenSet[int]) -> bool:
    """Moralized-ancestral-graph d-separation, as an independent cross-check."""
    relevant = set(z) | {x, y}
    frontier = list(relevant)
    while frontier:
        u = frontier.pop()
        for p in view.parents_of(u):
            if p not in relevant:
                relevant.add(p)
                frontier.append(p)
    # moralize the ancestral subgraph
    und = {u: set() for u in relevant}
    for v in relevant:
        ps = [p for p in view.parents_of(v) if p in relevant]
        for p in ps:
            und[p].add(v)
            und[v].add(p)
        for a, b in combinations(ps, 2):
            und[a].add(b)
            und[b].add(a)
    # connectivity avoiding z
    stack = [x]
    seen = {x}
    while stack:
        u = stack.pop()
        if u == y:
            return False
        for w in und[u]:
            if w not in seen and w not in z:
                seen.add(w)
                stack.append(w)
    return True


def fuzz_dsep(trials: int, seed: int = 0) -> Dict[str, object]:
    """Random DAG/query fuzz of the ball-passing d-separation routine
    against the moralization reference."""
    rng = np.random.default_rng(seed)
    mismatches = 0
    for _ in range(trials):
        k = int(rng.integers(3, 8))
        order = rng.permutation(k)
        parents: List[List[int]] = [[] for _ in range(k)]
        for pos in range(1, k):
            for prev in range(pos):
                if rng.random() < 0.4:
                    parents[order[pos]].append(int(order[prev]))
        view = GraphView(parents)
        others = list(range(k))
        x, y = rng.choice(k, size=2, replace=False)
        x, y = int(x), int(y)
        rest = [v for v in others if v not in (x, y)]
        z = frozenset(
            int(v) for v in rng.choice(rest, size=int(rng.integers(0, len(rest) + 1)), replace=False)
        ) if rest else frozenset()
        if d_separated(view, x, y, z) != _dsep_reference(view, x, y, z):
            mismatches += 1
    return {"trials": trials, "mismatches": mismatches}


def _random_dataset(rng: np.random.Generator) -> Dataset:
    n_vars = int(rng.integers(2, 5))
    arities = rng.integers(2, 5, size=n_vars)
    n_rows = int(rng.integers(4, 501))
    # mix independent and strongly coupled columns so zero count cells occur
    rows = rng.integers(0, arities, size=(n_rows, n_vars))
    if n_vars >= 2 and rng.random() < 0.5:
        rows[:, 1] = np.minimum(rows[:, 0], arities[1] - 1)
    names = tuple(f"X{i}" for i in range(n_vars))
    return Dataset(names, tuple(int(a) for a in arities), rows)


def _rel_dev(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


def fuzz_score_identities(trials: int, seed: int = 0) -> Dict[str, float]:
    """Random-dataset fuzz of the exact score identities.

    Checks, per trial and per criterion: gain symmetry gain(x,t) == gain(t,x);
    collider-statistic symmetry in its outer arguments; and for the
    log-likelihood criterion, gain == N * MI(x,t) - (r_x-1)(r_t-1).
    Returns the maximum relative deviation seen for each identity.
    """
    rng = np.random.default_rng(seed)
    report = {
        "trials": float(trials),
        "max_gain_dev_aic": 0.0,
        "max_gain_dev_bdeu": 0.0,
        "max_collider_sym_dev": 0.0,
        "max_aic_mi_dev": 0.0,
    }
    for _ in range(trials):
        ds = _random_dataset(rng)
        cache = ScoreCache()
        x, t = (int(v) for v in rng.choice(ds.n_vars, size=2, replace=False))
        for crit in ("aic", "bdeu"):
            cfg = ScoreConfig(criterion=crit)
            g_xt = gain(ds, x, t, cfg, cache)
            g_tx = gain(ds, t, x, cfg, cache)
            key = f"max_gain_dev_{crit}"
            report[key] = max(report[key], _rel_dev(g_xt, g_tx))
        cfg = ScoreConfig(criterion="aic")
        mi_form = ds.n_rows * mutual_information(ds, x, t) - (
            (ds.arities[x] - 1) * (ds.arities[t] - 1)
        )
        report["max_aic_mi_dev"] = max(
            report["max_aic_mi_dev"], _rel_dev(gain(ds, x, t, cfg, cache), mi_form)
        )
        if ds.n_vars >= 3:
            z = next(
                int(v) for v in rng.permutation(ds.n_vars) if v not in (x, t)
            )
            for crit in ("aic", "bdeu"):
                cfg = ScoreConfig(criterion=crit)
                s1 = collider_statistic(ds, x, z, t, cfg, cache)
                s2 = collider_statistic(ds, t, z, x, cfg, cache)
                report["max_collider_sym_dev"] = max(
                    report["max_collider_sym_dev"], _rel_dev(s1, s2)
                )
    return report


def check_class_score_ties(
    max_nodes: int = 4, datasets: int = 100, seed: int = 0
) -> Dict[str, float]:
    """Markov-equivalent DAGs must score identically on any dataset.

    For every equivalence class on up to max_nodes variables and `datasets`
    fuzzed datasets, returns the maximum relative score spread within a class
    (per criterion).
    """
    rng = np.random.default_rng(seed)
    classes_by_k: Dict[int, List[List[ParentSets]]] = {}
    for k in range(2, max_nodes + 1):
        grouped: Dict[object, List[ParentSets]] = {}
        for dag in enumerate_dags(k):
            grouped.setdefault(class_key(dag), []).append(dag)
        classes_by_k[k] = list(grouped.values())
    report = {"datasets": float(datasets), "max_tie_dev_aic": 0.0, "max_tie_dev_bdeu": 0.0}
    for _ in range(datasets):
        arities = rng.integers(2, 4, size=max_nodes)
        n_rows = int(rng.integers(20, 200))
        rows = rng.integers(0, arities, size=(n_rows, max_nodes))
        for k, class_list in classes_by_k.items():
            names = tuple(f"X{i}" for i in range(k))
            ds = Dataset(names, tuple(int(a) for a in arities[:k]), rows[:, :k])
            for crit in ("aic", "bdeu"):
                cfg = ScoreConfig(criterion=crit)
                cache = ScoreCache()
                key = f"max_tie_dev_{crit}"
                for members in class_list:
                    if len(members) == 1:
                        continue
                    scores = [graph_score(ds, m, cfg, cache) for m in members]
                    lo, hi = min(scores), max(scores)
                    report[key] = max(report[key], _rel_dev(lo, hi))
    return report


@dataclass
class VerifyCheck:
    name: str
    passed: bool
    detail: str


@dataclass
class VerifyReport:
    checks: List[VerifyCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str) -> None:
        self.checks.append(VerifyCheck(name, bool(passed), detail))


def _check_oracle_on_graph(view, cpdag: Optional[Pdag] = None) -> int:
    """Number of targets where oracle discovery deviates from the true local
    CPDAG classification."""
    mismatches = 0
    for t in range(view.n_vars):
        truth = true_local_cpdag(view, t, cpdag)
        if not matches_truth(oracle_discover(view, t), truth):
            mismatches += 1
    return mismatches


def run_verification(
    max_nodes: int = 5,
    *,
    sample6: int = 1000,
    fuzz_trials: int = 1000,
    class_datasets: int = 100,
    dsep_trials: int = 500,
    seed: int = 0,
    networks: Optional[Sequence[Tuple[str, object]]] = None,
    log: Optional[Callable[[str], None]] = None,
) -> VerifyReport:
    """The full self-verification suite; every check lands in the report.

    networks: optional (label, Network) pairs also swept exhaustively.
    """
    if not 1 <= max_nodes <= 6:
        raise ValueError("max_nodes must be in 1..6")
    report = VerifyReport()

    def say(msg: str) -> None:
        if log is not None:
            log(msg)

    tol = 1e-9

    say("fuzzing d-separation against the moralization reference")
    dsep = fuzz_dsep(dsep_trials, seed)
    report.add(
        "dsep-fuzz",
        dsep["mismatches"] == 0,
        f"{dsep['trials']} random queries, {dsep['mismatches']} mismatches",
    )

    say("fuzzing score identities")
    ids = fuzz_score_identities(fuzz_trials, seed)
    worst = max(v for k, v in ids.items() if k.startswith("max_"))
    report.add(
        "score-identities",
        worst <= tol,
        f"{fuzz_trials} datasets, max relative deviation {worst:.2e}",
    )

    say("checking equivalence-class score ties")
    ties = check_class_score_ties(min(max_nodes, 4), class_datasets, seed)
    worst = max(ties["max_tie_dev_aic"], ties["max_tie_dev_bdeu"])
    report.add(
        "class-score-ties",
        worst <= tol,
        f"{class_datasets} datasets, classes on <= {min(max_nodes, 4)} nodes, "
        f"max relative spread {worst:.2e}",
    )

    for k in range(1, max_nodes + 1):
        say(f"enumerating DAGs on {k} node(s)")
        grouped: Dict[object, List[ParentSets]] = {}
        count = 0
        for dag in enumerate_dags(k):
            count += 1
            grouped.setdefault(class_key(dag), []).append(dag)
        report.add(
            f"dag-count-k{k}",
            count == DAG_COUNTS[k],
            f"{count} DAGs (expected {DAG_COUNTS[k]})",
        )

        say(f"cross-checking CPDAG construction on {k} node(s)")
        bad_cpdag = 0
        for members in grouped.values():
            reference = consensus_cpdag(members)
            for m in members:
                if dag_to_cpdag(m) != reference:
                    bad_cpdag += 1
        report.add(
            f"cpdag-consensus-k{k}",
            bad_cpdag == 0,
            f"{len(grouped)} classes, {bad_cpdag} Meek-closure disagreements",
        )

        say(f"oracle discovery sweep on {k} node(s)")
        bad = 0
        runs = 0
        for members in grouped.values():
            for m in members:
                view = GraphView(m)
                runs += view.n_vars
                bad += _check_oracle_on_graph(view, dag_to_cpdag(m))
        report.add(
            f"oracle-discover-k{k}",
            bad == 0,
            f"{runs} target runs over {count} DAGs, {bad} mismatches",
        )

    if max_nodes < 6 and sample6 > 0:
        say(f"oracle discovery on {sample6} sampled 6-node DAGs")
        rng = np.random.default_rng(seed)
        bad = 0
        runs = 0
        for _ in range(sample6):
            order = rng.permutation(6)
            parents: List[List[int]] = [[] for _ in range(6)]
            for pos in range(1, 6):
                for prev in range(pos):
                    if rng.random() < 0.4:
                        parents[order[pos]].append(int(order[prev]))
            view = GraphView(parents)
            runs += 6
            bad += _check_oracle_on_graph(view)
        report.add(
            "oracle-discover-6-sample",
            bad == 0,
            f"{runs} target runs over {sample6} random 6-node DAGs, {bad} mismatches",
        )

    say("checking PC-search oracles on 4 nodes")
    # CI pruning over the surviving candidate set may keep a non-neighbor
    # whose separating set needs an already-removed node (possible whenever
    # the target is not a sink), so exactness is too strong to demand here.
    # What must hold is soundness: no true PC member is ever discarded.
    # The engine removes the overshoot afterwards via the edge predicate.
    lost = 0
    overshoot = 0
    for dag in enumerate_dags(4):
        view = GraphView(dag)
        for t in range(4):
            want = set(dag[t]) | set(view.children_of(t))
            ci = GraphCi(view)
            for found in (pc_simple_ci(ci, t), hiton_pc_ci(ci, t)):
                if not want.issubset(found):
                    lost += 1
                elif set(found) != want:
                    overshoot += 1
    report.add(
        "pc-oracle-k4",
        lost == 0,
        f"pc-simple and hiton vs true PC on all 4-node DAGs, "
        f"{lost} lost members, {overshoot} supersets pruned downstream",
    )

    for label, net in networks or ():
        say(f"oracle discovery sweep on {label}")
        cpdag = dag_to_cpdag([net.parents_of(i) for i in range(net.n_vars)])
        bad = _check_oracle_on_graph(net, cpdag)
        report.add(
            f"oracle-discover-{label}",
            bad == 0,
            f"{net.n_vars} targets, {bad} mismatches",
        )

    return report
