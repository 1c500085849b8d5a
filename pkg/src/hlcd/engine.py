"""Queue-driven local causal discovery around a single target.

The engine interleaves three ingredients per popped variable Z:

1. skeleton growth: a PC-set search for Z, pruned by the score-gain
   equality/positivity predicate, merged into the working PDAG under the
   OR rule;
2. orientation: collider detection over pairs of Z's current neighbors,
   scored by the collider statistic;
3. propagation: Meek-rule closure restricted to the visited set.

It terminates when every edge at the target is directed, the expansion
queue empties, or every variable has been visited.

The core loop (run_local_discovery) is written against three injectable
callbacks so the same control flow serves both data-driven discovery and
the graph-oracle harness used for exactness checks.
"""
import math
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, Iterable, Optional, Sequence, Set, Tuple

from .data import DataError, Dataset
from .graphs import Pdag, meek_orient
from .pc_search import DataCi, PcOptions, fcbf_pc, hiton_pc_ci, pc_simple_ci
from .scoring import ScoreCache, ScoreConfig, collider_statistic, theorem1_holds


@dataclass(frozen=True)
class HlcdOptions:
    pc: PcOptions = field(default_factory=PcOptions)
    score: ScoreConfig = field(default_factory=ScoreConfig)
    require_nonadjacent_pairs: bool = True


@dataclass
class Diagnostics:
    """Work counters accumulated over one discover call."""

    iterations: int = 0
    pc_calls: int = 0
    ci_tests: int = 0
    score_evals: int = 0
    score_lookups: int = 0
    theorem1_removed: int = 0
    v_structures: int = 0
    conflicts: int = 0
    cycle_skips: int = 0
    identity_violations: int = 0


@dataclass(frozen=True)
class LocalDiscoveryResult:
    target: int
    parents: frozenset
    children: frozenset
    undirected: frozenset
    visited: Tuple[int, ...]
    pdag: Pdag
    diagnostics: Diagnostics
    names: Tuple[str, ...] = ()

    def _named(self, indices: Iterable[int]) -> Tuple[str, ...]:
        if not self.names:
            return tuple(str(i) for i in sorted(indices))
        return tuple(self.names[i] for i in sorted(indices))

    @property
    def parent_names(self) -> Tuple[str, ...]:
        return self._named(self.parents)

    @property
    def child_names(self) -> Tuple[str, ...]:
        return self._named(self.children)

    @property
    def undirected_names(self) -> Tuple[str, ...]:
        return self._named(self.undirected)


def classify_neighbors(pdag: Pdag, target: int) -> Tuple[Set[int], Set[int], Set[int]]:
    """Partition the target's neighbors by edge mark: (parents, children, undirected)."""
    return (
        set(pdag.parents_of(target)),
        set(pdag.children_of(target)),
        set(pdag.undirected_neighbors(target)),
    )


def prune_theorem1(
    dataset: Dataset,
    z: int,
    pc_set: Sequence[int],
    config: ScoreConfig,
    cache: Optional[ScoreCache] = None,
    diagnostics: Optional[Diagnostics] = None,
) -> Tuple[int, ...]:
    """Keep the pc_set members whose score gain toward z is symmetric and
    positive; order preserved."""
    kept = []
    for x in pc_set:
        if x == z:
            raise DataError(f"pc set of {z} contains itself")
        res = theorem1_holds(dataset, x, z, config, cache)
        if diagnostics is not None and not res.identity_ok:
            diagnostics.identity_violations += 1
        if res.keep:
            kept.append(x)
        elif diagnostics is not None:
            diagnostics.theorem1_removed += 1
    return tuple(kept)


def _apply_collider_edge(
    pdag: Pdag,
    x: int,
    z: int,
    strength: float,
    strengths: Dict[Tuple[int, int], float],
    diag: Diagnostics,
) -> bool:
    """Try to establish x -> z with the given evidence strength.

    Existing opposite orientations are flipped only when backed by weaker
    collider evidence; Meek-derived and pre-existing directions count as
    unflippable (infinite strength). Returns True when x -> z holds after
    the call.
    """
    if pdag.has_directed(x, z):
        return True
    if pdag.has_directed(z, x):
        diag.conflicts += 1
        if strength > strengths.get((z, x), math.inf):
            pdag.remove_edge(z, x)
            if pdag.orientation_creates_cycle(x, z):
                pdag.orient(z, x)  # put it back
                diag.cycle_skips += 1
                return False
            pdag.orient(x, z)
            strengths.pop((z, x), None)
            strengths[(x, z)] = strength
            return True
        return False
    if pdag.has_undirected(x, z):
        if pdag.orientation_creates_cycle(x, z):
            diag.cycle_skips += 1
            return False
        pdag.orient(x, z)
        strengths[(x, z)] = strength
        return True
    return False


def _detect_around(
    pdag: Pdag,
    z: int,
    collider_stat: Callable[[int, int, int], float],
    evaluated: Set[Tuple[int, int, int]],
    strengths: Dict[Tuple[int, int], float],
    diag: Diagnostics,
    require_nonadjacent: bool,
) -> None:
    for x, y in combinations(pdag.neighbors(z), 2):
        if require_nonadjacent and pdag.adjacent(x, y):
            continue
        key = (x, z, y)
        if key in evaluated:
            continue
        evaluated.add(key)
        stat = collider_stat(x, z, y)
        if stat > 0.0:
            diag.v_structures += 1
            _apply_collider_edge(pdag, x, z, abs(stat), strengths, diag)
            _apply_collider_edge(pdag, y, z, abs(stat), strengths, diag)


def detect_v_structures(
    dataset: Dataset,
    pdag: Pdag,
    z: int,
    config: ScoreConfig,
    options: Optional[HlcdOptions] = None,
    cache: Optional[ScoreCache] = None,
) -> list:
    """Collider detection around z against live data; orients pdag in place
    and returns the (wing, z) pairs that were directed by this call."""
    options = options or HlcdOptions(score=config)
    cache = cache or ScoreCache()
    diag = Diagnostics()
    before = {(u, v) for u, v, d in pdag.edges() if d}

    def stat(x: int, z_: int, y: int) -> float:
        return collider_statistic(dataset, x, z_, y, config, cache)

    _detect_around(
        pdag, z, stat, set(), {}, diag, options.require_nonadjacent_pairs,
    )
    after = [(u, v) for u, v, d in pdag.edges() if d and (u, v) not in before]
    return after


def run_local_discovery(
    n_vars: int,
    target: int,
    get_pc: Callable[[int], Sequence[int]],
    keep_edge: Callable[[int, int], bool],
    collider_stat: Callable[[int, int, int], float],
    *,
    require_nonadjacent_pairs: bool = True,
    names: Tuple[str, ...] = (),
    diagnostics: Optional[Diagnostics] = None,
) -> LocalDiscoveryResult:
    """The queue loop, independent of where its three callbacks come from."""
    if not 0 <= target < n_vars:
        raise DataError(f"target index {target} out of range for {n_vars} variables")
    diag = diagnostics if diagnostics is not None else Diagnostics()
    pdag = Pdag(n_vars)
    visited: list = []
    vset: Set[int] = set()
    queue: deque = deque([target])
    queued: Set[int] = {target}
    evaluated: Set[Tuple[int, int, int]] = set()
    strengths: Dict[Tuple[int, int], float] = {}
    meek_stats = {"cycle_skips": 0, "oriented": 0}

    while queue:
        z = queue.popleft()
        queued.discard(z)
        diag.iterations += 1
        touched = [z]
        if z not in vset:
            diag.pc_calls += 1
            pc = tuple(get_pc(z))
            kept = []
            for x in pc:
                if x == z:
                    raise DataError(f"pc set of {z} contains itself")
                if keep_edge(x, z):
                    kept.append(x)
                else:
                    diag.theorem1_removed += 1
            visited.append(z)
            vset.add(z)
            for x in kept:
                if pdag.add_undirected(x, z):
                    # the new edge makes x-centered triples with wing z live
                    touched.append(x)
            for x in sorted(kept):
                if x not in vset and x not in queued:
                    queue.append(x)
                    queued.add(x)
        for center in touched:
            _detect_around(
                pdag, center, collider_stat, evaluated, strengths, diag,
                require_nonadjacent_pairs,
            )
        # premises and orientations stay inside the visited set: adjacency
        # outside it is still unknown, so wider closure could misfire
        meek_orient(pdag, nodes=vset, raise_on_cycle=False, stats=meek_stats)
        if not pdag.undirected_neighbors(target):
            break  # every causal orientation at the target is determined
        if len(vset) == n_vars:
            break

    diag.cycle_skips += meek_stats["cycle_skips"]
    parents, children, undirected = classify_neighbors(pdag, target)
    return LocalDiscoveryResult(
        target=target,
        parents=frozenset(parents),
        children=frozenset(children),
        undirected=frozenset(undirected),
        visited=tuple(visited),
        pdag=pdag,
        diagnostics=diag,
        names=tuple(names),
    )


def discover(
    dataset: Dataset,
    target: int,
    options: Optional[HlcdOptions] = None,
    *,
    cache: Optional[ScoreCache] = None,
) -> LocalDiscoveryResult:
    """Data-driven local discovery around the target column."""
    options = options or HlcdOptions()
    cache = cache if cache is not None else ScoreCache()
    diag = Diagnostics()
    ci = DataCi(dataset, options.pc.alpha)

    if options.pc.algorithm == "pc-simple":
        def get_pc(z: int) -> Tuple[int, ...]:
            return pc_simple_ci(ci, z, options.pc.max_cond_size)
    elif options.pc.algorithm == "hiton":
        def get_pc(z: int) -> Tuple[int, ...]:
            return hiton_pc_ci(ci, z, options.pc.max_cond_size)
    else:
        def get_pc(z: int) -> Tuple[int, ...]:
            return fcbf_pc(dataset, z, options.pc)

    def keep_edge(x: int, z: int) -> bool:
        res = theorem1_holds(dataset, x, z, options.score, cache)
        if not res.identity_ok:
            diag.identity_violations += 1
        return res.keep

    def stat(x: int, z: int, y: int) -> float:
        return collider_statistic(dataset, x, z, y, options.score, cache)

    result = run_local_discovery(
        dataset.n_vars,
        target,
        get_pc,
        keep_edge,
        stat,
        require_nonadjacent_pairs=options.require_nonadjacent_pairs,
        names=dataset.names,
        diagnostics=diag,
    )
    diag.ci_tests = ci.n_tests
    diag.score_evals = cache.misses
    diag.score_lookups = cache.hits + cache.misses
    return result
