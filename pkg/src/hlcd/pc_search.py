"""Candidate parent-child (PC) set discovery.

Three variants are provided: pc_simple (level-wise conditional-independence
pruning), hiton_pc (interleaved inclusion/elimination), and fcbf_pc
(information-theoretic relevance/redundancy filtering). A fourth operation,
or_merge, fuses per-node PC sets into an undirected skeleton.

All variants are deterministic: candidates are scanned in ascending index
order and conditioning subsets are enumerated lexicographically.
"""
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

from .data import DataError, Dataset
from .graphs import Pdag
from .independence import (
    g2_test,
    is_independent,
    mutual_information,
    symmetric_uncertainty,
)

ALGORITHMS = ("pc-simple", "hiton", "fcbf")
FCBF_MEASURES = ("su", "mi")


@dataclass(frozen=True)
class PcOptions:
    """Knobs shared by the PC-set discovery variants."""

    algorithm: str = "pc-simple"
    alpha: float = 0.01
    mi_threshold: float = 0.03
    max_cond_size: Optional[int] = None
    fcbf_measure: str = "su"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown PC algorithm {self.algorithm!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")
        if self.mi_threshold < 0.0:
            raise ValueError("mi_threshold must be >= 0")
        if self.max_cond_size is not None and self.max_cond_size < 0:
            raise ValueError("max_cond_size must be >= 0")
        if self.fcbf_measure not in FCBF_MEASURES:
            raise ValueError(f"unknown fcbf_measure {self.fcbf_measure!r}")


class DataCi:
    """G2-backed conditional-independence queries with memoization.

    strength() returns a sort key for marginal association ranking: smaller
    means stronger (p-value ascending, then statistic descending).
    """

    def __init__(self, dataset: Dataset, alpha: float):
        self.dataset = dataset
        self.alpha = alpha
        self.n_vars = dataset.n_vars
        self.n_tests = 0
        self._cache: Dict[Tuple[int, int, Tuple[int, ...]], bool] = {}

    def independent(self, x: int, y: int, z: Sequence[int] = ()) -> bool:
        a, b = (x, y) if x < y else (y, x)
        key = (a, b, tuple(sorted(z)))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        self.n_tests += 1
        verdict = is_independent(g2_test(self.dataset, a, b, key[2]), self.alpha)
        self._cache[key] = verdict
        return verdict

    def strength(self, x: int, y: int) -> Tuple[float, float]:
        res = g2_test(self.dataset, min(x, y), max(x, y))
        return (res.p_value, -res.g2)


class GraphCi:
    """d-separation oracle with the same query interface as DataCi."""

    def __init__(self, network):
        from .network import d_separated

        self._dsep = d_separated
        self.network = network
        self.n_vars = network.n_vars
        self.n_tests = 0

    def independent(self, x: int, y: int, z: Sequence[int] = ()) -> bool:
        self.n_tests += 1
        return self._dsep(self.network, x, y, frozenset(z))

    def strength(self, x: int, y: int) -> Tuple[float, float]:
        # every dependent pair ranks equal; ties break by index downstream
        return (0.0, 0.0)


def _check_target(n_vars: int, target: int) -> None:
    if not 0 <= target < n_vars:
        raise DataError(f"target index {target} out of range for {n_vars} variables")


def pc_simple_ci(ci, target: int, max_cond_size: Optional[int] = None) -> Tuple[int, ...]:
    """Level-wise PC pruning against an arbitrary CI backend."""
    _check_target(ci.n_vars, target)
    cands = [x for x in range(ci.n_vars) if x != target and not ci.independent(target, x)]
    level = 1
    while True:
        limit = len(cands) - 1
        if max_cond_size is not None:
            limit = min(limit, max_cond_size)
        if level > limit:
            break
        for x in list(cands):
            if x not in cands:
                continue
            pool = [c for c in cands if c != x]
            if len(pool) < level:
                continue
            for sub in combinations(pool, level):
                if ci.independent(target, x, sub):
                    cands.remove(x)
                    break
        level += 1
    return tuple(cands)


def hiton_pc_ci(ci, target: int, max_cond_size: Optional[int] = None) -> Tuple[int, ...]:
    """Interleaved HITON-PC against an arbitrary CI backend."""
    _check_target(ci.n_vars, target)
    open_list = [x for x in range(ci.n_vars) if x != target and not ci.independent(target, x)]
    open_list.sort(key=lambda x: (ci.strength(target, x), x))
    tpc: list = []
    for cand in open_list:
        tpc.append(cand)
        # elimination pass over the current tentative set
        for x in list(tpc):
            if x not in tpc:
                continue
            others = [m for m in tpc if m != x]
            removed = False
            top = len(others)
            if max_cond_size is not None:
                top = min(top, max_cond_size)
            for size in range(1, top + 1):
                for sub in combinations(others, size):
                    if ci.independent(target, x, sub):
                        tpc.remove(x)
                        removed = True
                        break
                if removed:
                    break
    return tuple(sorted(tpc))


def pc_simple(dataset: Dataset, target: int, options: PcOptions) -> Tuple[int, ...]:
    return pc_simple_ci(DataCi(dataset, options.alpha), target, options.max_cond_size)


def hiton_pc(dataset: Dataset, target: int, options: PcOptions) -> Tuple[int, ...]:
    return hiton_pc_ci(DataCi(dataset, options.alpha), target, options.max_cond_size)


def fcbf_pc(dataset: Dataset, target: int, options: PcOptions) -> Tuple[int, ...]:
    """Relevance filter on SU (or raw MI), then predominance-based redundancy
    removal scanning by descending association with the target."""
    _check_target(dataset.n_vars, target)
    if options.fcbf_measure == "su":
        measure = symmetric_uncertainty
    else:
        measure = mutual_information
    relevance = {}
    for x in range(dataset.n_vars):
        if x == target:
            continue
        value = measure(dataset, x, target)
        if value > options.mi_threshold:
            relevance[x] = value
    order = sorted(relevance, key=lambda x: (-relevance[x], x))
    kept: list = []
    for x in order:
        redundant = False
        for y in kept:
            if measure(dataset, x, y) >= relevance[x]:
                redundant = True
                break
        if not redundant:
            kept.append(x)
    return tuple(sorted(kept))


def run_pc(dataset: Dataset, target: int, options: PcOptions) -> Tuple[int, ...]:
    """Dispatch to the variant named in the options."""
    if options.algorithm == "pc-simple":
        return pc_simple(dataset, target, options)
    if options.algorithm == "hiton":
        return hiton_pc(dataset, target, options)
    return fcbf_pc(dataset, target, options)


def or_merge(pc_sets: Mapping[int, Iterable[int]], n_vars: int) -> Pdag:
    """Skeleton under the OR rule: edge x-z iff x is in pc(z) or z is in pc(x).

    pc_sets may cover only a subset of nodes; one-sided membership suffices.
    """
    pdag = Pdag(n_vars)
    for z in sorted(pc_sets):
        for x in sorted(pc_sets[z]):
            if x == z:
                raise DataError(f"pc set of {z} contains itself")
            pdag.add_undirected(x, z)
    return pdag
