"""Decomposable local scores (AIC, BDeu) and the score-based edge predicates."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from .data import DataError, Dataset, count

__all__ = [
    "ScoreConfig",
    "ScoreCache",
    "local_score",
    "gain",
    "Theorem1Result",
    "theorem1_holds",
    "collider_statistic",
    "graph_score",
]

CRITERIA = ("aic", "bdeu")


@dataclass(frozen=True)
class ScoreConfig:
    """Which decomposable criterion to use and its knobs.

    ``ess`` is the BDeu equivalent sample size; ``eq_tol`` is the relative
    tolerance for the score-gain symmetry identity.
    """

    criterion: str = "bdeu"
    ess: float = 1.0
    eq_tol: float = 1e-9

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise ValueError(f"unknown score criterion {self.criterion!r}")
        if self.ess <= 0:
            raise ValueError("ess must be positive")
        if self.eq_tol < 0:
            raise ValueError("eq_tol must be nonnegative")


class ScoreCache:
    """Memo of local scores keyed by (child, sorted parent tuple).

    One cache serves one (dataset, config) pair; values are deterministic so
    concurrent use from one process only ever stores identical entries.
    """

    def __init__(self):
        self._store: dict = {}
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._store)

    def lookup(self, child: int, parents: Tuple[int, ...]) -> Optional[float]:
        return self._store.get((child, parents))

    def get_or_compute(self, child: int, parents: Tuple[int, ...], fn) -> float:
        key = (child, parents)
        found = self._store.get(key)
        if found is not None:
            self.hits += 1
            return found
        value = fn()
        self._store[key] = value
        self.misses += 1
        return value


def _canonical_parents(parents: Iterable[int]) -> Tuple[int, ...]:
    return tuple(sorted(int(p) for p in parents))


def _aic_local(dataset: Dataset, child: int, parents: Tuple[int, ...]) -> float:
    table = count(dataset, child, parents)
    counts = table.counts.astype(np.float64)
    totals = counts.sum(axis=1)
    nz = counts > 0
    loglik = float(np.sum(counts[nz] * np.log(counts[nz])))
    pos = totals > 0
    loglik -= float(np.sum(totals[pos] * np.log(totals[pos])))
    penalty = (table.r_child - 1) * table.q
    return loglik - penalty


def _bdeu_local(
    dataset: Dataset, child: int, parents: Tuple[int, ...], ess: float
) -> float:
    table = count(dataset, child, parents)
    q = table.q
    r = table.r_child
    a_j = ess / q
    a_jk = ess / (q * r)
    counts = table.counts
    totals = counts.sum(axis=1)
    # configurations with no rows contribute exactly zero
    occupied = totals > 0
    n_j = totals[occupied].astype(np.float64)
    n_jk = counts[occupied].astype(np.float64)
    score = float(np.sum(gammaln(a_j) - gammaln(n_j + a_j)))
    score += float(np.sum(gammaln(n_jk + a_jk) - gammaln(a_jk)))
    return score


def local_score(
    dataset: Dataset,
    child: int,
    parents: Sequence[int],
    config: ScoreConfig,
    cache: Optional[ScoreCache] = None,
) -> float:
    """Decomposable local score of ``child`` given ``parents``."""
    canon = _canonical_parents(parents)
    if len(set(canon)) != len(canon):
        raise DataError("duplicate parent index")

    def compute() -> float:
        if config.criterion == "aic":
            return _aic_local(dataset, child, canon)
        return _bdeu_local(dataset, child, canon, config.ess)

    if cache is None:
        return compute()
    return cache.get_or_compute(child, canon, compute)


def gain(
    dataset: Dataset,
    x: int,
    t: int,
    config: ScoreConfig,
    cache: Optional[ScoreCache] = None,
) -> float:
    """Score improvement of adding the single parent x to an orphan t."""
    return local_score(dataset, t, (x,), config, cache) - local_score(
        dataset, t, (), config, cache
    )


@dataclass(frozen=True)
class Theorem1Result:
    keep: bool
    gain_xt: float
    gain_tx: float
    identity_ok: bool


def theorem1_holds(
    dataset: Dataset,
    x: int,
    t: int,
    config: ScoreConfig,
    cache: Optional[ScoreCache] = None,
) -> Theorem1Result:
    """Keep the candidate edge x - t?

    The single-parent score gain is symmetric in the two endpoints (an exact
    identity for both criteria at the empirical counts), so the edge survives
    when that identity holds within ``eq_tol`` (relative) and the gain is
    strictly positive.
    """
    g_xt = gain(dataset, x, t, config, cache)
    g_tx = gain(dataset, t, x, config, cache)
    scale = max(1.0, abs(g_xt), abs(g_tx))
    identity_ok = abs(g_xt - g_tx) <= config.eq_tol * scale
    return Theorem1Result(
        keep=bool(identity_ok and g_xt > 0.0),
        gain_xt=g_xt,
        gain_tx=g_tx,
        identity_ok=identity_ok,
    )


def collider_statistic(
    dataset: Dataset,
    x: int,
    z: int,
    y: int,
    config: ScoreConfig,
    cache: Optional[ScoreCache] = None,
) -> float:
    """Score evidence that x and y collide at z.

    [S(z | x,y) - S(z | y)] - [S(z | x) - S(z)]: positive favors the collider
    x -> z <- y over the alternatives in which x - z - y is serial/divergent.
    Symmetric in x and y.
    """
    if len({x, z, y}) != 3:
        raise DataError("collider statistic needs three distinct variables")
    s_xy = local_score(dataset, z, (x, y), config, cache)
    s_y = local_score(dataset, z, (y,), config, cache)
    s_x = local_score(dataset, z, (x,), config, cache)
    s_0 = local_score(dataset, z, (), config, cache)
    return (s_xy - s_y) - (s_x - s_0)


def graph_score(
    dataset: Dataset,
    parent_sets: Sequence[Iterable[int]],
    config: ScoreConfig,
    cache: Optional[ScoreCache] = None,
) -> float:
    """Sum of local scores over all nodes of a DAG given as parent sets."""
    if len(parent_sets) != dataset.n_vars:
        raise DataError("parent_sets length must equal the variable count")
    return sum(
        local_score(dataset, child, ps, config, cache)
        for child, ps in enumerate(parent_sets)
    )
