"""Structural metrics, result aggregation, and ablation counters.

Metrics are local: only edges incident to the discovery target are compared,
against the true DAG's edges at that node. A learned directed edge is correct
only when its direction matches; learned undirected edges are never correct
(they land in the undirected SHD component) unless credit_undirected is set,
which relaxes precision/recall only.
"""
import csv
import math
import os
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .data import Dataset
from .engine import LocalDiscoveryResult
from .network import Network
from .scoring import ScoreCache, ScoreConfig, collider_statistic, theorem1_holds

CSV_COLUMNS = (
    "network",
    "algorithm",
    "score",
    "n",
    "replicate",
    "target",
    "f1",
    "precision",
    "recall",
    "shd",
    "undirected",
    "reversed",
    "missing",
    "extra",
    "runtime_s",
)


@dataclass(frozen=True)
class ShdBreakdown:
    undirected: float
    reversed: float
    missing: float
    extra: float

    @property
    def total(self) -> float:
        return self.undirected + self.reversed + self.missing + self.extra


@dataclass(frozen=True)
class MetricRow:
    f1: float
    precision: float
    recall: float
    shd: ShdBreakdown
    runtime_s: float = 0.0


def _safe_ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def local_metrics(
    learned: LocalDiscoveryResult,
    truth: Network,
    *,
    credit_undirected: bool = False,
    runtime_s: float = 0.0,
) -> MetricRow:
    """Compare a discovery result against the generating network, at the
    target only."""
    if learned.names and tuple(learned.names) != truth.names:
        raise ValueError("variable names of result and network do not match")
    if learned.pdag.n != truth.n_vars:
        raise ValueError("variable counts of result and network do not match")
    t = learned.target
    true_parents = set(truth.parents_of(t))
    true_children = set(truth.children_of(t))
    true_adjacent = true_parents | true_children

    correct = len(learned.parents & true_parents) + len(
        learned.children & true_children
    )
    reversed_ = len(learned.parents & true_children) + len(
        learned.children & true_parents
    )
    undirected_hits = len(learned.undirected & true_adjacent)
    learned_all = learned.parents | learned.children | learned.undirected
    extra = len(learned_all - true_adjacent)
    missing = len(true_adjacent - learned_all)

    n_learned = len(learned_all)
    n_truth = len(true_adjacent)
    credited = correct + undirected_hits if credit_undirected else correct
    precision = _safe_ratio(credited, n_learned)
    recall = _safe_ratio(credited, n_truth)
    f1 = _safe_ratio(2.0 * precision * recall, precision + recall)
    return MetricRow(
        f1=f1,
        precision=precision,
        recall=recall,
        shd=ShdBreakdown(
            undirected=float(undirected_hits),
            reversed=float(reversed_),
            missing=float(missing),
            extra=float(extra),
        ),
        runtime_s=runtime_s,
    )


METRIC_KEYS = (
    "f1",
    "precision",
    "recall",
    "shd",
    "undirected",
    "reversed",
    "missing",
    "extra",
    "runtime_s",
)


def _row_values(row: MetricRow) -> Dict[str, float]:
    return {
        "f1": row.f1,
        "precision": row.precision,
        "recall": row.recall,
        "shd": row.shd.total,
        "undirected": row.shd.undirected,
        "reversed": row.shd.reversed,
        "missing": row.shd.missing,
        "extra": row.shd.extra,
        "runtime_s": row.runtime_s,
    }


def aggregate(
    groups: Mapping[int, Sequence[MetricRow]]
) -> Dict[str, Tuple[float, float]]:
    """Mean and population std of each metric over per-replicate means.

    groups maps a replicate id to that replicate's per-target rows.
    """
    if not groups:
        raise ValueError("nothing to aggregate")
    per_rep: Dict[str, List[float]] = {k: [] for k in METRIC_KEYS}
    for rep in sorted(groups):
        rows = groups[rep]
        if not rows:
            raise ValueError(f"replicate {rep} has no rows")
        for key in METRIC_KEYS:
            vals = [_row_values(r)[key] for r in rows]
            per_rep[key].append(sum(vals) / len(vals))
    out = {}
    for key, means in per_rep.items():
        mu = sum(means) / len(means)
        var = sum((m - mu) ** 2 for m in means) / len(means)
        out[key] = (mu, math.sqrt(var))
    return out


def format_stat(mean: float, std: float) -> str:
    return f"{mean:.2f}±{std:.2f}"


def summarize(groups: Mapping[int, Sequence[MetricRow]]) -> Dict[str, str]:
    return {k: format_stat(m, s) for k, (m, s) in aggregate(groups).items()}


def write_rows(rows: Sequence[Mapping[str, object]], target) -> None:
    """Write benchmark rows in the fixed CSV schema to a path or file."""

    def emit(fh) -> None:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in CSV_COLUMNS})

    if isinstance(target, (str, os.PathLike)):
        with open(target, "w", encoding="utf-8", newline="") as fh:
            emit(fh)
    else:
        emit(target)


def ablation_theorem1(
    network: Network,
    dataset: Dataset,
    config: ScoreConfig,
    cache: Optional[ScoreCache] = None,
) -> Dict[str, object]:
    """Confusion counts of the edge-keep predicate over all ordered pairs
    (z, x != z), classified by true adjacency in the network."""
    cache = cache if cache is not None else ScoreCache()
    total_pc = kept_pc = total_nopc = deleted_nopc = 0
    n = network.n_vars
    for z in range(n):
        for x in range(n):
            if x == z:
                continue
            keep = theorem1_holds(dataset, x, z, config, cache).keep
            if network.adjacent(x, z):
                total_pc += 1
                kept_pc += keep
            else:
                total_nopc += 1
                deleted_nopc += not keep
    return {
        "total_pc": total_pc,
        "kept_pc": kept_pc,
        "total_nopc": total_nopc,
        "deleted_nopc": deleted_nopc,
        "get_pc_accuracy": _safe_ratio(kept_pc, total_pc) if total_pc else None,
        "delete_nopc_accuracy": (
            _safe_ratio(deleted_nopc, total_nopc) if total_nopc else None
        ),
    }


def ablation_theorem2(
    network: Network,
    dataset: Dataset,
    config: ScoreConfig,
    cache: Optional[ScoreCache] = None,
) -> Dict[str, object]:
    """Sign accuracy of the collider statistic over all unshielded triples
    (x, z, y) of the true DAG; {x, y} unordered."""
    cache = cache if cache is not None else ScoreCache()
    total_v = correct_v = total_nov = correct_nov = 0
    n = network.n_vars
    for z in range(n):
        nbrs = sorted(set(network.parents_of(z)) | set(network.children_of(z)))
        for i in range(len(nbrs)):
            for j in range(i + 1, len(nbrs)):
                x, y = nbrs[i], nbrs[j]
                if network.adjacent(x, y):
                    continue
                stat = collider_statistic(dataset, x, z, y, config, cache)
                parents = set(network.parents_of(z))
                if x in parents and y in parents:
                    total_v += 1
                    correct_v += stat > 0.0
                else:
                    total_nov += 1
                    correct_nov += stat < 0.0
    return {
        "total_v": total_v,
        "correct_v": correct_v,
        "total_nov": total_nov,
        "correct_nov": correct_nov,
        "v_accuracy": _safe_ratio(correct_v, total_v) if total_v else None,
        "nov_accuracy": _safe_ratio(correct_nov, total_nov) if total_nov else None,
    }
