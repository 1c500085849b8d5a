"""Replicated benchmark runs: sample, discover every target, score, tabulate.

Work is split into (size, replicate) cells so runs parallelize across
processes; each cell's dataset seed is derived by hashing (base_seed, size,
replicate), which keeps every cell's data stable when more sizes or
replicates are added. Rows are sorted before writing, so output does not
depend on worker scheduling.
"""
import hashlib
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Mapping, Optional, Sequence

from .engine import HlcdOptions, discover
from .evaluation import MetricRow, ShdBreakdown, local_metrics, summarize
from .network import Network, forward_sample


def replicate_seed(base_seed: int, size: int, rep: int) -> int:
    digest = hashlib.blake2b(
        f"{base_seed}:{size}:{rep}".encode(), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big")


def _run_cell(args) -> List[Dict[str, object]]:
    network, label, size, rep, options, base_seed, credit = args
    dataset = forward_sample(network, size, replicate_seed(base_seed, size, rep))
    rows = []
    for t in range(network.n_vars):
        t0 = time.perf_counter()
        result = discover(dataset, t, options)
        elapsed = time.perf_counter() - t0
        metric = local_metrics(
            result, network, credit_undirected=credit, runtime_s=elapsed
        )
        rows.append(
            {
                "network": label,
                "algorithm": options.pc.algorithm,
                "score": options.score.criterion,
                "n": size,
                "replicate": rep,
                "target": network.names[t],
                "f1": f"{metric.f1:.6f}",
                "precision": f"{metric.precision:.6f}",
                "recall": f"{metric.recall:.6f}",
                "shd": f"{metric.shd.total:.6f}",
                "undirected": f"{metric.shd.undirected:.6f}",
                "reversed": f"{metric.shd.reversed:.6f}",
                "missing": f"{metric.shd.missing:.6f}",
                "extra": f"{metric.shd.extra:.6f}",
                "runtime_s": f"{metric.runtime_s:.4f}",
            }
        )
    return rows


def run_benchmark(
    network: Network,
    label: str,
    sizes: Sequence[int],
    reps: int,
    options: Optional[HlcdOptions] = None,
    *,
    base_seed: int = 0,
    threads: int = 1,
    credit_undirected: bool = False,
) -> List[Dict[str, object]]:
    """Run reps replicate datasets per size over every target; returns one
    row per (size, replicate, target) in deterministic order."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if not sizes:
        raise ValueError("at least one dataset size is required")
    options = options or HlcdOptions()
    tasks = [
        (network, label, int(size), rep, options, base_seed, credit_undirected)
        for size in sizes
        for rep in range(reps)
    ]
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_run_cell, tasks))
    else:
        chunks = [_run_cell(task) for task in tasks]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(
        key=lambda r: (
            r["network"],
            r["algorithm"],
            r["score"],
            int(r["n"]),
            int(r["replicate"]),
            r["target"],
        )
    )
    return rows


def _metric_row_from_csv(row: Mapping[str, object]) -> MetricRow:
    return MetricRow(
        f1=float(row["f1"]),
        precision=float(row["precision"]),
        recall=float(row["recall"]),
        shd=ShdBreakdown(
            undirected=float(row["undirected"]),
            reversed=float(row["reversed"]),
            missing=float(row["missing"]),
            extra=float(row["extra"]),
        ),
        runtime_s=float(row["runtime_s"]),
    )


def summaries_by_size(rows: Sequence[Mapping[str, object]]) -> Dict[int, Dict[str, str]]:
    """Per-size "mean±std" summary strings, replicate means first."""
    by_size: Dict[int, Dict[int, List[MetricRow]]] = {}
    for row in rows:
        size = int(row["n"])
        rep = int(row["replicate"])
        by_size.setdefault(size, {}).setdefault(rep, []).append(
            _metric_row_from_csv(row)
        )
    return {size: summarize(groups) for size, groups in sorted(by_size.items())}
