"""Command-line front end.

Subcommands: sample (network -> CSV dataset), discover (dataset + target ->
local structure), benchmark (replicated metric runs -> CSV + summary),
ablate (edge-keep / collider counters), verify (oracle self-checks).

Exit codes: 0 success, 1 runtime error, 2 usage error, 3 verification failure.
HLCD_THREADS overrides --threads when set.
"""
import argparse
import json
import os
import sys
import time
from importlib import resources
from typing import List, Optional

from .benchmark import replicate_seed, run_benchmark, summaries_by_size
from .data import DataError, load_dataset, save_dataset
from .engine import HlcdOptions, discover
from .evaluation import (
    ablation_theorem1,
    ablation_theorem2,
    format_stat,
    write_rows,
)
from .network import NetworkError, forward_sample, load_network
from .oracle import run_verification
from .pc_search import ALGORITHMS, PcOptions
from .scoring import CRITERIA, ScoreConfig


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _sizes(text: str) -> List[int]:
    try:
        sizes = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("sizes must be comma-separated integers")
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError("sizes must be positive")
    return sizes


def _add_discovery_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--pc-alg", choices=ALGORITHMS, default="pc-simple")
    parser.add_argument("--score", choices=CRITERIA, default="bdeu")
    parser.add_argument("--alpha", type=float, default=0.01)
    parser.add_argument("--mi-threshold", type=float, default=0.03)
    parser.add_argument("--max-cond", type=int, default=None)
    parser.add_argument("--ess", type=float, default=1.0)
    parser.add_argument(
        "--fcbf-measure", choices=("su", "mi"), default="su",
        help="relevance measure for the fcbf variant",
    )
    parser.add_argument(
        "--shielded-pairs", action="store_true",
        help="also test collider pairs that are currently adjacent",
    )


def _options_from(args: argparse.Namespace) -> HlcdOptions:
    return HlcdOptions(
        pc=PcOptions(
            algorithm=args.pc_alg,
            alpha=args.alpha,
            mi_threshold=args.mi_threshold,
            max_cond_size=args.max_cond,
            fcbf_measure=args.fcbf_measure,
        ),
        score=ScoreConfig(criterion=args.score, ess=args.ess),
        require_nonadjacent_pairs=not args.shielded_pairs,
    )


def _threads(args: argparse.Namespace) -> int:
    env = os.environ.get("HLCD_THREADS")
    if env is not None:
        return max(1, int(env))
    return max(1, args.threads)


def _resolve_target(names, wanted: str) -> int:
    if wanted in names:
        return names.index(wanted)
    folded = [n.lower() for n in names]
    hits = [i for i, n in enumerate(folded) if n == wanted.lower()]
    if len(hits) == 1:
        return hits[0]
    raise DataError(f"unknown target variable {wanted!r}")


def _cmd_sample(args: argparse.Namespace) -> int:
    net = load_network(args.net)
    dataset = forward_sample(net, args.n, args.seed)
    if args.out == "-":
        save_dataset(dataset, sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            save_dataset(dataset, fh)
    return 0


def _cmd_discover(args: argparse.Namespace) -> int:
    dataset = load_dataset(args.data, allow_labels=True)
    target = _resolve_target(list(dataset.names), args.target)
    options = _options_from(args)
    t0 = time.perf_counter()
    result = discover(dataset, target, options)
    elapsed = time.perf_counter() - t0
    diag = result.diagnostics
    print(f"target: {dataset.names[target]}")
    print(f"parents: {', '.join(result.parent_names) or '(none)'}")
    print(f"children: {', '.join(result.child_names) or '(none)'}")
    print(f"undirected: {', '.join(result.undirected_names) or '(none)'}")
    print(
        f"visited {len(result.visited)} variables, {diag.ci_tests} CI tests, "
        f"{diag.score_evals} score evaluations, {diag.v_structures} v-structures, "
        f"{diag.conflicts} conflicts, {elapsed:.3f}s"
    )
    if args.json is not None:
        record = {
            "target": dataset.names[target],
            "parents": list(result.parent_names),
            "children": list(result.child_names),
            "undirected": list(result.undirected_names),
            "visited": [dataset.names[i] for i in result.visited],
            "diagnostics": vars(diag),
            "runtime_s": round(elapsed, 4),
            "options": {
                "pc_alg": args.pc_alg,
                "score": args.score,
                "alpha": args.alpha,
                "mi_threshold": args.mi_threshold,
                "max_cond": args.max_cond,
                "ess": args.ess,
            },
        }
        text = json.dumps(record, indent=2) + "\n"
        if args.json == "-":
            sys.stdout.write(text)
        else:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(text)
    return 0


def _cmd_benchmark(args: argparse.Namespace) -> int:
    net = load_network(args.net)
    label = os.path.splitext(os.path.basename(args.net))[0]
    rows = run_benchmark(
        net,
        label,
        args.sizes,
        args.reps,
        _options_from(args),
        base_seed=args.seed,
        threads=_threads(args),
        credit_undirected=args.credit_undirected,
    )
    if args.out == "-":
        write_rows(rows, sys.stdout)
    else:
        write_rows(rows, args.out)
    for size, summary in summaries_by_size(rows).items():
        print(
            f"n={size}: f1 {summary['f1']}  precision {summary['precision']}  "
            f"recall {summary['recall']}  shd {summary['shd']}"
        )
    return 0


def _cmd_ablate(args: argparse.Namespace) -> int:
    net = load_network(args.net)
    config = ScoreConfig(criterion=args.score, ess=args.ess)
    which = ("1", "2") if args.theorem == "both" else (args.theorem,)
    acc1: List[dict] = []
    acc2: List[dict] = []
    for rep in range(args.reps):
        dataset = forward_sample(net, args.n, replicate_seed(args.seed, args.n, rep))
        if "1" in which:
            acc1.append(ablation_theorem1(net, dataset, config))
        if "2" in which:
            acc2.append(ablation_theorem2(net, dataset, config))

    def stat_over(reports: List[dict], key: str) -> str:
        vals = [r[key] for r in reports if r[key] is not None]
        if not vals:
            return "n/a"
        mu = sum(vals) / len(vals)
        var = sum((v - mu) ** 2 for v in vals) / len(vals)
        return format_stat(mu, var**0.5)

    if acc1:
        r = acc1[0]
        print(
            f"theorem-1  Total_PC {r['total_pc']}  "
            f"Get_PC {stat_over(acc1, 'get_pc_accuracy')}  "
            f"Total_NoPC {r['total_nopc']}  "
            f"Delete_NoPC {stat_over(acc1, 'delete_nopc_accuracy')}"
        )
    if acc2:
        r = acc2[0]
        print(
            f"theorem-2  Total_V {r['total_v']}  "
            f"V_acc {stat_over(acc2, 'v_accuracy')}  "
            f"Total_NoV {r['total_nov']}  "
            f"NoV_acc {stat_over(acc2, 'nov_accuracy')}"
        )
    return 0


def _bundled_networks():
    root = resources.files("hlcd").joinpath("data")
    out = []
    for name in ("alarm.bif", "child.json"):
        path = root.joinpath(name)
        with resources.as_file(path) as concrete:
            out.append((os.path.splitext(name)[0], load_network(concrete)))
    return out


def _cmd_verify(args: argparse.Namespace) -> int:
    if args.networks is None:
        networks = _bundled_networks()
    else:
        networks = [
            (os.path.splitext(os.path.basename(p))[0], load_network(p))
            for p in args.networks
        ]
    log = (lambda msg: print(f"  .. {msg}", file=sys.stderr)) if args.verbose else None
    report = run_verification(
        args.max_nodes,
        sample6=args.sample6,
        fuzz_trials=args.fuzz_trials,
        class_datasets=args.class_datasets,
        dsep_trials=args.dsep_trials,
        seed=args.seed,
        networks=networks,
        log=log,
    )
    for check in report.checks:
        status = "ok  " if check.passed else "FAIL"
        print(f"{status} {check.name}: {check.detail}")
    if report.passed:
        print(f"all {len(report.checks)} checks passed")
        return 0
    failed = sum(1 for c in report.checks if not c.passed)
    print(f"{failed} of {len(report.checks)} checks failed")
    return 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hlcd",
        description="hybrid local causal discovery for discrete data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw a dataset from a network")
    p.add_argument("--net", required=True, help="network file (.bif or .json)")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output CSV path, or - for stdout")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("discover", help="local discovery around one target")
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--target", required=True, help="target column name")
    p.add_argument("--json", default=None, help="also write a JSON record here (- for stdout)")
    _add_discovery_flags(p)
    p.set_defaults(func=_cmd_discover)

    p = sub.add_parser("benchmark", help="replicated benchmark over all targets")
    p.add_argument("--net", required=True)
    p.add_argument("--sizes", type=_sizes, required=True, help="e.g. 500,1000")
    p.add_argument("--reps", type=_positive_int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="metrics CSV path, or - for stdout")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--credit-undirected", action="store_true")
    _add_discovery_flags(p)
    p.set_defaults(func=_cmd_benchmark)

    p = sub.add_parser("ablate", help="edge-keep and collider counters")
    p.add_argument("--net", required=True)
    p.add_argument("--n", type=_positive_int, default=500)
    p.add_argument("--reps", type=_positive_int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--theorem", choices=("1", "2", "both"), default="both")
    p.add_argument("--score", choices=CRITERIA, default="bdeu")
    p.add_argument("--ess", type=float, default=1.0)
    p.set_defaults(func=_cmd_ablate)

    p = sub.add_parser("verify", help="run the oracle self-check suite")
    p.add_argument("--max-nodes", type=int, default=5, choices=range(1, 7))
    p.add_argument("--sample6", type=int, default=1000,
                   help="random 6-node DAGs when --max-nodes < 6")
    p.add_argument("--fuzz-trials", type=int, default=1000)
    p.add_argument("--class-datasets", type=int, default=100)
    p.add_argument("--dsep-trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--networks", nargs="*", default=None,
                   help="network files to sweep (default: bundled)")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataError, NetworkError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
