"""Hybrid local causal discovery for discrete data.

Learns the direct causes and effects of a target variable by combining
constraint-based parent-child discovery with score-based pruning and
orientation, without learning the full graph.
"""
from ._validation import validate_discrete_matrix
from .benchmark import replicate_seed, run_benchmark, summaries_by_size
from .data import (
    ContingencyTable,
    DataError,
    Dataset,
    config_index,
    count,
    load_dataset,
    marginal_counts,
    save_dataset,
)
from .engine import (
    Diagnostics,
    HlcdOptions,
    LocalDiscoveryResult,
    classify_neighbors,
    detect_v_structures,
    discover,
    prune_theorem1,
    run_local_discovery,
)
from .estimator import LocalCausalDiscovery
from .evaluation import (
    CSV_COLUMNS,
    MetricRow,
    ShdBreakdown,
    ablation_theorem1,
    ablation_theorem2,
    aggregate,
    format_stat,
    local_metrics,
    summarize,
    write_rows,
)
from .graphs import (
    InconsistentPdagError,
    LocalStructure,
    Pdag,
    dag_to_cpdag,
    meek_orient,
)
from .independence import (
    CiResult,
    entropy,
    g2_test,
    is_independent,
    mutual_information,
    symmetric_uncertainty,
)
from .network import (
    Network,
    NetworkError,
    NodeSpec,
    cpdag_of,
    d_separated,
    forward_sample,
    load_network,
    network_to_json,
    parse_bif,
    parse_network_json,
    true_local_cpdag,
    true_pc,
)
from .oracle import (
    brute_force_cpdag,
    enumerate_dags,
    fuzz_dsep,
    fuzz_score_identities,
    check_class_score_ties,
    oracle_discover,
    run_verification,
)
from .pc_search import (
    DataCi,
    GraphCi,
    PcOptions,
    fcbf_pc,
    hiton_pc,
    or_merge,
    pc_simple,
    run_pc,
)
from .scoring import (
    ScoreCache,
    ScoreConfig,
    Theorem1Result,
    collider_statistic,
    gain,
    graph_score,
    local_score,
    theorem1_holds,
)

__version__ = "0.1.0"

__all__ = [
    "CSV_COLUMNS",
    "CiResult",
    "ContingencyTable",
    "DataCi",
    "DataError",
    "Dataset",
    "Diagnostics",
    "GraphCi",
    "HlcdOptions",
    "InconsistentPdagError",
    "LocalCausalDiscovery",
    "LocalDiscoveryResult",
    "LocalStructure",
    "MetricRow",
    "Network",
    "NetworkError",
    "NodeSpec",
    "Pdag",
    "PcOptions",
    "ScoreCache",
    "ScoreConfig",
    "ShdBreakdown",
    "Theorem1Result",
    "ablation_theorem1",
    "ablation_theorem2",
    "aggregate",
    "brute_force_cpdag",
    "check_class_score_ties",
    "classify_neighbors",
    "collider_statistic",
    "config_index",
    "count",
    "cpdag_of",
    "d_separated",
    "dag_to_cpdag",
    "detect_v_structures",
    "discover",
    "entropy",
    "enumerate_dags",
    "fcbf_pc",
    "format_stat",
    "forward_sample",
    "fuzz_dsep",
    "fuzz_score_identities",
    "g2_test",
    "gain",
    "graph_score",
    "hiton_pc",
    "is_independent",
    "load_dataset",
    "load_network",
    "local_metrics",
    "local_score",
    "marginal_counts",
    "meek_orient",
    "mutual_information",
    "network_to_json",
    "or_merge",
    "oracle_discover",
    "parse_bif",
    "parse_network_json",
    "pc_simple",
    "prune_theorem1",
    "replicate_seed",
    "run_benchmark",
    "run_local_discovery",
    "run_pc",
    "run_verification",
    "save_dataset",
    "summaries_by_size",
    "summarize",
    "symmetric_uncertainty",
    "theorem1_holds",
    "true_local_cpdag",
    "true_pc",
    "validate_discrete_matrix",
    "write_rows",
]
