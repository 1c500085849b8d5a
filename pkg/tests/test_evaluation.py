"""Local metrics, aggregation, CSV writing, and ablation counters."""
import io

import pytest

from hlcd import (
    CSV_COLUMNS,
    Diagnostics,
    LocalDiscoveryResult,
    MetricRow,
    Pdag,
    ScoreConfig,
    ShdBreakdown,
    ablation_theorem1,
    ablation_theorem2,
    aggregate,
    format_stat,
    forward_sample,
    local_metrics,
    summarize,
    write_rows,
)

AIC = ScoreConfig(criterion="aic")


def make_result(target, parents=(), children=(), undirected=(), n=5, names=()):
    pdag = Pdag(n)
    for p in parents:
        pdag.add_undirected(p, target)
        pdag.orient(p, target)
    for c in children:
        pdag.add_undirected(target, c)
        pdag.orient(target, c)
    for u in undirected:
        pdag.add_undirected(target, u)
    return LocalDiscoveryResult(
        target=target,
        parents=frozenset(parents),
        children=frozenset(children),
        undirected=frozenset(undirected),
        visited=(target,),
        pdag=pdag,
        diagnostics=Diagnostics(),
        names=tuple(names),
    )


class TestLocalMetrics:
    # truth at target 2 of hand5_net: parents {0, 1}, no children

    def test_perfect_recovery(self, hand5_net):
        row = local_metrics(make_result(2, parents=(0, 1)), hand5_net)
        assert row.f1 == 1.0
        assert row.precision == 1.0
        assert row.recall == 1.0
        assert row.shd.total == 0.0

    def test_reversed_edge(self, hand5_net):
        row = local_metrics(make_result(2, parents=(1,), children=(0,)), hand5_net)
        assert row.precision == 0.5
        assert row.recall == 0.5
        assert row.shd.reversed == 1.0
        assert row.shd.total == 1.0

    def test_undirected_edge_not_credited_by_default(self, hand5_net):
        learned = make_result(2, parents=(1,), undirected=(0,))
        row = local_metrics(learned, hand5_net)
        assert row.precision == 0.5
        assert row.recall == 0.5
        assert row.shd.undirected == 1.0
        assert row.shd.total == 1.0

    def test_credit_undirected_relaxes_rates_only(self, hand5_net):
        learned = make_result(2, parents=(1,), undirected=(0,))
        row = local_metrics(learned, hand5_net, credit_undirected=True)
        assert row.f1 == 1.0
        assert row.precision == 1.0
        assert row.recall == 1.0
        # SHD still charges the undirected mark
        assert row.shd.undirected == 1.0
        assert row.shd.total == 1.0

    def test_extra_edge(self, hand5_net):
        row = local_metrics(make_result(2, parents=(0, 1), children=(3,)), hand5_net)
        assert row.precision == pytest.approx(2.0 / 3.0)
        assert row.recall == 1.0
        assert row.shd.extra == 1.0
        assert row.shd.total == 1.0

    def test_missing_edge(self, hand5_net):
        row = local_metrics(make_result(2, parents=(0,)), hand5_net)
        assert row.precision == 1.0
        assert row.recall == 0.5
        assert row.f1 == pytest.approx(2.0 / 3.0)
        assert row.shd.missing == 1.0

    def test_empty_result_gives_zero_rates(self, hand5_net):
        row = local_metrics(make_result(0), hand5_net)
        assert row.f1 == 0.0
        assert row.precision == 0.0
        assert row.recall == 0.0
        assert row.shd.missing == 1.0

    def test_runtime_carried(self, hand5_net):
        row = local_metrics(make_result(2, parents=(0, 1)), hand5_net, runtime_s=0.25)
        assert row.runtime_s == 0.25

    def test_name_mismatch_rejected(self, hand5_net):
        learned = make_result(2, parents=(0, 1), names=("a", "b", "c", "d", "e"))
        with pytest.raises(ValueError):
            local_metrics(learned, hand5_net)

    def test_count_mismatch_rejected(self, hand5_net):
        learned = make_result(2, parents=(0, 1), n=4)
        with pytest.raises(ValueError):
            local_metrics(learned, hand5_net)


def metric_row(f1=0.0, shd=(0.0, 0.0, 0.0, 0.0), runtime_s=0.0):
    return MetricRow(
        f1=f1,
        precision=f1,
        recall=f1,
        shd=ShdBreakdown(*shd),
        runtime_s=runtime_s,
    )


class TestAggregate:
    def test_mean_and_population_std(self):
        stats = aggregate({0: [metric_row(f1=1.0)], 1: [metric_row(f1=0.0)]})
        assert stats["f1"] == (0.5, 0.5)

    def test_averages_within_replicate_first(self):
        groups = {
            0: [metric_row(f1=1.0), metric_row(f1=0.0)],
            1: [metric_row(f1=0.5)],
        }
        mean, std = aggregate(groups)["f1"]
        assert mean == 0.5
        assert std == 0.0

    def test_shd_key_uses_breakdown_total(self):
        stats = aggregate({0: [metric_row(shd=(1.0, 2.0, 0.0, 1.0))]})
        assert stats["shd"] == (4.0, 0.0)
        assert stats["reversed"] == (2.0, 0.0)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            aggregate({})
        with pytest.raises(ValueError):
            aggregate({0: []})

    def test_format_stat(self):
        assert format_stat(0.5, 0.1) == "0.50±0.10"
        assert format_stat(1.234, 0.0) == "1.23±0.00"

    def test_summarize_formats_every_key(self):
        summary = summarize({0: [metric_row(f1=1.0)], 1: [metric_row(f1=0.0)]})
        assert summary["f1"] == "0.50±0.50"
        assert summary["shd"] == "0.00±0.00"


SAMPLE_ROW = {
    "network": "toy",
    "algorithm": "pc-simple",
    "score": "aic",
    "n": 100,
    "replicate": 0,
    "target": "X0",
    "f1": "1.000000",
    "precision": "1.000000",
    "recall": "1.000000",
    "shd": 0,
    "undirected": 0,
    "reversed": 0,
    "missing": 0,
    "extra": 0,
    "runtime_s": "0.0001",
}

EXPECTED_CSV = (
    "network,algorithm,score,n,replicate,target,f1,precision,recall,"
    "shd,undirected,reversed,missing,extra,runtime_s\n"
    "toy,pc-simple,aic,100,0,X0,1.000000,1.000000,1.000000,0,0,0,0,0,0.0001\n"
)


class TestWriteRows:
    def test_golden_text_to_buffer(self):
        buf = io.StringIO()
        write_rows([SAMPLE_ROW], buf)
        assert buf.getvalue() == EXPECTED_CSV

    def test_writes_to_path(self, tmp_path):
        out = tmp_path / "rows.csv"
        write_rows([SAMPLE_ROW], out)
        text = out.read_bytes().decode("utf-8")
        assert text == EXPECTED_CSV
        assert "\r" not in text

    def test_extra_keys_ignored(self):
        buf = io.StringIO()
        write_rows([dict(SAMPLE_ROW, debug="x")], buf)
        assert buf.getvalue() == EXPECTED_CSV

    def test_header_matches_exported_columns(self):
        buf = io.StringIO()
        write_rows([], buf)
        assert buf.getvalue() == ",".join(CSV_COLUMNS) + "\n"


class TestAblationTheorem1:
    def test_collider_counts_and_accuracy(self, collider_net):
        ds = forward_sample(collider_net, 5000, 0)
        out = ablation_theorem1(collider_net, ds, AIC)
        # ordered pairs: 4 adjacent (wing, hub both ways), 2 wing-wing
        assert out["total_pc"] == 4
        assert out["total_nopc"] == 2
        assert out["kept_pc"] == 4
        assert out["deleted_nopc"] == 2
        assert out["get_pc_accuracy"] == 1.0
        assert out["delete_nopc_accuracy"] == 1.0

    def test_no_nonadjacent_pairs_gives_none(self, chain_net):
        # chain: 0-2 are nonadjacent but marginally dependent, so the
        # keep predicate retains them; only totals are structural
        ds = forward_sample(chain_net, 2000, 0)
        out = ablation_theorem1(chain_net, ds, AIC)
        assert out["total_pc"] == 4
        assert out["total_nopc"] == 2
        assert out["kept_pc"] == 4


class TestAblationTheorem2:
    def test_collider_triple(self, collider_net):
        ds = forward_sample(collider_net, 5000, 0)
        out = ablation_theorem2(collider_net, ds, AIC)
        assert out["total_v"] == 1
        assert out["correct_v"] == 1
        assert out["total_nov"] == 0
        assert out["v_accuracy"] == 1.0
        assert out["nov_accuracy"] is None

    def test_chain_triple(self, chain_net):
        ds = forward_sample(chain_net, 5000, 0)
        out = ablation_theorem2(chain_net, ds, AIC)
        assert out["total_v"] == 0
        assert out["total_nov"] == 1
        assert out["correct_nov"] == 1
        assert out["v_accuracy"] is None
        assert out["nov_accuracy"] == 1.0

    def test_shielded_triples_excluded(self, hand5_net):
        ds = forward_sample(hand5_net, 5000, 0)
        out = ablation_theorem2(hand5_net, ds, AIC)
        assert out["total_v"] == 1
        assert out["total_nov"] == 0
