"""Network parsing (JSON and BIF), forward sampling, and graph truths."""
import json
import math

import numpy as np
import pytest

from hlcd import (
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

from conftest import binary_node, make_node

CHAIN_JSON = json.dumps(
    {
        "nodes": [
            {"name": "A", "states": 2, "parents": [], "cpt": [[0.3, 0.7]]},
            {
                "name": "B",
                "states": ["lo", "hi"],
                "parents": ["A"],
                "cpt": [[0.9, 0.1], [0.2, 0.8]],
            },
        ]
    }
)

SMALL_BIF = """
network unknown {
}
variable A {
  type discrete [ 2 ] { yes, no };
}
variable B {
  type discrete [ 3 ] { lo, mid, hi };
}
// a line comment
variable C {
  type discrete [ 2 ] { on, off };
}
probability ( A ) {
  table 0.4, 0.6;
}
probability ( B | A ) {
  ( yes ) 0.2, 0.3, 0.5;
  ( no ) 0.6, 0.3, 0.1;
}
probability ( C | A, B ) { /* block comment */
  ( yes, lo ) 0.1, 0.9;
  ( yes, mid ) 0.2, 0.8;
  ( yes, hi ) 0.3, 0.7;
  ( no, lo ) 0.4, 0.6;
  ( no, mid ) 0.5, 0.5;
  ( no, hi ) 0.6, 0.4;
}
"""


class TestNetworkValidation:
    def test_rejects_cycle(self):
        with pytest.raises(NetworkError, match="cycle"):
            Network(
                [
                    binary_node("A", (1,), ((0.5, 0.5), (0.5, 0.5))),
                    binary_node("B", (0,), ((0.5, 0.5), (0.5, 0.5))),
                ]
            )

    def test_rejects_bad_cpt_shape(self):
        with pytest.raises(NetworkError, match="shape"):
            Network([binary_node("A", (), ((0.5, 0.5), (0.5, 0.5)))])

    def test_rejects_bad_row_sum(self):
        with pytest.raises(NetworkError, match="sums to"):
            Network([binary_node("A", (), ((0.6, 0.6),))])

    def test_rejects_negative_probability(self):
        with pytest.raises(NetworkError, match="outside"):
            Network([binary_node("A", (), ((1.2, -0.2),))])

    def test_rejects_duplicate_parent(self):
        with pytest.raises(NetworkError, match="duplicate parent"):
            Network(
                [
                    binary_node("A"),
                    make_node("B", ("0", "1"), (0, 0), [[0.5, 0.5]] * 4),
                ]
            )

    def test_queries(self, chain_net):
        assert chain_net.n_vars == 3
        assert chain_net.names == ("X0", "X1", "X2")
        assert chain_net.index_of("X1") == 1
        assert chain_net.arity(0) == 2
        assert chain_net.parents_of(2) == (1,)
        assert chain_net.children_of(0) == (1,)
        assert chain_net.edges() == [(0, 1), (1, 2)]
        assert chain_net.adjacent(0, 1) and not chain_net.adjacent(0, 2)
        assert chain_net.topological_order() == (0, 1, 2)
        with pytest.raises(NetworkError):
            chain_net.index_of("nope")


class TestJsonFormat:
    def test_parse(self):
        net = parse_network_json(CHAIN_JSON)
        assert net.names == ("A", "B")
        assert net.nodes[0].states == ("s0", "s1")  # integer states get labels
        assert net.nodes[1].states == ("lo", "hi")
        assert net.parents_of(1) == (0,)
        assert net.nodes[1].cpt[1, 1] == 0.8

    def test_round_trip(self):
        net = parse_network_json(CHAIN_JSON)
        back = parse_network_json(network_to_json(net))
        assert back.names == net.names
        assert back.edges() == net.edges()
        for a, b in zip(back.nodes, net.nodes):
            assert a.states == b.states
            assert np.allclose(a.cpt, b.cpt)

    @pytest.mark.parametrize(
        "doc, message",
        [
            ("{", "invalid JSON"),
            ("[]", "nodes"),
            ('{"nodes": []}', "non-empty"),
            ('{"nodes": [{"states": 2}]}', "name"),
            (
                '{"nodes": [{"name": "A", "states": 0, "cpt": [[1.0]]}]}',
                "states",
            ),
            (
                '{"nodes": [{"name": "A", "states": 2, "parents": ["Z"],'
                ' "cpt": [[0.5, 0.5]]}]}',
                "unknown parent",
            ),
            (
                '{"nodes": [{"name": "A", "states": 2, "cpt": [[0.5], [0.5, 0.5]]}]}',
                "ragged",
            ),
            ('{"nodes": [{"name": "A", "states": 2, "cpt": 5}]}', "list of rows"),
            (
                '{"nodes": [{"name": "A", "states": 2, "cpt": [0.5, 0.5]}]}',
                "two-dimensional",
            ),
        ],
    )
    def test_rejects_malformed(self, doc, message):
        with pytest.raises(NetworkError, match=message):
            parse_network_json(doc)


class TestBifFormat:
    def test_parse(self):
        net = parse_bif(SMALL_BIF)
        assert net.names == ("A", "B", "C")
        assert net.nodes[1].states == ("lo", "mid", "hi")
        assert net.parents_of(2) == (0, 1)
        # row for (no, mid): config = 1 * 3 + 1
        assert net.nodes[2].cpt[4].tolist() == [0.5, 0.5]
        assert net.nodes[0].cpt[0].tolist() == [0.4, 0.6]

    def test_flat_table_layout(self):
        text = """
        network x { }
        variable A { type discrete [ 2 ] { a0, a1 }; }
        variable B { type discrete [ 2 ] { b0, b1 }; }
        probability ( A ) { table 0.5, 0.5; }
        probability ( B | A ) { table 0.9, 0.1, 0.2, 0.8; }
        """
        net = parse_bif(text)
        assert net.nodes[1].cpt.tolist() == [[0.9, 0.1], [0.2, 0.8]]

    @pytest.mark.parametrize(
        "mutation, message",
        [
            (("( yes ) 0.2, 0.3, 0.5;", "( yes ) 0.2, 0.8;"), "expected 3"),
            (("( no ) 0.6, 0.3, 0.1;", ""), "no probability row"),
            (("( no ) 0.6, 0.3, 0.1;", "( yes ) 0.6, 0.3, 0.1;"), "duplicate row"),
            (("( yes ) 0.2, 0.3, 0.5;", "( maybe ) 0.2, 0.3, 0.5;"), "unknown state"),
            (("table 0.4, 0.6;", "table 0.4, x;"), "non-numeric"),
            (("probability ( A )", "probability ( A, B )"), "one child"),
        ],
    )
    def test_rejects_malformed(self, mutation, message):
        old, new = mutation
        with pytest.raises(NetworkError, match=message):
            parse_bif(SMALL_BIF.replace(old, new))

    def test_rejects_missing_probability_block(self):
        text = """
        network x { }
        variable A { type discrete [ 2 ] { a0, a1 }; }
        """
        with pytest.raises(NetworkError, match="no probability block"):
            parse_bif(text)

    def test_rejects_state_count_mismatch(self):
        with pytest.raises(NetworkError, match="declares 2"):
            parse_bif(SMALL_BIF.replace("[ 2 ] { yes, no }", "[ 2 ] { yes }"))


class TestLoadNetwork:
    def test_dispatch(self, tmp_path):
        jpath = tmp_path / "net.json"
        jpath.write_text(CHAIN_JSON)
        assert load_network(jpath).names == ("A", "B")
        bpath = tmp_path / "net.bif"
        bpath.write_text(SMALL_BIF)
        assert load_network(bpath).names == ("A", "B", "C")

    def test_unknown_extension(self, tmp_path):
        path = tmp_path / "net.txt"
        path.write_text(CHAIN_JSON)
        with pytest.raises(NetworkError, match="format"):
            load_network(path)

    def test_bundled_alarm(self, alarm_net):
        assert alarm_net.n_vars == 37
        assert len(alarm_net.edges()) == 46

    def test_bundled_child(self, child_net):
        assert child_net.n_vars == 20
        assert len(child_net.edges()) == 25


class TestForwardSample:
    def test_shape_and_names(self, chain_net):
        ds = forward_sample(chain_net, 50, 0)
        assert ds.n_rows == 50
        assert ds.names == chain_net.names
        assert ds.arities.tolist() == [2, 2, 2]

    def test_deterministic_per_seed(self, chain_net):
        a = forward_sample(chain_net, 100, 3)
        b = forward_sample(chain_net, 100, 3)
        c = forward_sample(chain_net, 100, 4)
        assert np.array_equal(a.rows, b.rows)
        assert not np.array_equal(a.rows, c.rows)

    def test_column_stable_when_nodes_appended(self):
        base = Network([binary_node("A", (), ((0.3, 0.7),))])
        grown = Network(
            [binary_node("A", (), ((0.3, 0.7),)), binary_node("B")]
        )
        a = forward_sample(base, 200, 5)
        b = forward_sample(grown, 200, 5)
        assert np.array_equal(a.column(0), b.column(0))

    def test_root_marginal_converges(self):
        net = Network([binary_node("A", (), ((0.7, 0.3),))])
        ds = forward_sample(net, 100_000, 0)
        freq = ds.column(0).mean()
        assert abs(freq - 0.30) < 0.01

    def test_deterministic_cpt_rows_copy_parent(self):
        net = Network(
            [binary_node("A"), binary_node("B", (0,), ((1.0, 0.0), (0.0, 1.0)))]
        )
        ds = forward_sample(net, 500, 1)
        assert np.array_equal(ds.column(0), ds.column(1))

    def test_rejects_nonpositive_n(self, chain_net):
        with pytest.raises(NetworkError):
            forward_sample(chain_net, 0, 0)


class TestDSeparation:
    def test_chain(self, chain_net):
        assert not d_separated(chain_net, 0, 2)
        assert d_separated(chain_net, 0, 2, (1,))

    def test_collider(self, collider_net):
        assert d_separated(collider_net, 0, 1)
        assert not d_separated(collider_net, 0, 1, (2,))

    def test_collider_descendant_opens_path(self):
        net = Network(
            [
                binary_node("A"),
                binary_node("B"),
                binary_node(
                    "C", (0, 1), ((0.9, 0.1), (0.5, 0.5), (0.5, 0.5), (0.1, 0.9))
                ),
                binary_node("D", (2,), ((0.8, 0.2), (0.2, 0.8))),
            ]
        )
        assert d_separated(net, 0, 1)
        assert not d_separated(net, 0, 1, (3,))

    def test_symmetry(self, hand5_net):
        for z in ((), (2,), (2, 3)):
            assert d_separated(hand5_net, 0, 1, z) == d_separated(hand5_net, 1, 0, z)

    def test_disconnected_components(self, hand5_net):
        assert d_separated(hand5_net, 0, 4)
        assert d_separated(hand5_net, 0, 4, (2, 3))

    def test_rejects_overlapping_query(self, chain_net):
        with pytest.raises(NetworkError):
            d_separated(chain_net, 0, 0)
        with pytest.raises(NetworkError):
            d_separated(chain_net, 0, 1, (0,))


class TestGraphTruths:
    def test_true_pc(self, hand5_net):
        assert true_pc(hand5_net, 2) == [0, 1]
        assert true_pc(hand5_net, 0) == [2]
        assert true_pc(hand5_net, 3) == [4]

    def test_cpdag_of(self, hand5_net):
        cpdag = cpdag_of(hand5_net)
        assert cpdag.has_directed(0, 2)
        assert cpdag.has_directed(1, 2)
        assert cpdag.has_undirected(3, 4)

    def test_true_local_cpdag(self, hand5_net):
        ls = true_local_cpdag(hand5_net, 2)
        assert ls.parents == (0, 1)
        assert ls.children == ()
        ls = true_local_cpdag(hand5_net, 3)
        assert ls.undirected == (4,)

    def test_true_local_cpdag_accepts_precomputed(self, hand5_net):
        cpdag = cpdag_of(hand5_net)
        assert true_local_cpdag(hand5_net, 0, cpdag).children == (2,)
