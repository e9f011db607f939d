import pytest
from hypothesis import given, settings, strategies as st

from netcode.graphs import Digraph, bidirected, random_connected_undirected
from netcode.protocol import (
    NoiselessRun,
    ProtocolError,
    QueryCounter,
    TransmissionFunction,
    functions_for_graph,
    random_transmission_function,
    run_noiseless,
    true_path_from_transcripts,
)


def all_nodes(d_in, depth):
    """Every tree address with fewer than `depth` blocks."""
    blocks = [tuple((v >> k) & 1 for k in range(d_in)) for v in range(2**d_in)]
    level = [()]
    out = [()]
    for _ in range(depth - 1):
        level = [node + (b,) for node in level for b in blocks]
        out.extend(level)
    return out


def reference_evaluator(g, x, depth):
    """Independent step-by-step evaluator: recursive lookup of each bit from
    scratch, no shared state with run_noiseless."""

    def bit(arc, t):
        i, j = arc
        node = tuple(
            tuple(bit((u, i), r) for u in g.in_neighbors(i))
            for r in range(1, t)
        )
        outs = g.out_neighbors(i)
        return x[i].label(node)[outs.index(j)]

    return {
        arc: tuple(bit(arc, t) for t in range(1, depth + 1)) for arc in g.arcs
    }


def test_determinism_equal_arguments():
    a = random_transmission_function(1, 1, 1, 2)
    b = random_transmission_function(1, 1, 1, 2)
    for node in all_nodes(1, 2):
        assert a.label(node) == b.label(node)


def test_zero_indegree_degenerates_to_path():
    tf = random_transmission_function(7, 0, 2, 4)
    nodes = all_nodes(0, 4)
    assert len(nodes) == 4  # one node per depth
    labels = [tf.label(n) for n in nodes]
    assert all(len(lab) == 2 for lab in labels)


def test_different_seeds_differ():
    a = random_transmission_function(1, 2, 1, 3)
    b = random_transmission_function(2, 2, 1, 3)
    nodes = all_nodes(2, 3)
    assert [a.label(n) for n in nodes] != [b.label(n) for n in nodes]


def test_rejects_zero_depth():
    with pytest.raises(ProtocolError):
        random_transmission_function(1, 1, 1, 0)


def test_label_rejects_bad_nodes():
    tf = random_transmission_function(1, 2, 1, 3)
    with pytest.raises(ProtocolError):
        tf.label(((0,),))  # wrong block width
    with pytest.raises(ProtocolError):
        tf.label((((0, 0)),) * 3)  # too deep


def test_single_arc_one_round():
    g = Digraph(2, [(0, 1)])
    x = functions_for_graph(g, 1, {0: 5, 1: 6})
    run = run_noiseless(g, x, 1)
    assert run.transcripts[(0, 1)] == (x[0].label(())[0],)
    assert run.outputs[1] == {(0, 1): run.transcripts[(0, 1)]}
    assert run.outputs[0] == {}


def test_two_cycle_unrolled_by_hand():
    g = Digraph(2, [(0, 1), (1, 0)])
    x = functions_for_graph(g, 2, {0: 1, 1: 2})
    run = run_noiseless(g, x, 2)
    b01 = x[0].label(())[0]
    b10 = x[1].label(())[0]
    assert run.transcripts[(0, 1)][0] == b01
    assert run.transcripts[(1, 0)][0] == b10
    # round 2 bits are the labels at the depth-1 nodes selected by round 1
    assert run.transcripts[(0, 1)][1] == x[0].label(((b10,),))[0]
    assert run.transcripts[(1, 0)][1] == x[1].label(((b01,),))[0]


def test_matches_independent_evaluator():
    g = random_connected_undirected(4, 0.5, seed=3)
    x = functions_for_graph(g, 5, {v: 10 + v for v in range(g.n)})
    run = run_noiseless(g, x, 5)
    assert run.transcripts == reference_evaluator(g, x, 5)


def test_degree_mismatch_rejected():
    g = Digraph(2, [(0, 1)])
    bad = {0: random_transmission_function(1, 1, 1, 1),
           1: random_transmission_function(2, 1, 0, 1)}
    with pytest.raises(ProtocolError):
        run_noiseless(g, bad, 1)


@given(st.integers(0, 2**32), st.integers(1, 4))
@settings(max_examples=25, deadline=None)
def test_noiseless_run_is_deterministic(seed, depth):
    g = bidirected(3, [(0, 1), (1, 2)])
    x = functions_for_graph(g, depth, {v: seed + v for v in range(3)})
    a = run_noiseless(g, x, depth)
    b = run_noiseless(g, x, depth)
    assert a == b


def test_output_contract_and_true_paths():
    g = bidirected(3, [(0, 1), (1, 2), (0, 2)])
    x = functions_for_graph(g, 4, {v: 20 + v for v in range(3)})
    run = run_noiseless(g, x, 4)
    for v in range(g.n):
        for u in g.in_neighbors(v):
            assert run.outputs[v][(u, v)] == run.transcripts[(u, v)]
        assert run.true_paths[v] == true_path_from_transcripts(
            g, v, run.transcripts, 4
        )


def test_query_counter():
    tf = random_transmission_function(1, 1, 1, 4)
    counter = QueryCounter()
    root = tf.query((), counter)
    assert counter.count == 1
    assert root == tf.label(())
    tf.query(((0,),), counter)
    assert counter.count == 2
    # full true-path walk on a depth-T tree costs T queries
    walk = QueryCounter()
    node = ()
    for _ in range(4):
        bits = tf.query(node, walk)
        node = node + ((bits[0],),)
    assert walk.count == 4
