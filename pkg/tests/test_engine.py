import json

import pytest

from netcode.engine import (
    Adversary,
    AdversaryError,
    EngineError,
    NULL_ADVERSARY,
    check_budget,
    execute,
)
from netcode.graphs import Digraph, bidirected
from netcode.protocol import functions_for_graph, run_noiseless, universal_party_machines


class FlipEverything(Adversary):
    name = "flip_all"

    def __init__(self, arcs):
        self.arcs = set(arcs)

    def corrupt(self, view):
        return {a: 1 - view.sent[a] for a in self.arcs if a in view.sent}


class ConstantZero:
    """Minimal machine: sends 0 on every out-arc, remembers deliveries."""

    def __init__(self, party, out_arcs):
        self.party = party
        self.out_arcs = tuple(out_arcs)
        self.seen = []

    def start(self, ctx):
        pass

    def send(self, rnd):
        return (0,) * len(self.out_arcs)

    def deliver(self, rnd, bits):
        self.seen.append(bits)

    def output(self):
        return tuple(self.seen)


def _machines(g, depth, seeds=None):
    seeds = seeds or {v: 100 + v for v in range(g.n)}
    x = functions_for_graph(g, depth, seeds)
    return x, universal_party_machines(g, x, depth)


def test_null_adversary_delivers_everything():
    g = bidirected(3, [(0, 1), (1, 2)])
    x, machines = _machines(g, 3)
    res = execute(g, machines, NULL_ADVERSARY, rounds=3)
    assert res.ledger.total == 0
    for a in res.trace.arcs:
        assert res.trace.sent[a] == res.trace.delivered[a]
    assert res.outputs == run_noiseless(g, x, 3).outputs


def test_flip_everything_on_one_arc():
    g = Digraph(3, [(0, 1), (1, 2)])
    x, machines = _machines(g, 10)
    res = execute(g, machines, FlipEverything([(0, 1)]), rounds=10)
    assert res.ledger.per_edge_rate((0, 1)) == 1.0
    assert res.ledger.flips[(1, 2)] == 0
    assert res.ledger.global_rate == 10 / (2 * 10)


def test_determinism_identical_runs():
    g = bidirected(3, [(0, 1), (1, 2), (0, 2)])
    runs = []
    for _ in range(2):
        x, machines = _machines(g, 4)
        res = execute(g, machines, FlipEverything([(0, 1)]), rounds=4, seed=7)
        runs.append((res.trace.sent, res.trace.delivered, res.outputs))
    assert runs[0] == runs[1]


def test_conservation_flips_equal_trace_mismatches():
    g = Digraph(2, [(0, 1), (1, 0)])
    x, machines = _machines(g, 6)
    res = execute(g, machines, FlipEverything([(1, 0)]), rounds=6)
    mismatches = sum(
        s != d
        for a in res.trace.arcs
        for s, d in zip(res.trace.sent[a], res.trace.delivered[a])
    )
    assert mismatches == res.ledger.total == res.trace.flips()[(1, 0)] == 6


def test_subnetwork_unused_arcs_carry_nothing():
    g = Digraph(3, [(0, 1), (1, 2), (0, 2)])
    machines = [ConstantZero(0, [(0, 1)]), ConstantZero(1, [(1, 2)]),
                ConstantZero(2, [])]
    res = execute(g, machines, NULL_ADVERSARY, rounds=4)
    assert set(res.trace.arcs) == {(0, 1), (1, 2)}
    assert (0, 2) not in res.ledger.flips


def test_machine_emitting_wrong_bit_count_rejected():
    class Broken(ConstantZero):
        def send(self, rnd):
            return (0,) * (len(self.out_arcs) + 1)

    g = Digraph(2, [(0, 1)])
    with pytest.raises(EngineError):
        execute(g, [Broken(0, [(0, 1)])], NULL_ADVERSARY, rounds=1)


def test_adversary_flipping_silent_arc_rejected():
    g = Digraph(3, [(0, 1), (1, 2)])
    machines = [ConstantZero(0, [(0, 1)]), ConstantZero(1, []), ConstantZero(2, [])]
    with pytest.raises(AdversaryError):
        execute(g, machines, FlipEverything([(1, 2)]), rounds=1)


def test_foreign_and_duplicate_arc_claims_rejected():
    g = Digraph(2, [(0, 1)])
    with pytest.raises(EngineError):
        execute(g, [ConstantZero(1, [(0, 1)])], NULL_ADVERSARY, rounds=1)
    with pytest.raises(EngineError):
        execute(
            g,
            [ConstantZero(0, [(0, 1)]), ConstantZero(0, [(0, 1)])],
            NULL_ADVERSARY,
            rounds=1,
        )


def test_check_budget_examples():
    g = Digraph(2, [(0, 1), (1, 0)])
    x, machines = _machines(g, 100)
    res = execute(g, machines, NULL_ADVERSARY, rounds=100)
    assert check_budget(res.ledger, "global", 0.0).ok
    assert check_budget(res.ledger, "per_edge", 0.0).ok

    # 5 flips on one arc over 100 rounds breaks a 0.04 per-edge budget
    class FiveFlips(Adversary):
        def corrupt(self, view):
            if view.round <= 5:
                return {(0, 1): 1 - view.sent[(0, 1)]}
            return {}

    x, machines = _machines(g, 100)
    res = execute(g, machines, FiveFlips(), rounds=100)
    report = check_budget(res.ledger, "per_edge", 0.04)
    assert not report.ok
    assert report.offending == ((0, 1),)
    assert check_budget(res.ledger, "per_edge", 0.05).ok
    with pytest.raises(ValueError):
        check_budget(res.ledger, "both", 0.1)


def test_trace_jsonl_export():
    g = Digraph(2, [(0, 1)])
    x, machines = _machines(g, 3)
    res = execute(g, machines, FlipEverything([(0, 1)]), rounds=3)
    lines = res.trace.to_jsonl().strip().split("\n")
    header = json.loads(lines[0])
    assert header["rounds"] == 3 and header["arcs"] == [[0, 1]]
    rows = [json.loads(ln) for ln in lines[1:-1]]
    assert [r["round"] for r in rows] == [1, 2, 3]
    assert all(r["sent"][0] != r["delivered"][0] for r in rows)
    summary = json.loads(lines[-1])
    assert summary["summary"]["total_flips"] == 3
