"""The universal T-round protocol and its noiseless reference executor.

A party's input is a transmission function: a complete labeled tree mapping
incoming-bit histories to outgoing bits.  Trees are materialized lazily from a
seed (labels are keyed hashes of the node address), since a full tree has
2^(d_in * T) nodes.

Node addressing: the depth-t node is the tuple of t received blocks, one block
per round, each block a tuple of d_in bits ordered by in-arc index.  Blocks are
serialized little-endian (bit k of the block integer is the k-th in-arc's bit).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Mapping

from .graphs import Arc, Digraph

Block = tuple[int, ...]
Node = tuple[Block, ...]


class ProtocolError(ValueError):
    pass


class QueryCounter:
    """Per-execution counter of black-box input queries."""

    __slots__ = ("count",)

    def __init__(self):
        self.count = 0

    def bump(self):
        self.count += 1


def _address_bytes(node: Node, d_in: int) -> bytes:
    width = max(1, (d_in + 7) // 8)
    out = [len(node).to_bytes(4, "little")]
    for block in node:
        value = 0
        for k, bit in enumerate(block):
            value |= (bit & 1) << k
        out.append(value.to_bytes(width, "little"))
    return b"".join(out)


@dataclass(frozen=True)
class TransmissionFunction:
    """Lazily materialized labeled tree: branching 2^d_in, depth T, labels of
    d_out bits each."""

    seed: int
    d_in: int
    d_out: int
    depth: int  # T

    def __post_init__(self):
        if self.depth < 1:
            raise ProtocolError("transmission function needs depth >= 1")
        if not (0 <= self.d_in <= 64 and 0 <= self.d_out <= 256):
            raise ProtocolError("degree out of supported range")

    def _key(self) -> bytes:
        return self.seed.to_bytes(8, "little", signed=True) + bytes(
            (self.d_in, self.d_out)
        )

    def label(self, node: Node) -> tuple[int, ...]:
        """The d_out output bits at a tree node (history of received blocks)."""
        if len(node) >= self.depth:
            raise ProtocolError(
                f"node depth {len(node)} out of range for T={self.depth}"
            )
        for block in node:
            if len(block) != self.d_in:
                raise ProtocolError("block width does not match indegree")
        digest = hashlib.blake2b(
            _address_bytes(node, self.d_in), key=self._key(), digest_size=32
        ).digest()
        return tuple(digest[k // 8] >> (k % 8) & 1 for k in range(self.d_out))

    def query(self, node: Node, counter: QueryCounter) -> tuple[int, ...]:
        """Black-box access: return the label and charge one query."""
        counter.bump()
        return self.label(node)


def random_transmission_function(
    seed: int, d_in: int, d_out: int, depth: int
) -> TransmissionFunction:
    return TransmissionFunction(seed=seed, d_in=d_in, d_out=d_out, depth=depth)


def functions_for_graph(
    g: Digraph, depth: int, seeds: Mapping[int, int]
) -> dict[int, TransmissionFunction]:
    """One transmission function per party, degrees matching the graph."""
    return {
        v: TransmissionFunction(
            seed=seeds[v], d_in=g.indeg(v), d_out=g.outdeg(v), depth=depth
        )
        for v in range(g.n)
    }


# ---------------------------------------------------------------------------
# noiseless reference executor

@dataclass(frozen=True)
class NoiselessRun:
    transcripts: dict[Arc, tuple[int, ...]]  # per arc, T bits
    outputs: dict[int, dict[Arc, tuple[int, ...]]]  # per party, per in-arc
    true_paths: dict[int, tuple[Node, ...]]  # per party, nodes root..leaf


def _check_inputs(g: Digraph, x: Mapping[int, TransmissionFunction], depth: int):
    for v in range(g.n):
        tf = x.get(v)
        if tf is None:
            raise ProtocolError(f"missing transmission function for party {v}")
        if (tf.d_in, tf.d_out, tf.depth) != (g.indeg(v), g.outdeg(v), depth):
            raise ProtocolError(
                f"party {v}: transmission function ({tf.d_in}, {tf.d_out}, "
                f"{tf.depth}) does not match degrees ({g.indeg(v)}, "
                f"{g.outdeg(v)}) and horizon {depth}"
            )


def run_noiseless(
    g: Digraph, x: Mapping[int, TransmissionFunction], depth: int
) -> NoiselessRun:
    """Execute the universal protocol on a noiseless network.

    Round t's bit on arc (i, j) is x_i's label at the node reached by i's
    received history through round t-1; each party outputs all received bits.
    """
    _check_inputs(g, x, depth)
    histories: list[list[Block]] = [[] for _ in range(g.n)]
    transcripts: dict[Arc, list[int]] = {a: [] for a in g.arcs}
    paths: list[list[Node]] = [[()] for _ in range(g.n)]
    for _t in range(depth):
        sent: dict[Arc, int] = {}
        for v in range(g.n):
            outs = g.out_neighbors(v)
            if not outs:
                continue
            bits = x[v].label(tuple(histories[v]))
            for w, bit in zip(outs, bits):
                sent[(v, w)] = bit
        for v in range(g.n):
            block = tuple(sent[(u, v)] for u in g.in_neighbors(v))
            histories[v].append(block)
            paths[v].append(tuple(histories[v]))
        for a, bit in sent.items():
            transcripts[a].append(bit)
    outputs = {
        v: {
            (u, v): tuple(transcripts[(u, v)])
            for u in g.in_neighbors(v)
        }
        for v in range(g.n)
    }
    return NoiselessRun(
        transcripts={a: tuple(bits) for a, bits in transcripts.items()},
        outputs=outputs,
        true_paths={v: tuple(paths[v]) for v in range(g.n)},
    )


def true_path_from_transcripts(
    g: Digraph, party: int, transcripts: Mapping[Arc, tuple[int, ...]], depth: int
) -> tuple[Node, ...]:
    """Re-derive a party's root-to-leaf path from per-arc transcripts."""
    nodes: list[Node] = [()]
    history: list[Block] = []
    for t in range(depth):
        block = tuple(transcripts[(u, party)][t] for u in g.in_neighbors(party))
        history.append(block)
        nodes.append(tuple(history))
    return tuple(nodes)


# ---------------------------------------------------------------------------
# party machines for the round engine (black-box access, counted queries)

class UniversalPartyMachine:
    """Round machine that follows a transmission function over actual received
    bits; usable directly by the network engine."""

    def __init__(self, g: Digraph, party: int, tf: TransmissionFunction, depth: int):
        self.party = party
        self.out_arcs = g.out_arcs(party)
        self.in_arcs = g.in_arcs(party)
        self.depth = depth
        self.tf = tf
        self.queries = QueryCounter()
        self.history: list[Block] = []

    def start(self, ctx):
        pass

    def send(self, rnd: int) -> tuple[int, ...]:
        if not self.out_arcs:
            return ()
        return self.tf.query(tuple(self.history), self.queries)

    def deliver(self, rnd: int, bits: tuple[int, ...]):
        self.history.append(tuple(bits))

    def output(self):
        return {
            arc: tuple(block[k] for block in self.history)
            for k, arc in enumerate(self.in_arcs)
        }


def universal_party_machines(
    g: Digraph, x: Mapping[int, TransmissionFunction], depth: int
) -> list[UniversalPartyMachine]:
    _check_inputs(g, x, depth)
    return [UniversalPartyMachine(g, v, x[v], depth) for v in range(g.n)]
