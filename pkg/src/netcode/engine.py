"""Synchronous round engine: one bit per active arc per round, an adversary
interposed on every channel, and exact error accounting.

The adversary sees each round's sent bits before choosing what to corrupt (the
strongest adaptive position).  Arcs not claimed by any party machine carry no
bits and accrue no ledger entries, so simulations may run on subnetworks.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Any, Iterable, Protocol, Sequence

from .graphs import Arc, Digraph

TRACE_SCHEMA_VERSION = 1


class EngineError(RuntimeError):
    pass


class AdversaryError(EngineError):
    """The adversary tried to corrupt a bit that was never transmitted."""


class PartyMachineProtocol(Protocol):  # pragma: no cover - typing aid
    party: int
    out_arcs: tuple[Arc, ...]

    def start(self, ctx: "ExecutionContext") -> None: ...

    def send(self, rnd: int) -> Sequence[int]: ...

    def deliver(self, rnd: int, bits: tuple[int, ...]) -> None: ...

    def output(self) -> Any: ...


@dataclass
class ExecutionContext:
    graph: Digraph
    active_arcs: tuple[Arc, ...]
    rounds: int
    seed: int

    def party_rng(self, party: int) -> random.Random:
        """Private per-party stream; not visible to the adversary."""
        return random.Random(f"party:{self.seed}:{party}")

    def adversary_rng(self) -> random.Random:
        return random.Random(f"adversary:{self.seed}")


class ExecutionTrace:
    """Per-arc sent/delivered bit strings, one position per round."""

    def __init__(self, arcs: Iterable[Arc]):
        self.arcs = tuple(sorted(arcs))
        self.sent: dict[Arc, bytearray] = {a: bytearray() for a in self.arcs}
        self.delivered: dict[Arc, bytearray] = {a: bytearray() for a in self.arcs}

    def record(self, sent: dict[Arc, int], delivered: dict[Arc, int]):
        for a in self.arcs:
            self.sent[a].append(sent[a])
            self.delivered[a].append(delivered[a])

    @property
    def rounds(self) -> int:
        return len(self.sent[self.arcs[0]]) if self.arcs else 0

    def flips(self) -> dict[Arc, int]:
        return {
            a: sum(s != d for s, d in zip(self.sent[a], self.delivered[a]))
            for a in self.arcs
        }

    def to_jsonl(self) -> str:
        """One record per round with per-arc (sent, delivered), then a summary."""
        lines = [
            json.dumps(
                {
                    "schema": TRACE_SCHEMA_VERSION,
                    "arcs": [list(a) for a in self.arcs],
                    "rounds": self.rounds,
                },
                sort_keys=True,
            )
        ]
        for t in range(self.rounds):
            lines.append(
                json.dumps(
                    {
                        "round": t + 1,
                        "sent": [self.sent[a][t] for a in self.arcs],
                        "delivered": [self.delivered[a][t] for a in self.arcs],
                    },
                    sort_keys=True,
                )
            )
        flips = self.flips()
        lines.append(
            json.dumps(
                {
                    "summary": {
                        "total_flips": sum(flips.values()),
                        "flips": [[list(a), flips[a]] for a in self.arcs],
                    }
                },
                sort_keys=True,
            )
        )
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ErrorLedger:
    rounds: int
    arcs: tuple[Arc, ...]
    flips: dict[Arc, int]

    @property
    def total(self) -> int:
        return sum(self.flips.values())

    @property
    def global_rate(self) -> float:
        bits = len(self.arcs) * self.rounds
        return self.total / bits if bits else 0.0

    def per_edge_rate(self, arc: Arc) -> float:
        return self.flips[arc] / self.rounds if self.rounds else 0.0

    def max_per_edge_rate(self) -> float:
        return max((self.per_edge_rate(a) for a in self.arcs), default=0.0)


@dataclass(frozen=True)
class BudgetReport:
    ok: bool
    model: str
    rate: float
    limit: int
    offending: tuple[Arc, ...] = ()


def check_budget(ledger: ErrorLedger, model: str, rate: float) -> BudgetReport:
    """Global: total flips <= floor(rate * m * rounds).  Per-edge: each arc's
    flips <= floor(rate * rounds)."""
    if model == "global":
        limit = int(rate * len(ledger.arcs) * ledger.rounds)
        return BudgetReport(ledger.total <= limit, model, rate, limit)
    if model == "per_edge":
        limit = int(rate * ledger.rounds)
        bad = tuple(a for a in ledger.arcs if ledger.flips[a] > limit)
        return BudgetReport(not bad, model, rate, limit, bad)
    raise ValueError(f"unknown budget model {model!r}")


@dataclass
class AdversaryView:
    """Everything the adversary may condition on: the full history and the
    current round's sent bits.  Party-private and shared randomness are
    deliberately absent."""

    round: int
    sent: dict[Arc, int]
    trace: ExecutionTrace
    flips_so_far: dict[Arc, int]
    inputs: Any = None


class Adversary:
    """Channel adversary; the default instance corrupts nothing."""

    name = "null"

    def start(self, ctx: ExecutionContext) -> None:
        pass

    def corrupt(self, view: AdversaryView) -> dict[Arc, int]:
        """Map of arc -> delivered bit for arcs this adversary overrides."""
        return {}


NULL_ADVERSARY = Adversary()


@dataclass
class ExecutionResult:
    trace: ExecutionTrace
    ledger: ErrorLedger
    outputs: dict[int, Any]
    context: ExecutionContext = field(repr=False, default=None)


def execute(
    g: Digraph,
    machines: Sequence[PartyMachineProtocol],
    adversary: Adversary,
    rounds: int,
    seed: int = 0,
    inputs: Any = None,
) -> ExecutionResult:
    """Run a round-synchronous execution and account for every flip."""
    owners: dict[Arc, tuple[int, int]] = {}
    for mi, mach in enumerate(machines):
        for k, arc in enumerate(mach.out_arcs):
            if arc not in g.arcs:
                raise EngineError(f"machine {mach.party} claims foreign arc {arc}")
            if arc[0] != mach.party:
                raise EngineError(
                    f"machine {mach.party} claims arc {arc} it cannot send on"
                )
            if arc in owners:
                raise EngineError(f"arc {arc} claimed twice")
            owners[arc] = (mi, k)
    active = tuple(sorted(owners))
    in_arcs = {
        mach.party: tuple(a for a in active if a[1] == mach.party)
        for mach in machines
    }
    ctx = ExecutionContext(graph=g, active_arcs=active, rounds=rounds, seed=seed)
    trace = ExecutionTrace(active)
    flips: dict[Arc, int] = {a: 0 for a in active}
    adversary.start(ctx)
    for mach in machines:
        mach.start(ctx)
    for rnd in range(1, rounds + 1):
        sent: dict[Arc, int] = {}
        for mach in machines:
            bits = tuple(mach.send(rnd))
            if len(bits) != len(mach.out_arcs):
                raise EngineError(
                    f"party {mach.party} emitted {len(bits)} bits for "
                    f"{len(mach.out_arcs)} out-arcs in round {rnd}"
                )
            for arc, bit in zip(mach.out_arcs, bits):
                if bit not in (0, 1):
                    raise EngineError(f"party {mach.party} sent non-bit {bit!r}")
                sent[arc] = bit
        view = AdversaryView(
            round=rnd, sent=dict(sent), trace=trace, flips_so_far=dict(flips),
            inputs=inputs,
        )
        overrides = adversary.corrupt(view)
        delivered = dict(sent)
        for arc, bit in overrides.items():
            if arc not in sent:
                raise AdversaryError(
                    f"adversary corrupted non-transmitted arc {arc} in round {rnd}"
                )
            if bit not in (0, 1):
                raise AdversaryError(f"adversary delivered non-bit {bit!r}")
            delivered[arc] = bit
            if bit != sent[arc]:
                flips[arc] += 1
        trace.record(sent, delivered)
        for mach in machines:
            mach.deliver(
                rnd, tuple(delivered[a] for a in in_arcs[mach.party])
            )
    ledger = ErrorLedger(rounds=rounds, arcs=active, flips=dict(flips))
    outputs = {mach.party: mach.output() for mach in machines}
    return ExecutionResult(trace=trace, ledger=ledger, outputs=outputs, context=ctx)
