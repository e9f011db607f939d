"""Simple digraphs and the graph parameters consumed by compilers and attacks.

Vertices are integers 0..n-1.  Arcs are ordered pairs (i, j) with i != j; no
parallel arcs.  All operations are pure functions of their inputs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

Arc = tuple[int, int]


class GraphError(ValueError):
    pass


class SizeLimitError(GraphError):
    """Raised when an exact (exponential) routine is asked for too large an input."""


class Digraph:
    """Simple directed graph: no loops, no parallel arcs."""

    __slots__ = ("n", "arcs", "m", "_out", "_in")

    def __init__(self, n: int, arcs: Iterable[Arc]):
        if n < 0:
            raise GraphError("vertex count must be nonnegative")
        arcset = set()
        for a in arcs:
            i, j = int(a[0]), int(a[1])
            if i == j:
                raise GraphError(f"loop at vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise GraphError(f"arc ({i}, {j}) out of range for n={n}")
            arcset.add((i, j))
        self.n = n
        self.arcs = frozenset(arcset)
        self.m = len(self.arcs)
        out: dict[int, list[int]] = {v: [] for v in range(n)}
        inn: dict[int, list[int]] = {v: [] for v in range(n)}
        for i, j in sorted(self.arcs):
            out[i].append(j)
            inn[j].append(i)
        self._out = {v: tuple(ws) for v, ws in out.items()}
        self._in = {v: tuple(sorted(ws)) for v, ws in inn.items()}

    def out_neighbors(self, v: int) -> tuple[int, ...]:
        return self._out[v]

    def in_neighbors(self, v: int) -> tuple[int, ...]:
        return self._in[v]

    def out_arcs(self, v: int) -> tuple[Arc, ...]:
        return tuple((v, w) for w in self._out[v])

    def in_arcs(self, v: int) -> tuple[Arc, ...]:
        return tuple((u, v) for u in self._in[v])

    def outdeg(self, v: int) -> int:
        return len(self._out[v])

    def indeg(self, v: int) -> int:
        return len(self._in[v])

    def has_arc(self, i: int, j: int) -> bool:
        return (i, j) in self.arcs

    def sorted_arcs(self) -> tuple[Arc, ...]:
        return tuple(sorted(self.arcs))

    def reverse(self) -> "Digraph":
        return Digraph(self.n, ((j, i) for i, j in self.arcs))

    def subgraph(self, arcs: Iterable[Arc]) -> "Digraph":
        arcs = set(arcs)
        extra = arcs - self.arcs
        if extra:
            raise GraphError(f"arcs not in graph: {sorted(extra)}")
        return Digraph(self.n, arcs)

    def is_symmetric(self) -> bool:
        return all((j, i) in self.arcs for i, j in self.arcs)

    def isolated_vertices(self) -> tuple[int, ...]:
        return tuple(
            v for v in range(self.n) if not self._out[v] and not self._in[v]
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Digraph)
            and self.n == other.n
            and self.arcs == other.arcs
        )

    def __hash__(self) -> int:
        return hash((self.n, self.arcs))

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, arcs={sorted(self.arcs)})"


# ---------------------------------------------------------------------------
# reachability

def reachable_sets(g: Digraph) -> tuple[int, ...]:
    """Per-vertex reachability as bitmasks; vertex v is reachable from itself."""
    masks = [1 << v for v in range(g.n)]
    for v in range(g.n):
        seen = 1 << v
        stack = [v]
        while stack:
            u = stack.pop()
            for w in g.out_neighbors(u):
                if not seen >> w & 1:
                    seen |= 1 << w
                    stack.append(w)
        masks[v] = seen
    return tuple(masks)


def reachability_equivalent(g: Digraph, h: Digraph) -> bool:
    return g.n == h.n and reachable_sets(g) == reachable_sets(h)


def shortest_path(g: Digraph, src: int, dst: int) -> tuple[int, ...] | None:
    """BFS shortest path as a vertex sequence, deterministic (sorted adjacency)."""
    if src == dst:
        return (src,)
    parent = {src: src}
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            for w in g.out_neighbors(u):
                if w not in parent:
                    parent[w] = u
                    if w == dst:
                        path = [dst]
                        while path[-1] != src:
                            path.append(parent[path[-1]])
                        return tuple(reversed(path))
                    nxt.append(w)
        frontier = nxt
    return None


def all_pairs_distances(g: Digraph) -> list[list[int | None]]:
    dist: list[list[int | None]] = [[None] * g.n for _ in range(g.n)]
    for s in range(g.n):
        dist[s][s] = 0
        frontier = [s]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for u in frontier:
                for w in g.out_neighbors(u):
                    if dist[s][w] is None:
                        dist[s][w] = d
                        nxt.append(w)
            frontier = nxt
    return dist


# ---------------------------------------------------------------------------
# condensation

@dataclass(frozen=True)
class Condensation:
    components: tuple[tuple[int, ...], ...]  # topological order, each sorted
    dag: Digraph  # on component indices
    weights: dict[Arc, int]  # dag arc -> number of original arcs
    component_of: tuple[int, ...]  # vertex -> component index


def condensation(g: Digraph) -> Condensation:
    """Strongly connected components (Tarjan, iterative) plus the weighted DAG."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    comps: list[tuple[int, ...]] = []
    counter = itertools.count()

    for root in range(g.n):
        if root in index:
            continue
        work = [(root, iter(g.out_neighbors(root)))]
        index[root] = low[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = next(counter)
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(g.out_neighbors(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(tuple(sorted(comp)))

    # Tarjan emits components in reverse topological order.
    comps.reverse()
    comp_of = [0] * g.n
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    weights: dict[Arc, int] = {}
    for i, j in g.arcs:
        a, b = comp_of[i], comp_of[j]
        if a != b:
            weights[(a, b)] = weights.get((a, b), 0) + 1
    dag = Digraph(len(comps), weights.keys())
    return Condensation(tuple(comps), dag, weights, tuple(comp_of))


def _dag_required_arcs(dag: Digraph) -> set[Arc]:
    """Arcs of a DAG with no avoiding path; this is the DAG's unique minimum
    equivalent digraph (transitive reduction)."""
    required = set()
    for i, j in dag.arcs:
        pruned = Digraph(dag.n, dag.arcs - {(i, j)})
        if not reachable_sets(pruned)[i] >> j & 1:
            required.add((i, j))
    return required


# ---------------------------------------------------------------------------
# minimum equivalent digraph

_MED_EXACT_MAX_N = 8


def _mscs_feasible(
    n_idx: int,
    arcs: Sequence[Arc],
    size: int,
    include: set[Arc],
    exclude: set[Arc],
) -> bool:
    """Is there a strongly connected sub-arc-set of the given size on n_idx
    vertices, containing `include` and avoiding `exclude`?  Exact, via a 0/1
    program with one out-cut constraint per proper vertex subset."""
    from scipy.optimize import Bounds, LinearConstraint, milp
    import numpy as np

    k = len(arcs)
    pos = {a: t for t, a in enumerate(arcs)}
    lb = np.zeros(k)
    ub = np.ones(k)
    for a in include:
        lb[pos[a]] = 1.0
    for a in exclude:
        ub[pos[a]] = 0.0
    rows = []
    for mask in range(1, (1 << n_idx) - 1):
        row = np.zeros(k)
        for t, (i, j) in enumerate(arcs):
            if mask >> i & 1 and not mask >> j & 1:
                row[t] = 1.0
        rows.append(row)
    a_total = np.ones((1, k))
    constraints = [
        LinearConstraint(np.array(rows), lb=1.0),
        LinearConstraint(a_total, lb=size, ub=size),
    ]
    res = milp(
        c=np.zeros(k),
        integrality=np.ones(k),
        bounds=Bounds(lb, ub),
        constraints=constraints,
    )
    return res.success


def _mscs_exact(vertices: tuple[int, ...], arcs: Sequence[Arc]) -> set[Arc]:
    """Lexicographically-least minimum strongly connected spanning arc set of
    one strongly connected component."""
    if len(vertices) == 1:
        return set()
    relabel = {v: t for t, v in enumerate(vertices)}
    local = sorted((relabel[i], relabel[j]) for i, j in arcs)
    n_idx = len(vertices)
    size = n_idx
    while not _mscs_feasible(n_idx, local, size, set(), set()):
        size += 1
        if size > len(local):  # pragma: no cover - SCC is always feasible
            raise GraphError("no strongly connected subset found")
    chosen: set[Arc] = set()
    excluded: set[Arc] = set()
    for a in local:
        if len(chosen) == size:
            break
        if _mscs_feasible(n_idx, local, size, chosen | {a}, excluded):
            chosen.add(a)
        else:
            excluded.add(a)
    back = {t: v for v, t in relabel.items()}
    return {(back[i], back[j]) for i, j in chosen}


def med_exact(g: Digraph) -> Digraph:
    """Minimum equivalent digraph: reachability-equivalent subgraph of minimum
    arc count; the lexicographically smallest arc set among minimum solutions.

    Decomposes into an exact minimum strong spanning subgraph per SCC plus the
    unique transitive reduction of the condensation, one representative arc
    per required condensation arc.
    """
    if g.n > _MED_EXACT_MAX_N:
        raise SizeLimitError(f"med_exact limited to n <= {_MED_EXACT_MAX_N}")
    cond = condensation(g)
    keep: set[Arc] = set()
    for comp in cond.components:
        members = set(comp)
        internal = [a for a in g.sorted_arcs() if a[0] in members and a[1] in members]
        keep |= _mscs_exact(comp, internal)
    for a, b in _dag_required_arcs(cond.dag):
        rep = min(
            arc
            for arc in g.arcs
            if cond.component_of[arc[0]] == a and cond.component_of[arc[1]] == b
        )
        keep.add(rep)
    return g.subgraph(keep)


def _branching_arcs(g: Digraph, members: set[int], root: int) -> set[Arc]:
    """In-branching plus out-branching of the induced subgraph, rooted at root."""
    chosen: set[Arc] = set()
    # out-branching: BFS from root along internal arcs
    parent = {root: root}
    frontier = [root]
    while frontier:
        nxt = []
        for u in frontier:
            for w in g.out_neighbors(u):
                if w in members and w not in parent:
                    parent[w] = u
                    chosen.add((u, w))
                    nxt.append(w)
        frontier = nxt
    # in-branching: BFS from root along reversed internal arcs
    rparent = {root: root}
    frontier = [root]
    while frontier:
        nxt = []
        for u in frontier:
            for w in g.in_neighbors(u):
                if w in members and w not in rparent:
                    rparent[w] = u
                    chosen.add((w, u))
                    nxt.append(w)
        frontier = nxt
    return chosen


def med_heuristic(g: Digraph) -> Digraph:
    """Reachability-equivalent subgraph: per SCC an in-branching plus an
    out-branching rooted at the lowest-index vertex (at most 2(n_i - 1) arcs),
    plus one lowest-index representative arc per required condensation arc.
    """
    cond = condensation(g)
    keep: set[Arc] = set()
    for comp in cond.components:
        keep |= _branching_arcs(g, set(comp), comp[0])
    for a, b in _dag_required_arcs(cond.dag):
        keep.add(
            min(
                arc
                for arc in g.arcs
                if cond.component_of[arc[0]] == a and cond.component_of[arc[1]] == b
            )
        )
    return g.subgraph(keep)


def sparse_reachability_subgraph(g: Digraph) -> Digraph:
    """Reachability-equivalent subgraph with at most 5m/k arcs, where k is the
    relative edge connectivity.  Same construction as med_heuristic; the bound
    is checked."""
    sub = med_heuristic(g)
    if g.m:
        k = relative_edge_connectivity(g)
        bound = 5 * g.m / k
        if sub.m > bound:  # pragma: no cover - construction proof guarantees this
            raise GraphError(f"sparsifier bound violated: {sub.m} > {bound}")
    return sub


# ---------------------------------------------------------------------------
# relative edge connectivity

def min_arc_cut(g: Digraph, src: int, dst: int) -> tuple[int, set[Arc]]:
    """Minimum src->dst arc cut (unit capacities) via BFS augmenting paths.
    Returns (cut size, cut arc set); dst must be reachable from src."""
    if src == dst:
        raise GraphError("source equals sink")
    cap = {a: 1 for a in g.arcs}
    for i, j in g.arcs:
        cap.setdefault((j, i), 0)
    flow = {a: 0 for a in cap}
    value = 0
    while True:
        parent: dict[int, int] = {src: src}
        frontier = [src]
        while frontier and dst not in parent:
            nxt = []
            for u in frontier:
                for w in sorted(set(g.out_neighbors(u)) | set(g.in_neighbors(u))):
                    if w not in parent and cap[(u, w)] - flow[(u, w)] > 0:
                        parent[w] = u
                        nxt.append(w)
            frontier = nxt
        if dst not in parent:
            break
        v = dst
        while v != src:
            u = parent[v]
            flow[(u, v)] += 1
            flow[(v, u)] -= 1
            v = u
        value += 1
    if value == 0:
        raise GraphError(f"{dst} not reachable from {src}")
    reach = {src}
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            for w in sorted(set(g.out_neighbors(u)) | set(g.in_neighbors(u))):
                if w not in reach and cap[(u, w)] - flow[(u, w)] > 0:
                    reach.add(w)
                    nxt.append(w)
        frontier = nxt
    cut = {(i, j) for (i, j) in g.arcs if i in reach and j not in reach}
    return value, cut


def relative_edge_connectivity(g: Digraph) -> int:
    """Least k such that removing k arcs changes the reachability relation:
    the minimum, over ordered reachable pairs, of the minimum arc cut."""
    if not g.arcs:
        raise GraphError("relative edge connectivity needs at least one arc")
    masks = reachable_sets(g)
    best = None
    for u in range(g.n):
        for v in range(g.n):
            if u != v and masks[u] >> v & 1:
                value, _ = min_arc_cut(g, u, v)
                if best is None or value < best:
                    best = value
                    if best == 1:
                        return 1
    assert best is not None
    return best


def rec_min_cut(g: Digraph) -> tuple[int, set[Arc], Arc]:
    """REC together with a witnessing cut set and the (lexicographically first)
    reachable pair it separates."""
    if not g.arcs:
        raise GraphError("relative edge connectivity needs at least one arc")
    masks = reachable_sets(g)
    best: tuple[int, set[Arc], Arc] | None = None
    for u in range(g.n):
        for v in range(g.n):
            if u != v and masks[u] >> v & 1:
                value, cut = min_arc_cut(g, u, v)
                if best is None or value < best[0]:
                    best = (value, cut, (u, v))
    assert best is not None
    return best


# ---------------------------------------------------------------------------
# signal diameter and chain-length

def signal_diameter(g: Digraph) -> int:
    """Maximum finite distance between distinct vertices."""
    dist = all_pairs_distances(g)
    finite = [
        dist[u][v]
        for u in range(g.n)
        for v in range(g.n)
        if u != v and dist[u][v] is not None
    ]
    if not finite:
        raise GraphError("no reachable ordered pair")
    return max(finite)


def chain_length_walk(g: Digraph) -> tuple[int, tuple[int, ...], dict[int, int]]:
    """Chain-length R (max distinct vertices on any directed walk), plus a
    witnessing walk of length < n^2 whose per-vertex visit counts lie in [1, R].

    A walk's visited components form a path in the condensation, so R is the
    maximum component-size sum over condensation paths.
    """
    if not g.arcs:
        raise GraphError("chain length needs at least one arc")
    cond = condensation(g)
    q = cond.dag.n
    sizes = [len(c) for c in cond.components]
    # longest (by vertex weight) path in the DAG; components are indexed in
    # topological order already
    best_from = list(sizes)
    succ = [-1] * q
    for c in range(q - 1, -1, -1):
        for d in cond.dag.out_neighbors(c):
            if sizes[c] + best_from[d] > best_from[c]:
                best_from[c] = sizes[c] + best_from[d]
                succ[c] = d
    start = max(range(q), key=lambda c: (best_from[c], -c))
    r = best_from[start]
    comp_path = [start]
    while succ[comp_path[-1]] != -1:
        comp_path.append(succ[comp_path[-1]])
    visit_order: list[int] = []
    for c in comp_path:
        visit_order.extend(cond.components[c])
    walk = [visit_order[0]]
    for nxt in visit_order[1:]:
        seg = shortest_path(g, walk[-1], nxt)
        assert seg is not None
        walk.extend(seg[1:])
    counts: dict[int, int] = {}
    for v in walk:
        counts[v] = counts.get(v, 0) + 1
    assert len(counts) == r and len(walk) - 1 < g.n * g.n
    return r, tuple(walk), counts


@dataclass(frozen=True)
class GraphMetrics:
    edge_connectivity_relative: int
    signal_diameter: int
    chain_length: int
    med_size: int
    med_exact: bool  # whether med_size came from the exact search


def graph_metrics(g: Digraph) -> GraphMetrics:
    if g.n <= _MED_EXACT_MAX_N:
        med = med_exact(g)
        exact = True
    else:
        med = med_heuristic(g)
        exact = False
    return GraphMetrics(
        edge_connectivity_relative=relative_edge_connectivity(g),
        signal_diameter=signal_diameter(g),
        chain_length=chain_length_walk(g)[0],
        med_size=med.m,
        med_exact=exact,
    )


# ---------------------------------------------------------------------------
# edge-list text format: first line n, then one "i j" arc per line

def parse_edge_list(text: str) -> Digraph:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise GraphError("empty edge-list")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise GraphError(f"bad vertex count line: {lines[0]!r}") from exc
    arcs = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphError(f"bad arc line: {ln!r}")
        arcs.append((int(parts[0]), int(parts[1])))
    return Digraph(n, arcs)


def format_edge_list(g: Digraph) -> str:
    out = [str(g.n)]
    out.extend(f"{i} {j}" for i, j in g.sorted_arcs())
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# generators (CLI plumbing)

def directed_path(k: int) -> Digraph:
    return Digraph(k, ((i, i + 1) for i in range(k - 1)))


def directed_cycle(k: int) -> Digraph:
    return Digraph(k, (((i, (i + 1) % k) for i in range(k))))


def complete_bidirected(n: int) -> Digraph:
    return Digraph(n, ((i, j) for i in range(n) for j in range(n) if i != j))


def bidirected(n: int, edges: Iterable[tuple[int, int]]) -> Digraph:
    arcs = []
    for u, v in edges:
        arcs.append((u, v))
        arcs.append((v, u))
    return Digraph(n, arcs)


def inward_star(q: int) -> Digraph:
    """Star on q+1 vertices: q arcs leaf->center plus one arc center->leaf 1."""
    arcs = [(leaf, 0) for leaf in range(1, q + 1)]
    arcs.append((0, 1))
    return Digraph(q + 1, arcs)


def transitive_tournament(n: int) -> Digraph:
    return Digraph(n, ((i, j) for i in range(n) for j in range(i + 1, n)))


def random_connected_undirected(n: int, p: float, seed: int) -> Digraph:
    """Random symmetric digraph, made connected with a random spanning tree."""
    import random as _random

    rng = _random.Random(f"graph:{n}:{p}:{seed}")
    edges = set()
    order = list(range(n))
    rng.shuffle(order)
    for t in range(1, n):
        edges.add(tuple(sorted((order[t], order[rng.randrange(t)]))))
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.add((u, v))
    return bidirected(n, edges)


def random_digraph_no_isolated(n: int, p: float, seed: int) -> Digraph:
    """Random digraph where every vertex has at least one incident arc."""
    import random as _random

    rng = _random.Random(f"digraph:{n}:{p}:{seed}")
    arcs = set()
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < p:
                arcs.add((u, v))
    g = Digraph(n, arcs)
    for v in g.isolated_vertices():
        w = rng.randrange(n - 1)
        w = w if w < v else w + 1
        arcs.add((v, w) if rng.random() < 0.5 else (w, v))
    return Digraph(n, arcs)


GENERATORS = {
    "path": lambda k: directed_path(int(k)),
    "cycle": lambda k: directed_cycle(int(k)),
    "complete": lambda n: complete_bidirected(int(n)),
    "star": lambda q: inward_star(int(q)),
    "tournament": lambda n: transitive_tournament(int(n)),
    "randundirected": lambda n, p, seed: random_connected_undirected(
        int(n), float(p), int(seed)
    ),
    "randdigraph": lambda n, p, seed: random_digraph_no_isolated(
        int(n), float(p), int(seed)
    ),
}


def make_graph(spec: str) -> Digraph:
    """Build a graph from a generator spec like 'complete:6' or 'randundirected:8:0.4:1'."""
    name, _, rest = spec.partition(":")
    if name not in GENERATORS:
        raise GraphError(f"unknown generator {name!r}; known: {sorted(GENERATORS)}")
    args = rest.split(":") if rest else []
    return GENERATORS[name](*args)
