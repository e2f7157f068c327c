"""
Directed acyclic networks with one sink and several source nodes.

Edges carry unit capacity and may be parallel.  Edge subsets are passed around
as tuples of edge ids in the network's canonical edge order (the order in
which edges were given), which keeps every enumeration deterministic.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import EmptyInput, TooLarge

__all__ = [
    "Edge",
    "Network",
    "CutAnalysis",
    "WiretapCollection",
    "validate",
    "cut_analysis",
    "mincut",
    "c_min",
    "c_min_S",
    "enumerate_cut_sets",
    "primary_min_cut",
    "wiretap_collection",
    "random_network",
    "max_flow",
]

DEFAULT_MAX_ENUM_EDGES = 20
DEFAULT_MAX_WIRETAP_SETS = 100_000


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str


class Network:
    """
    A network: a DAG, an ordered list of source nodes and a sink.

    Parameters
    ----------
    nodes : sequence of str
    edges : sequence of Edge or (id, tail, head) triples
        Their order is the canonical edge order.
    sources : sequence of str
    sink : str

    The constructor only checks that edges refer to known nodes and that ids
    are unique; use :func:`validate` for the structural assumptions.
    """

    def __init__(self, nodes, edges, sources, sink):
        self.nodes = tuple(str(v) for v in nodes)
        self.edges = tuple(e if isinstance(e, Edge) else Edge(*map(str, e)) for e in edges)
        self.sources = tuple(str(s) for s in sources)
        self.sink = str(sink)
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("duplicate node id")
        known = set(self.nodes)
        ids = set()
        for e in self.edges:
            if e.id in ids:
                raise ValueError(f"duplicate edge id {e.id!r}")
            ids.add(e.id)
            for end in (e.tail, e.head):
                if end not in known:
                    raise ValueError(f"edge {e.id!r} refers to unknown node {end!r}")
        for v in self.sources + (self.sink,):
            if v not in known:
                raise ValueError(f"unknown node {v!r}")
        self.edge_index = {e.id: k for k, e in enumerate(self.edges)}
        self.node_index = {v: k for k, v in enumerate(self.nodes)}
        self._in = {v: [] for v in self.nodes}
        self._out = {v: [] for v in self.nodes}
        for e in self.edges:
            self._out[e.tail].append(e.id)
            self._in[e.head].append(e.id)

    # -- basic queries --

    @property
    def s(self) -> int:
        return len(self.sources)

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.edges)

    def edge(self, eid: str) -> Edge:
        return self.edges[self.edge_index[eid]]

    def in_edges(self, v: str) -> list[str]:
        return list(self._in[v])

    def out_edges(self, v: str) -> list[str]:
        return list(self._out[v])

    def source_of(self, eid: str) -> int | None:
        """Index of the source whose out-edge this is, or None."""
        tail = self.edge(eid).tail
        return self.sources.index(tail) if tail in self.sources else None

    def canon(self, edge_set) -> tuple[str, ...]:
        """Normalize an edge collection to a canonical-order tuple (KeyError on unknown ids)."""
        idx = sorted({self.edge_index[e] for e in edge_set})
        return tuple(self.edges[k].id for k in idx)

    @cached_property
    def topo_nodes(self) -> tuple[str, ...]:
        indeg = {v: len(self._in[v]) for v in self.nodes}
        queue = deque(v for v in self.nodes if indeg[v] == 0)
        order = []
        while queue:
            v = queue.popleft()
            order.append(v)
            for eid in self._out[v]:
                h = self.edge(eid).head
                indeg[h] -= 1
                if indeg[h] == 0:
                    queue.append(h)
        if len(order) != len(self.nodes):
            raise ValueError("network contains a directed cycle")
        return tuple(order)

    @cached_property
    def topo_edges(self) -> tuple[str, ...]:
        """Edges sorted by the topological position of their tails (stable)."""
        pos = {v: k for k, v in enumerate(self.topo_nodes)}
        return tuple(sorted(self.edge_ids, key=lambda e: (pos[self.edge(e).tail], self.edge_index[e])))

    @cached_property
    def _reach_from(self) -> dict[str, frozenset]:
        # nodes reachable from each node (including itself)
        out = {}
        for v in reversed(self.topo_nodes):
            acc = {v}
            for eid in self._out[v]:
                acc |= out[self.edge(eid).head]
            out[v] = frozenset(acc)
        return out

    def reaches(self, u: str, v: str) -> bool:
        return v in self._reach_from[u]

    def upstream_sources(self, edge_set) -> tuple[str, ...]:
        """D-set: sources with a path to some edge in the set."""
        tails = {self.edge(e).tail for e in edge_set}
        return tuple(s for s in self.sources if tails & self._reach_from[s])

    def disconnected_sources(self, edge_set) -> tuple[str, ...]:
        """I-set: sources with no path to the sink once the edges are removed."""
        removed = set(edge_set)
        alive = {self.sink}
        for v in reversed(self.topo_nodes):
            if v == self.sink:
                continue
            if any(eid not in removed and self.edge(eid).head in alive for eid in self._out[v]):
                alive.add(v)
        return tuple(s for s in self.sources if s not in alive)

    # -- serialization --

    def to_dict(self, q: int | None = None) -> dict:
        d = {
            "nodes": list(self.nodes),
            "edges": [{"id": e.id, "tail": e.tail, "head": e.head} for e in self.edges],
            "sources": list(self.sources),
            "sink": self.sink,
        }
        if q is not None:
            d["field"] = q
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Network":
        edges = [Edge(str(e["id"]), str(e["tail"]), str(e["head"])) for e in d["edges"]]
        return cls(d["nodes"], edges, d["sources"], d["sink"])

    def __eq__(self, other):
        return isinstance(other, Network) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash((self.nodes, self.edges, self.sources, self.sink))

    def __repr__(self):
        return f"Network({len(self.nodes)} nodes, {len(self.edges)} edges, sources={list(self.sources)})"


def validate(net: Network) -> list[str]:
    """Return a list of violated structural assumptions (empty when the network is fine)."""
    problems = []
    if not net.sources:
        problems.append("no source nodes")
    if len(set(net.sources)) != len(net.sources):
        problems.append("duplicate source node")
    if net.sink in net.sources:
        problems.append(f"sink {net.sink!r} is also a source")
    for s in net.sources:
        if net.in_edges(s):
            problems.append(f"source {s!r} has input edges {net.in_edges(s)}")
    if net.out_edges(net.sink):
        problems.append(f"sink {net.sink!r} has output edges {net.out_edges(net.sink)}")
    try:
        net.topo_nodes
    except ValueError:
        problems.append("directed cycle")
        return problems
    for v in net.nodes:
        if v != net.sink and not net.reaches(v, net.sink):
            problems.append(f"node {v!r} has no path to the sink")
    return problems


@dataclass(frozen=True)
class CutAnalysis:
    C: tuple
    D: tuple
    I: tuple
    J: tuple

    @property
    def is_cut_set(self) -> bool:
        return bool(self.I)

    @property
    def is_global(self) -> bool:
        return self._all is not None and set(self.I) == set(self._all)

    _all: tuple | None = field(default=None, repr=False, compare=False)


def cut_analysis(net: Network, C) -> CutAnalysis:
    C = net.canon(C)
    D = net.upstream_sources(C)
    I = net.disconnected_sources(C)
    J = tuple(s for s in D if s not in I)
    return CutAnalysis(C, D, I, J, _all=net.sources)


# -- max flow --

def max_flow(n: int, arcs, s: int, t: int) -> tuple[int, np.ndarray]:
    """
    Edmonds-Karp on a small graph.

    Parameters
    ----------
    n : number of vertices, labelled 0..n-1
    arcs : iterable of (u, v, capacity)
    s, t : source and sink vertex

    Returns
    -------
    value : int
    reachable : boolean array, vertices reachable from ``s`` in the final residual graph
    """
    head, cap, adj = [], [], [[] for _ in range(n)]
    for u, v, c in arcs:
        adj[u].append(len(head)); head.append(v); cap.append(c)
        adj[v].append(len(head)); head.append(u); cap.append(0)
    flow = 0
    while True:
        prev = [-1] * n
        seen = [False] * n
        seen[s] = True
        queue = deque([s])
        while queue and not seen[t]:
            u = queue.popleft()
            for a in adj[u]:
                v = head[a]
                if cap[a] > 0 and not seen[v]:
                    seen[v] = True
                    prev[v] = a
                    queue.append(v)
        if not seen[t]:
            return flow, np.array(seen)
        push = math.inf
        v = t
        while v != s:
            a = prev[v]
            push = min(push, cap[a])
            v = head[a ^ 1]
        v = t
        while v != s:
            a = prev[v]
            cap[a] -= push
            cap[a ^ 1] += push
            v = head[a ^ 1]
        flow += push


def mincut(net: Network, sources, target: str | None = None) -> int:
    """
    Minimum number of edges separating a node (or set of nodes) from ``target``.

    ``sources`` may be one node id or an iterable of node ids; a set is joined
    through a super-source with unbounded arcs.
    """
    if isinstance(sources, str):
        sources = [sources]
    target = net.sink if target is None else target
    n = len(net.nodes)
    big = len(net.edges) + 1
    arcs = [(net.node_index[e.tail], net.node_index[e.head], 1) for e in net.edges]
    arcs += [(n, net.node_index[v], big) for v in sources]
    value, _ = max_flow(n + 1, arcs, n, net.node_index[target])
    return value


def c_min(net: Network) -> int:
    return min(mincut(net, s) for s in net.sources)


def c_min_S(net: Network) -> int:
    return mincut(net, net.sources)


def enumerate_cut_sets(net: Network, max_edges: int = DEFAULT_MAX_ENUM_EDGES):
    """Yield every edge subset that disconnects at least one source, by (size, lex) order."""
    if len(net.edges) > max_edges:
        raise TooLarge(f"{len(net.edges)} edges exceed the enumeration cap of {max_edges}")
    ids = net.edge_ids
    for k in range(1, len(ids) + 1):
        for C in itertools.combinations(ids, k):
            if net.disconnected_sources(C):
                yield C


def primary_min_cut(net: Network, W) -> tuple[str, ...]:
    """
    The minimum cut between the upstream sources of W and W that lies closest
    to the sources.

    Every edge becomes a unit arc into an auxiliary vertex followed by an
    unbounded arc out of it, so cuts consist of original edges only.  After
    max-flow, the cut is the set of edges leaving the residual-reachable side.
    """
    W = net.canon(W)
    if not W:
        raise EmptyInput("primary minimum cut of an empty edge set")
    D = net.upstream_sources(W)
    if not D:  # pragma: no cover - an edge always has an upstream node; guarded for odd inputs
        raise EmptyInput("edge set has no upstream source")
    n, m = len(net.nodes), len(net.edges)
    big = m + 1
    ss, tt = n + m, n + m + 1
    arcs = []
    for k, e in enumerate(net.edges):
        arcs.append((net.node_index[e.tail], n + k, 1))
        arcs.append((n + k, net.node_index[e.head], big))
    for v in D:
        arcs.append((ss, net.node_index[v], big))
    for e in W:
        arcs.append((n + net.edge_index[e], tt, big))
    _, reach = max_flow(n + m + 2, arcs, ss, tt)
    return tuple(e.id for k, e in enumerate(net.edges)
                 if reach[net.node_index[e.tail]] and not reach[n + k])


@dataclass(frozen=True)
class WiretapCollection:
    r: int
    sets: tuple
    reduced: bool

    def __len__(self):
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def nonempty(self) -> tuple:
        return tuple(W for W in self.sets if W)


def _count_subsets(m: int, r: int) -> int:
    return sum(math.comb(m, k) for k in range(min(r, m) + 1))


def wiretap_collection(net: Network, r: int, reduce: bool = False,
                       max_sets: int = DEFAULT_MAX_WIRETAP_SETS) -> WiretapCollection:
    """
    All edge subsets of size at most ``r`` (including the empty set), or with
    ``reduce=True`` only the size-``r`` sets that are their own primary cut.
    """
    if r < 0:
        raise ValueError("security level must be non-negative")
    ids = net.edge_ids
    total = math.comb(len(ids), r) if reduce else _count_subsets(len(ids), r)
    if total > max_sets:
        raise TooLarge(f"{total} wiretap sets exceed the cap of {max_sets}")
    if reduce:
        if r == 0:
            return WiretapCollection(0, (), True)
        # sets no source can reach carry nothing and are never needed
        sets = tuple(W for W in itertools.combinations(ids, r)
                     if net.upstream_sources(W) and primary_min_cut(net, W) == W)
        return WiretapCollection(r, sets, True)
    sets = tuple(W for k in range(min(r, len(ids)) + 1) for W in itertools.combinations(ids, k))
    return WiretapCollection(r, sets, False)


def random_network(seed, n_sources: int | None = None, n_inner: int | None = None,
                   max_edges: int = 10, max_sources: int = 3) -> Network:
    """
    A seeded random network satisfying all structural assumptions.

    Nodes are laid out in topological order (sources, inner nodes, sink).  Each
    inner node first gets an in-edge from an earlier node, then every node
    without an out-edge gets one to a later non-source node, so every node is
    fed by some source and drains to the sink.  Extra edges (parallel ones
    allowed) are sprinkled at random up to a random total of at most ``max_edges``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if n_sources is None:
        n_sources = int(rng.integers(1, max_sources + 1))
    if n_inner is None:
        n_inner = int(rng.integers(0, 5))
    n_inner = max(0, min(n_inner, (max_edges - n_sources) // 2))
    if n_sources > max_edges:
        raise ValueError("too few edges for the requested node count")
    srcs = [f"s{i + 1}" for i in range(n_sources)]
    inner = [f"v{i + 1}" for i in range(n_inner)]
    nodes = srcs + inner + ["rho"]
    sink = len(nodes) - 1
    pairs = []
    for v in range(n_sources, sink):
        pairs.append((int(rng.integers(0, v)), v))
    for u in range(sink):
        if not any(a == u for a, _ in pairs):
            pairs.append((u, int(rng.integers(max(u + 1, n_sources), sink + 1))))
    n_edges = int(rng.integers(len(pairs), max(len(pairs), max_edges) + 1))
    while len(pairs) < n_edges:
        u = int(rng.integers(0, sink))
        pairs.append((u, int(rng.integers(max(u + 1, n_sources), sink + 1))))
    pairs.sort()
    edges = [Edge(f"e{k + 1}", nodes[u], nodes[v]) for k, (u, v) in enumerate(pairs)]
    return Network(nodes, edges, srcs, "rho")
