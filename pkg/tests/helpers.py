"""Brute-force references and random instance generators shared by the tests."""

import itertools

import networkx as nx
import numpy as np

def all_paths(net, start):
    """Every edge path starting at node ``start`` (as tuples of edge ids), including prefixes."""
    out = []

    def walk(v, prefix):
        for e in net.edges:
            if e.tail == v:
                p = prefix + (e.id,)
                out.append(p)
                walk(e.head, p)

    walk(start, ())
    return out


def brute_D(net, C):
    return {s for s in net.sources for p in all_paths(net, s) if p[-1] in C}


def brute_I(net, C):
    I = set()
    for s in net.sources:
        alive = [p for p in all_paths(net, s)
                 if net.edge(p[-1]).head == net.sink and not set(p) & set(C)]
        if not alive:
            I.add(s)
    return I


def separates(net, X, Y, D):
    """Every path from D that reaches an edge of Y passes an edge of X at or before it."""
    X = set(X)
    for s in D:
        for p in all_paths(net, s):
            if p[-1] in Y and not X & set(p):
                return False
    return True


def brute_mincut_value(net, D, Y):
    ids = net.edge_ids
    for k in range(len(ids) + 1):
        for C in itertools.combinations(ids, k):
            if separates(net, C, Y, D):
                return k


def brute_node_mincut(net, sources):
    sink_edges = set(net.in_edges(net.sink))
    return brute_mincut_value(net, sources, sink_edges)


def nx_mincut(net, sources):
    G = nx.DiGraph()
    for e in net.edges:
        # split each edge so parallel edges survive in a simple digraph
        G.add_edge(e.tail, ("x", e.id), capacity=1)
        G.add_edge(("x", e.id), e.head, capacity=len(net.edges) + 1)
    for s in sources:
        G.add_edge("SS", s, capacity=len(net.edges) + 1)
    return nx.maximum_flow_value(G, "SS", net.sink)


def brute_bounds(net, r):
    """
    Target and source bounds straight from the definitions, scanning every
    edge subset C and every W inside it with no pruning.
    """
    S = set(net.sources)
    ids = net.edge_ids
    target = source = None
    for k in range(1, len(ids) + 1):
        for C in itertools.combinations(ids, k):
            I = brute_I(net, C)
            if not I:
                continue
            for j in range(0, min(r, k) + 1):
                for W in itertools.combinations(C, j):
                    D = brute_D(net, W)
                    v = k - j
                    if (I - D) or (D == I == S):
                        target = v if target is None else min(target, v)
                    if D <= I:
                        source = v if source is None else min(source, v)
    return target, source


def random_code(seed, qs=(2, 3, 5), max_inputs=20_000):
    """
    A random scalar linear code on a random small network, with ``ell <= 2``
    and ``z_i <= 1``, together with a random wiretap set of one or two edges.
    Dimensions are redrawn until ``q**n`` stays under ``max_inputs``.
    """
    from snfc import gf
    from snfc.code import LinearCode
    from snfc.network import random_network

    rng = np.random.default_rng(seed)
    net = random_network(int(rng.integers(2**31)))
    q = int(rng.choice(qs))
    F = gf.field(q)
    while True:
        ell = int(rng.choice([0, 1, 1, 2, 2]))
        keyed = rng.random() < 0.6
        z = [int(rng.integers(0, 2)) if keyed else 0 for _ in range(net.s)]
        if q ** (net.s * ell + sum(z)) <= max_inputs:
            break
    cols = {}
    for i, src in enumerate(net.sources):
        for e in net.out_edges(src):
            cols[e] = rng.integers(0, q, size=ell + z[i])
    pairs = {}
    for e in net.edge_ids:
        if net.source_of(e) is None:
            pairs[e] = {d: int(rng.integers(0, q)) for d in net.in_edges(net.edge(e).tail)}
    code = LinearCode.from_locals(net, F, ell, z, {"source_columns": cols, "pair_coeffs": pairs})
    size = min(len(net.edge_ids), int(rng.integers(1, 3)))
    W = tuple(sorted(rng.choice(net.edge_ids, size=size, replace=False).tolist()))
    return code, W
