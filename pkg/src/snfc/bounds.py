"""
Upper bounds on the secure rate for computing the sum, by exhaustive search
over (cut set, wiretap set) pairs, and the cheap min-cut sandwich around them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, asdict

from .errors import TooLarge
from .network import (DEFAULT_MAX_ENUM_EDGES, Network, c_min, c_min_S,
                      enumerate_cut_sets)

__all__ = [
    "is_valid_pair",
    "target_bound",
    "source_bound",
    "closed_form",
    "bound_report",
    "BoundReport",
]


def is_valid_pair(net: Network, C, W) -> bool:
    """
    W inside C, C disconnects some source, and either some disconnected source
    is not upstream of W, or W is fed by every source and C disconnects all of them.
    """
    C = set(net.canon(C))
    W = set(net.canon(W))
    if not W <= C:
        return False
    I = set(net.disconnected_sources(C))
    if not I:
        return False
    D = set(net.upstream_sources(W))
    return bool(I - D) or (D == I == set(net.sources))


def _search(net, r, admissible, floor, max_edges):
    best, witness = None, None
    upstream = {}
    for C in enumerate_cut_sets(net, max_edges):
        if best is not None and len(C) - min(r, len(C)) >= best:
            continue
        I = set(net.disconnected_sources(C))
        for k in range(min(r, len(C)), -1, -1):
            if best is not None and len(C) - k >= best:
                break
            for W in itertools.combinations(C, k):
                if W not in upstream:
                    upstream[W] = set(net.upstream_sources(W))
                if admissible(I, upstream[W]):
                    best, witness = len(C) - k, (C, W)
                    break
        if best is not None and best <= floor:
            break
    return best, witness


def _target_search(net, r, max_edges, prune=True):
    S = set(net.sources)

    def ok(I, D):
        return bool(I - D) or (D == I == S)

    # C_min - r can never be beaten, so stop once it is reached
    floor = max(0, c_min(net) - r) if prune else 0
    return _search(net, r, ok, floor, max_edges)


def _source_search(net, r, max_edges):
    return _search(net, r, lambda I, D: D <= I, 0, max_edges)


def target_bound(net: Network, r: int, max_edges: int = DEFAULT_MAX_ENUM_EDGES,
                 prune: bool = True) -> int:
    """
    Smallest ``|C| - |W|`` over valid pairs with ``|W| <= r``.

    Returns 0 outright when ``r`` exceeds the min cut from all sources to the
    sink.  Raises TooLarge when the network has more than ``max_edges`` edges.
    ``prune=False`` disables the early stop at ``C_min - r`` so the search does
    not presuppose that lower bound.
    """
    if r > c_min_S(net):
        return 0
    return _target_search(net, r, max_edges, prune)[0]


def source_bound(net: Network, r: int, max_edges: int = DEFAULT_MAX_ENUM_EDGES) -> int:
    """Smallest ``|C| - |W|`` with W inside the cut set C and every source upstream of W cut off by C."""
    return _source_search(net, r, max_edges)[0]


def closed_form(net: Network, r: int) -> tuple[int, int]:
    cm, cs = c_min(net), c_min_S(net)
    if r > cs:
        return 0, 0
    return max(0, cm - r), min(cm, cs - r)


@dataclass
class BoundReport:
    r: int
    mode: str
    c_min: int
    c_min_S: int
    closed_lower: int
    closed_upper: int
    target_bound: int | None = None
    source_bound: int | None = None
    target_witness: dict | None = None
    source_witness: dict | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _wit(w):
    return None if w is None else {"C": list(w[0]), "W": list(w[1])}


def bound_report(net: Network, r: int, max_edges: int = DEFAULT_MAX_ENUM_EDGES,
                 fallback: bool = True) -> BoundReport:
    """
    All bounds at once.  When the cut-set enumeration is too large and
    ``fallback`` is set, only the closed-form interval is filled in.
    """
    lo, hi = closed_form(net, r)
    rep = BoundReport(r, "exhaustive", c_min(net), c_min_S(net), lo, hi)
    try:
        if r > rep.c_min_S:
            rep.target_bound = 0
        else:
            rep.target_bound, tw = _target_search(net, r, max_edges)
            rep.target_witness = _wit(tw)
        rep.source_bound, sw = _source_search(net, r, max_edges)
        rep.source_witness = _wit(sw)
    except TooLarge:
        if not fallback:
            raise
        rep.mode = "closed_form"
        rep.target_bound = rep.source_bound = None
        rep.target_witness = rep.source_witness = None
    return rep
