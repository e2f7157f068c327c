"""
Scalar linear network codes that compute the sum of the source messages.

Every source ``i`` holds a message row ``m_i`` of length ``ell`` and a key row
``k_i`` of length ``z[i]``.  The concatenation ``m_1 k_1 m_2 k_2 ...`` is the
input vector ``x``, and the symbol on edge ``e`` is ``x @ g_e`` where ``g_e`` is
the edge's global vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gf
from .errors import FieldMismatch, IncompleteCode, ShapeError
from .network import Network, WiretapCollection

__all__ = [
    "LinearCode",
    "SecurityReport",
    "propagate",
    "check_computability",
    "check_target_security",
    "check_source_security",
    "evaluate",
    "sum_matrix",
    "source_matrix",
]


def _layout(ell, z):
    sizes = [ell + zi for zi in z]
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    return sizes, offsets


def sum_matrix(ell: int, z) -> np.ndarray:
    """Stacked ``[I; 0]`` blocks: ``x @ T`` is the sum of the message rows."""
    sizes, offsets = _layout(ell, z)
    T = np.zeros((offsets[-1], ell), dtype=np.int64)
    for i in range(len(z)):
        T[offsets[i]:offsets[i] + ell] = np.eye(ell, dtype=np.int64)
    return T


def source_matrix(ell: int, z) -> np.ndarray:
    """Block-diagonal ``[I; 0]`` blocks: ``x @ Gamma`` is all message rows side by side."""
    return gf.block_diag([np.vstack([np.eye(ell, dtype=np.int64),
                                     np.zeros((zi, ell), dtype=np.int64)]) for zi in z])


def propagate(net: Network, F: gf.GF, ell: int, z, source_columns, pair_coeffs) -> dict:
    """
    Global vectors from local coefficients, visiting edges in topological order.

    Source out-edges embed their column into the source's block; any other edge
    is the combination of the globals on its tail's input edges.  Missing pair
    coefficients count as zero.
    """
    sizes, offsets = _layout(ell, z)
    n = int(offsets[-1])
    g = {}
    for eid in net.topo_edges:
        i = net.source_of(eid)
        if i is not None:
            if eid not in source_columns:
                raise IncompleteCode(f"no source column for edge {eid!r}")
            col = np.asarray(source_columns[eid], dtype=np.int64).ravel()
            if col.shape != (sizes[i],):
                raise ShapeError(f"source column of {eid!r} has length {col.size}, expected {sizes[i]}")
            v = np.zeros(n, dtype=np.int64)
            v[offsets[i]:offsets[i + 1]] = col
        else:
            v = np.zeros(n, dtype=np.int64)
            coeffs = pair_coeffs.get(eid, {})
            for d in net.in_edges(net.edge(eid).tail):
                c = int(coeffs.get(d, 0))
                if c:
                    v = np.asarray(F.add(v, F.mul(c, g[d])), dtype=np.int64)
        g[eid] = v
    return {e: g[e] for e in net.edge_ids}


class LinearCode:
    """
    A scalar linear code on a network.

    Build one with :meth:`from_locals` (globals are propagated) or
    :meth:`from_globals` (globals given directly, locals absent).

    Attributes
    ----------
    net, F, ell, z
    globals : dict edge id -> 1-D array of length ``s*ell + sum(z)``
    source_columns, pair_coeffs : local data, or None for globals-only codes
    """

    def __init__(self, net: Network, F: gf.GF, ell: int, z, globals_, source_columns=None,
                 pair_coeffs=None):
        z = tuple(int(x) for x in z)
        if len(z) != net.s:
            raise ShapeError(f"{len(z)} key sizes for {net.s} sources")
        if ell < 0 or min(z, default=0) < 0:
            raise ValueError("dimensions must be non-negative")
        self.net = net
        self.F = F
        self.ell = int(ell)
        self.z = z
        self.sizes, self.offsets = _layout(self.ell, z)
        n = self.dim
        g = {}
        for eid in net.edge_ids:
            if eid not in globals_:
                raise IncompleteCode(f"no global vector for edge {eid!r}")
            v = np.asarray(globals_[eid], dtype=np.int64).ravel()
            if v.shape != (n,):
                raise ShapeError(f"global vector of {eid!r} has length {v.size}, expected {n}")
            if v.size and (v.min() < 0 or v.max() >= F.q):
                raise ValueError(f"global vector of {eid!r} has entries outside GF({F.q})")
            g[eid] = v
        extra = set(globals_) - set(g)
        if extra:
            raise KeyError(f"unknown edges in globals: {sorted(extra)}")
        self.globals = g
        self.source_columns = None if source_columns is None else {
            e: np.asarray(c, dtype=np.int64).ravel() for e, c in source_columns.items()}
        self.pair_coeffs = None if pair_coeffs is None else {
            e: {d: int(c) for d, c in m.items()} for e, m in pair_coeffs.items()}
        self.provenance = None  # filled in by the constructions

    @classmethod
    def from_locals(cls, net, F, ell, z, locals_: dict) -> "LinearCode":
        sc = locals_["source_columns"]
        pc = locals_.get("pair_coeffs", {})
        return cls(net, F, ell, z, propagate(net, F, ell, z, sc, pc), sc, pc)

    @classmethod
    def from_globals(cls, net, F, ell, z, globals_) -> "LinearCode":
        return cls(net, F, ell, z, globals_)

    # -- shapes --

    @property
    def dim(self) -> int:
        return int(self.offsets[-1])

    @property
    def s(self) -> int:
        return self.net.s

    @property
    def has_locals(self) -> bool:
        return self.source_columns is not None

    def block(self, i: int) -> slice:
        return slice(int(self.offsets[i]), int(self.offsets[i + 1]))

    @property
    def T(self) -> np.ndarray:
        return sum_matrix(self.ell, self.z)

    @property
    def Gamma(self) -> np.ndarray:
        return source_matrix(self.ell, self.z)

    def G(self, edges) -> np.ndarray:
        """Global vectors of the given edges as columns, in canonical edge order."""
        edges = self.net.canon(edges)
        if not edges:
            return np.zeros((self.dim, 0), dtype=np.int64)
        return np.column_stack([self.globals[e] for e in edges])

    @property
    def G_sink(self) -> np.ndarray:
        return self.G(self.net.in_edges(self.net.sink))

    # -- serialization --

    def to_dict(self) -> dict:
        d = {
            "field": self.F.q,
            "ell": self.ell,
            "z": list(self.z),
            "globals": {e: [int(x) for x in self.globals[e]] for e in self.net.edge_ids},
        }
        if self.F.poly is not None:
            d["poly"] = list(self.F.poly)
        if self.has_locals:
            d["locals"] = {
                "source_columns": {e: [int(x) for x in c] for e, c in self.source_columns.items()},
                "pair_coeffs": {e: dict(m) for e, m in self.pair_coeffs.items()},
            }
        return d

    @classmethod
    def from_dict(cls, net: Network, d: dict, F: gf.GF | None = None) -> "LinearCode":
        poly = tuple(d["poly"]) if d.get("poly") is not None else None
        Fd = gf.field(int(d["field"]), poly)
        if F is not None and F != Fd:
            raise FieldMismatch(f"code is over {Fd!r} but {F!r} was expected")
        if "globals" in d and d["globals"]:
            loc = d.get("locals")
            return cls(net, Fd, d["ell"], d["z"], d["globals"],
                       loc["source_columns"] if loc else None,
                       loc.get("pair_coeffs", {}) if loc else None)
        if "locals" not in d:
            raise IncompleteCode("code file has neither globals nor locals")
        return cls.from_locals(net, Fd, d["ell"], d["z"], d["locals"])

    def __repr__(self):
        return f"LinearCode(GF({self.F.q}), ell={self.ell}, z={list(self.z)})"


def _same_field(a: gf.GF, b: gf.GF):
    if a != b:
        raise FieldMismatch(f"{a!r} vs {b!r}")


def check_computability(code: LinearCode) -> np.ndarray | None:
    """Decoding matrix ``D`` with ``G_sink @ D == T``, or None when the sum is not recoverable."""
    return gf.solve_right(code.F, code.G_sink, code.T)


@dataclass(frozen=True)
class SecurityReport:
    secure: bool
    kind: str
    checked: int
    witness: tuple | None = None
    vector: list | None = None

    def to_dict(self) -> dict:
        d = {"secure": self.secure, "kind": self.kind, "checked": self.checked}
        if not self.secure:
            d["witness"] = list(self.witness)
            d["vector"] = list(self.vector)
        return d


def _wiretap_sets(wiretaps):
    if isinstance(wiretaps, WiretapCollection):
        return wiretaps.sets
    return tuple(wiretaps)


def _check(code: LinearCode, wiretaps, target: np.ndarray, kind: str) -> SecurityReport:
    n = 0
    for W in _wiretap_sets(wiretaps):
        n += 1
        W = code.net.canon(W)
        if not W or target.shape[1] == 0:
            continue
        inter = gf.column_space_intersection(code.F, code.G(W), target)
        if inter.shape[1]:
            return SecurityReport(False, kind, n, W, [int(x) for x in inter[:, 0]])
    return SecurityReport(True, kind, n)


def check_target_security(code: LinearCode, wiretaps) -> SecurityReport:
    """Secure iff no wiretap set's global vectors span a nonzero vector of ``<T>``."""
    return _check(code, wiretaps, code.T, "target")


def check_source_security(code: LinearCode, wiretaps) -> SecurityReport:
    """Secure iff no wiretap set's global vectors span a nonzero vector of ``<Gamma>``."""
    return _check(code, wiretaps, code.Gamma, "source")


def input_vector(code: LinearCode, messages, keys=None) -> np.ndarray:
    m = np.asarray(messages, dtype=np.int64).reshape(code.s, code.ell)
    if keys is None:
        keys = [np.zeros(zi, dtype=np.int64) for zi in code.z]
    if len(keys) != code.s:
        raise ShapeError(f"{len(keys)} key rows for {code.s} sources")
    parts = []
    for i in range(code.s):
        k = np.asarray(keys[i], dtype=np.int64).ravel()
        if k.size != code.z[i]:
            raise ShapeError(f"key row {i} has length {k.size}, expected {code.z[i]}")
        parts += [m[i], k]
    x = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
    if x.size and (x.min() < 0 or x.max() >= code.F.q):
        raise ValueError("message or key symbol outside the field")
    return x


def evaluate(code: LinearCode, messages, keys=None, decoder=None) -> dict:
    """
    Run the code on concrete inputs.

    Returns a dict with ``y`` (edge id -> transmitted symbol) and ``decoded``
    (the sink's output row, or None if the code is not computable).
    """
    try:
        x = input_vector(code, messages, keys)
    except ValueError as exc:
        if isinstance(exc, ShapeError):
            raise
        raise ShapeError(str(exc)) from exc
    F = code.F
    y = {e: int(F.matmul(x[None, :], code.globals[e][:, None])[0, 0]) if code.dim else 0
         for e in code.net.edge_ids}
    D = check_computability(code) if decoder is None else np.asarray(decoder)
    decoded = None
    if D is not None:
        y_rho = np.array([y[e] for e in code.net.canon(code.net.in_edges(code.net.sink))],
                         dtype=np.int64)
        decoded = [int(v) for v in F.matmul(y_rho[None, :], D)[0]] if D.size else []
    return {"y": y, "decoded": decoded}
