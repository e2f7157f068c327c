"""
Code constructions.

A *base code* computes the sum at rate ``R`` without any security.  A secure
code of rate ``R - r`` with ``r`` key symbols per source is obtained from it by
a block-diagonal change of basis at the sources:

* target mode picks one invertible ``R x R`` block per source,
* the source modes use a single block ``A`` repeated at every source.

The change of basis is applied to the global vectors (``g_e = M @ h_e``) and
to the source columns of the local data, so the pair coefficients of the base
code carry over unchanged.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import gf
from .code import LinearCode, check_computability, check_source_security, \
    check_target_security, source_matrix, sum_matrix
from .errors import ConstructionFailed, InternalError, SamplingExhausted, SelectionFailed
from .network import Network, WiretapCollection, c_min, wiretap_collection

__all__ = [
    "construct_base",
    "select_b_vectors",
    "assemble_transform",
    "transform_code",
    "construct_target",
    "construct_source_generalized",
    "construct_source_legacy",
    "required_field_size",
    "extension_lift",
    "target_conditions_hold",
    "source_conditions_hold",
    "selection_constraints_hold",
    "TransformKit",
    "SelectionState",
    "Provenance",
    "code_hash",
]

EXHAUSTIVE_LIMIT = 10**6
_BATCH = 64


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def code_hash(code: LinearCode) -> str:
    blob = json.dumps(code.to_dict(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


# -- base codes --

def _stacked_identity(R: int, s: int) -> np.ndarray:
    return np.vstack([np.eye(R, dtype=np.int64)] * s)


def base_decoder(base: LinearCode) -> np.ndarray | None:
    """``N`` with ``H_sink @ N`` equal to ``s`` stacked identities, or None."""
    return gf.solve_right(base.F, base.G_sink, _stacked_identity(base.ell, base.s))


def construct_base(net: Network, R: int, F: gf.GF, seed=0, max_retries: int = 1000) -> LinearCode:
    """
    Random rate-``R`` code computing the sum, with no keys.

    Sampling every local coefficient independently almost never lines the
    sources up at the sink, so the draw goes backwards instead: nonzero pair
    coefficients (uniform over the whole field on every other attempt, which
    matters for small fields where nonzero leaves no choice) and a uniform
    decoding matrix ``N`` are drawn, the
    contribution ``phi_e`` (a row ``R``-vector) of each edge to the decoded
    output is propagated from the sink towards the sources, and each source's
    columns are then solved as a random left inverse of its stacked ``phi``
    rows.  A draw fails only when some source sees rank below ``R``.

    Raises
    ------
    ConstructionFailed
        If ``R`` exceeds the smallest per-source min cut, or no draw succeeds
        within ``max_retries`` attempts.
    """
    if R < 0:
        raise ValueError("rate must be non-negative")
    cm = c_min(net)
    if R > cm:
        raise ConstructionFailed(f"rate {R} exceeds the smallest source min cut {cm}")
    rng = _rng(seed)
    z = [0] * net.s
    sink_in = net.canon(net.in_edges(net.sink))
    for attempt in range(max(1, max_retries)):
        low = attempt % 2  # zero deletes the pair, which routing sometimes needs
        pairs = {}
        for e in net.edges:
            if net.source_of(e.id) is None:
                ins = net.in_edges(e.tail)
                vals = rng.integers(1 - low, F.q, size=len(ins))
                pairs[e.id] = {d: int(v) for d, v in zip(ins, vals)}
        N = F.random(rng, (len(sink_in), R))
        while gf.rank(F, N) < R:  # the decoded output must have full rank
            N = F.random(rng, (len(sink_in), R))
        phi = {e: N[k] for k, e in enumerate(sink_in)}
        for eid in reversed(net.topo_edges):
            if eid in phi:
                continue
            acc = np.zeros(R, dtype=np.int64)
            for d in net.out_edges(net.edge(eid).head):
                c = pairs[d].get(eid, 0)
                if c:
                    acc = np.asarray(F.add(acc, F.mul(c, phi[d])), dtype=np.int64)
            phi[eid] = acc
        cols = {}
        for src in net.sources:
            outs = net.canon(net.out_edges(src))
            Phi = np.array([phi[e] for e in outs], dtype=np.int64).reshape(len(outs), R)
            Xt = gf.solve_right(F, Phi.T, np.eye(R, dtype=np.int64))
            if Xt is None:
                break
            K = gf.nullspace(F, Phi.T)
            if K.shape[1]:
                Xt = np.asarray(F.add(Xt, F.matmul(K, F.random(rng, (K.shape[1], R)))), dtype=np.int64)
            for k, e in enumerate(outs):
                cols[e] = Xt[k]
        else:
            code = LinearCode.from_locals(net, F, R, z, {"source_columns": cols, "pair_coeffs": pairs})
            if base_decoder(code) is None:  # pragma: no cover - guaranteed by the left inverses
                raise InternalError("base code does not compute the sum")
            return code
    raise ConstructionFailed(
        f"no rate-{R} base code found over GF({F.q}) in {max_retries} attempts; try a larger field")


# -- condition checks --

def _trivial_intersection(F, A, B) -> bool:
    if A.shape[1] == 0 or B.shape[1] == 0:
        return True
    return gf.rank(F, np.hstack([A, B])) == gf.rank(F, A) + gf.rank(F, B)


def _inside(F, A, B) -> bool:
    """Column space of A contained in that of B."""
    return A.shape[1] == 0 or gf.rank(F, np.hstack([B, A])) == gf.rank(F, B)


def _sets(wiretaps):
    return wiretaps.sets if isinstance(wiretaps, WiretapCollection) else tuple(wiretaps)


def target_conditions_hold(base: LinearCode, M, r: int, wiretaps, inverse_given: bool = False) -> bool:
    """
    Check an invertible ``Rs x Rs`` transform against the two target-mode
    requirements: ``M^-1 T`` lies in the sink span, and meets no wiretap span.
    With ``inverse_given`` the argument is ``M^-1`` itself.
    """
    F = base.F
    R, s = base.ell, base.s
    Minv = np.asarray(M) if inverse_given else gf.inverse(F, M)
    X = F.matmul(Minv, sum_matrix(R - r, [r] * s))
    if not _inside(F, X, base.G_sink):
        return False
    return all(_trivial_intersection(F, base.G(W), X) for W in _sets(wiretaps) if W)


def source_conditions_hold(base: LinearCode, M, r: int, wiretaps, inverse_given: bool = False) -> bool:
    """As :func:`target_conditions_hold` but with the block-diagonal message extractor on the wiretap side."""
    F = base.F
    R, s = base.ell, base.s
    Minv = np.asarray(M) if inverse_given else gf.inverse(F, M)
    X = F.matmul(Minv, sum_matrix(R - r, [r] * s))
    if not _inside(F, X, base.G_sink):
        return False
    Y = F.matmul(Minv, source_matrix(R - r, [r] * s))
    return all(_trivial_intersection(F, base.G(W), Y) for W in _sets(wiretaps) if W)


def selection_constraints_hold(base: LinearCode, columns, wiretaps) -> bool:
    """
    Sequential membership test for selected columns ``b_1, b_2, ...``.

    Each ``b_j`` must lie in the sink span, outside ``H_W + <b_1..b_{j-1}>`` for
    every wiretap set, and every per-source block of ``b_j`` must be outside the
    span of the earlier blocks of the same source.
    """
    F = base.F
    R, s = base.ell, base.s
    B = np.asarray(columns, dtype=np.int64).reshape(R * s, -1)
    sink = gf.Span(F, R * s, base.G_sink)
    for j in range(B.shape[1]):
        b = B[:, j]
        if not sink.contains(b):
            return False
        prev = B[:, :j]
        for W in _sets(wiretaps):
            if gf.Span(F, R * s, np.hstack([base.G(W), prev])).contains(b):
                return False
        for i in range(s):
            blk = slice(i * R, (i + 1) * R)
            if gf.Span(F, R, prev[blk]).contains(b[blk]):
                return False
    return True


# -- target mode --

@dataclass
class SelectionState:
    F: gf.GF
    R: int
    r: int
    s: int
    vectors: np.ndarray            # Rs x (R - r), columns b_1..b_{R-r}
    wiretaps: tuple
    exhaustive: bool = False       # whether the scan fallback was needed

    def block(self, i: int) -> np.ndarray:
        return self.vectors[i * self.R:(i + 1) * self.R]


def _coefficient_grid(q: int, k: int, start: int, stop: int) -> np.ndarray:
    """Rows ``start..stop-1`` of the odometer listing of GF(q)^k (first coordinate fastest)."""
    idx = np.arange(start, stop, dtype=np.int64)[:, None]
    return (idx // (q ** np.arange(k, dtype=np.int64))) % q


class _Forbidden:
    """Spans a candidate must avoid at the current selection step."""

    def __init__(self, F, R, s, base, sets):
        self.F, self.R, self.s = F, R, s
        n = R * s
        self.wire = [gf.Span(F, n, base.G(W)) for W in sets]
        self.blocks = [gf.Span(F, R) for _ in range(s)]

    def ok_rows(self, V) -> np.ndarray:
        good = np.ones(V.shape[0], dtype=bool)
        for i, sp in enumerate(self.blocks):
            good &= ~sp.contains_rows(V[:, i * self.R:(i + 1) * self.R])
            if not good.any():
                return good
        for sp in self.wire:
            idx = np.nonzero(good)[0]
            good[idx] = ~sp.contains_rows(V[idx])
            if not good.any():
                break
        return good

    def accept(self, b):
        for sp in self.wire:
            sp.add(b)
        for i, sp in enumerate(self.blocks):
            sp.add(b[i * self.R:(i + 1) * self.R])


def select_b_vectors(net: Network, base: LinearCode, R: int, r: int, wiretaps, seed=0,
                     samples: int = 512, exhaustive_limit: int = EXHAUSTIVE_LIMIT) -> SelectionState:
    """
    Choose ``b_1..b_{R-r}`` in the sink span one at a time.

    Candidates are random combinations of a fixed basis of the sink span; if
    ``samples`` random draws all fail at some step, every vector of the sink
    span is scanned (when there are at most ``exhaustive_limit`` of them).

    Raises
    ------
    SelectionFailed
        When no admissible vector exists at some step.
    """
    F = base.F
    if base.ell != R or any(base.z):
        raise ValueError("base code must have ell = R and no keys")
    if not 0 <= r <= R:
        raise ValueError("need 0 <= r <= R")
    rng = _rng(seed)
    s = net.s
    sets = tuple(W for W in _sets(wiretaps) if W)
    basis = gf.column_basis(F, base.G_sink)
    k = basis.shape[1]
    forb = _Forbidden(F, R, s, base, sets)
    chosen = []
    used_scan = False
    for j in range(R - r):
        pick = None
        drawn = 0
        while drawn < samples and pick is None:
            C = F.random(rng, (min(_BATCH, samples - drawn), k))
            drawn += C.shape[0]
            V = F.matmul(C, basis.T)
            good = np.nonzero(forb.ok_rows(V))[0]
            if good.size:
                pick = V[good[0]]
        if pick is None:
            total = F.q ** k
            if total > exhaustive_limit:
                raise SelectionFailed(
                    f"step {j + 1}: random search failed and the sink span has {total} vectors")
            used_scan = True
            for start in range(0, total, 1 << 14):
                V = F.matmul(_coefficient_grid(F.q, k, start, min(total, start + (1 << 14))), basis.T)
                good = np.nonzero(forb.ok_rows(V))[0]
                if good.size:
                    pick = V[good[0]]
                    break
        if pick is None:
            raise SelectionFailed(f"no admissible vector at step {j + 1} over GF({F.q})")
        pick = np.asarray(pick, dtype=np.int64)
        forb.accept(pick)
        chosen.append(pick)
    vectors = np.column_stack(chosen) if chosen else np.zeros((R * s, 0), dtype=np.int64)
    return SelectionState(F, R, r, s, vectors, sets, used_scan)


@dataclass
class TransformKit:
    mode: str
    F: gf.GF
    R: int
    r: int
    blocks: list                   # per-source R x R matrices (all equal in source modes)
    columns: np.ndarray            # selected columns (Rs x (R-r)), or R x R for source modes

    @property
    def matrix(self) -> np.ndarray:
        return gf.block_diag(self.blocks)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "blocks": [b.tolist() for b in self.blocks],
            "columns": np.asarray(self.columns).tolist(),
        }


def assemble_transform(selection: SelectionState, base: LinearCode | None = None,
                       completion=None) -> TransformKit:
    """
    Turn selected columns into per-source blocks.

    The ``R - r`` selected columns of source ``i`` are completed to a basis
    (by default with standard basis vectors in order; ``completion`` may give
    the extra columns per source explicitly) and the block is the inverse of
    that basis matrix.  If ``base`` is given, the result is checked against the
    target-mode conditions.
    """
    F, R, r = selection.F, selection.R, selection.r
    blocks = []
    for i in range(selection.s):
        V = selection.block(i)
        if completion is None:
            full = gf.complete_to_basis(F, V, R)
        else:
            full = np.hstack([V.reshape(R, -1), np.asarray(completion[i], dtype=np.int64).reshape(R, -1)])
        blocks.append(gf.inverse(F, full))
    kit = TransformKit("target", F, R, r, blocks, selection.vectors.copy())
    if base is not None:
        X = F.matmul(gf.inverse(F, kit.matrix), sum_matrix(R - r, [r] * selection.s))
        if not np.array_equal(X, selection.vectors):
            raise InternalError("transform does not reproduce the selected columns")
        if not target_conditions_hold(base, kit.matrix, r, selection.wiretaps):
            raise InternalError("assembled transform violates the target-mode conditions")
    return kit


def transform_code(net: Network, base: LinearCode, kit: TransformKit) -> LinearCode:
    """Apply a block-diagonal transform to a base code, giving ``ell = R - r`` and ``r`` keys per source."""
    F, R, r = base.F, kit.R, kit.r
    M = kit.matrix
    globals_ = {e: F.matmul(M, base.globals[e][:, None])[:, 0] for e in net.edge_ids}
    z = [r] * net.s
    if base.has_locals:
        cols = {}
        for e, c in base.source_columns.items():
            i = net.source_of(e)
            cols[e] = F.matmul(kit.blocks[i], c[:, None])[:, 0]
        out = LinearCode(net, F, R - r, z, globals_, cols, base.pair_coeffs)
    else:
        out = LinearCode(net, F, R - r, z, globals_)
    return out


@dataclass
class Provenance:
    mode: str
    seed: object
    base_hash: str
    kit: TransformKit
    wiretaps: tuple
    reduced: bool
    base: LinearCode = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "seed": self.seed if isinstance(self.seed, (int, type(None))) else str(self.seed),
            "base_hash": self.base_hash,
            "kit": self.kit.to_dict(),
            "wiretaps": [list(W) for W in self.wiretaps],
            "reduced_wiretaps": self.reduced,
        }


def _verify_output(code: LinearCode, net: Network, r: int, max_sets: int, source: bool):
    if check_computability(code) is None:
        raise InternalError("constructed code does not compute the sum")
    try:
        full = wiretap_collection(net, r, reduce=False, max_sets=max_sets)
    except Exception:  # too many wiretap sets to double-check; the construction stands
        return
    if not check_target_security(code, full).secure:
        raise InternalError("constructed code leaks the sum")
    if source and not check_source_security(code, full).secure:
        raise InternalError("constructed code leaks source messages")


def _prepare(net, R, r, F, seed, base, max_retries):
    if not 0 <= r <= R:
        raise ValueError("need 0 <= r <= R")
    rng = _rng(seed)
    if base is None:
        base = construct_base(net, R, F, rng, max_retries)
    elif base.ell != R or any(base.z) or base.F != F:
        raise ValueError("base code does not match the requested rate or field")
    elif base_decoder(base) is None:
        raise ConstructionFailed("supplied base code does not compute the sum")
    return rng, base


def construct_target(net: Network, R: int, r: int, F: gf.GF, seed=0, *, reduce: bool = True,
                     base: LinearCode | None = None, max_retries: int = 1000,
                     base_attempts: int = 5, max_sets: int = 100_000) -> LinearCode:
    """
    Rate ``R - r`` code whose wiretapper learns nothing about the sum.

    Pipeline: random base code, wiretap collection (reduced by default),
    column selection, per-source blocks, transform.  If selection fails for a
    random base code, a fresh base code is drawn up to ``base_attempts`` times.
    The result carries a :class:`Provenance` in ``code.provenance``.
    """
    rng, base0 = _prepare(net, R, r, F, seed, base, max_retries)
    wt = wiretap_collection(net, r, reduce=reduce, max_sets=max_sets)
    attempts = 1 if base is not None else max(1, base_attempts)
    last = None
    for a in range(attempts):
        b = base0 if a == 0 else construct_base(net, R, F, rng, max_retries)
        try:
            sel = select_b_vectors(net, b, R, r, wt, rng)
        except SelectionFailed as exc:
            last = exc
            continue
        kit = assemble_transform(sel, b)
        code = transform_code(net, b, kit)
        _verify_output(code, net, r, max_sets, source=False)
        code.provenance = Provenance("target", seed if isinstance(seed, int) else None,
                                     code_hash(b), kit, wt.sets, wt.reduced, b)
        return code
    raise last


# -- source modes --

def _shared_kit(mode, F, R, r, s, Ainv) -> TransformKit:
    A = gf.inverse(F, Ainv)
    return TransformKit(mode, F, R, r, [A] * s, Ainv)


def construct_source_generalized(net: Network, R: int, r: int, F: gf.GF, seed=0, *,
                                 base: LinearCode | None = None, samples: int = 4000,
                                 exhaustive_limit: int = EXHAUSTIVE_LIMIT,
                                 max_retries: int = 1000, max_sets: int = 100_000) -> LinearCode:
    """
    Rate ``R - r`` code whose wiretapper learns nothing about any source message,
    using one shared ``R x R`` block ``A`` at every source.

    Invertible matrices ``A^-1`` are sampled uniformly and tested against the
    conditions over the full wiretap collection.  The conditions only involve
    the first ``R - r`` columns of ``A^-1``, so when sampling fails those
    columns are scanned exhaustively and completed with standard basis vectors.

    Raises
    ------
    SamplingExhausted
    """
    rng, base = _prepare(net, R, r, F, seed, base, max_retries)
    s = net.s
    wt = wiretap_collection(net, r, reduce=False, max_sets=max_sets)
    found = None
    for _ in range(samples):
        Ainv = F.random(rng, (R, R))
        if gf.rank(F, Ainv) < R:
            continue
        if source_conditions_hold(base, gf.block_diag([gf.inverse(F, Ainv)] * s), r, wt):
            found = Ainv
            break
    if found is None:
        k = R * (R - r)
        total = F.q ** k
        if total > exhaustive_limit:
            raise SamplingExhausted(f"no shared block found in {samples} samples")
        for idx in range(total):
            V = _coefficient_grid(F.q, k, idx, idx + 1)[0].reshape(R - r, R).T
            if gf.rank(F, V) < R - r:
                continue
            Ainv = gf.complete_to_basis(F, V, R)
            if source_conditions_hold(base, gf.block_diag([gf.inverse(F, Ainv)] * s), r, wt):
                found = Ainv
                break
    if found is None:
        raise SamplingExhausted(f"no shared block satisfies the conditions over GF({F.q})")
    kit = _shared_kit("source_generalized", F, R, r, s, found)
    code = transform_code(net, base, kit)
    _verify_output(code, net, r, max_sets, source=True)
    code.provenance = Provenance("source_generalized", seed if isinstance(seed, int) else None,
                                 code_hash(base), kit, wt.sets, False, base)
    return code


def construct_source_legacy(net: Network, R: int, r: int, F: gf.GF, seed=0, *,
                            base: LinearCode | None = None, samples: int = 512,
                            max_retries: int = 1000, max_sets: int = 100_000) -> LinearCode:
    """
    Shared-block construction by sequential choice of ``a_1..a_R``.

    ``a_j`` for ``j <= R - r`` must avoid ``H_W^(i) + <a_1..a_{j-1}>`` for every
    wiretap set ``W`` and source ``i``, where ``H_W^(i)`` is spanned by the
    source-``i`` blocks of the base globals on ``W``.  The remaining columns
    only need to keep the family independent.  ``A = [a_1 .. a_R]^-1``.
    """
    rng, base = _prepare(net, R, r, F, seed, base, max_retries)
    s = net.s
    wt = wiretap_collection(net, r, reduce=False, max_sets=max_sets)
    blocks = []
    for W in wt.sets:
        if not W:
            continue
        G = base.G(W)
        for i in range(s):
            blocks.append(G[i * R:(i + 1) * R])
    spans = [gf.Span(F, R, B) for B in blocks] or [gf.Span(F, R)]
    chosen = []
    for j in range(R - r):
        pick = None
        C = F.random(rng, (samples, R))
        good = np.ones(samples, dtype=bool)
        for sp in spans:
            good &= ~sp.contains_rows(C)
        if good.any():
            pick = C[np.argmax(good)]
        else:
            total = F.q ** R
            if total <= EXHAUSTIVE_LIMIT:
                V = _coefficient_grid(F.q, R, 0, total)
                good = np.ones(total, dtype=bool)
                for sp in spans:
                    good &= ~sp.contains_rows(V)
                if good.any():
                    pick = V[np.argmax(good)]
        if pick is None:
            raise SelectionFailed(f"no admissible vector a_{j + 1} over GF({F.q})")
        pick = np.asarray(pick, dtype=np.int64)
        for sp in spans:
            sp.add(pick)
        chosen.append(pick)
    V = np.column_stack(chosen) if chosen else np.zeros((R, 0), dtype=np.int64)
    Ainv = gf.complete_to_basis(F, V, R)
    kit = _shared_kit("source_legacy", F, R, r, s, Ainv)
    code = transform_code(net, base, kit)
    _verify_output(code, net, r, max_sets, source=True)
    code.provenance = Provenance("source_legacy", seed if isinstance(seed, int) else None,
                                 code_hash(base), kit, wt.sets, False, base)
    return code


# -- field sizes --

def required_field_size(net: Network, r: int, reduced: bool = True, max_sets: int = 100_000) -> int:
    """
    Field-size threshold for guaranteed success of the target construction:
    the construction succeeds for every admissible base code when ``q`` is
    strictly larger than the returned value.  The empty wiretap set is not
    counted.
    """
    wt = wiretap_collection(net, r, reduce=reduced, max_sets=max_sets)
    return len(wt.nonempty()) + net.s


def extension_lift(q: int, threshold: int, R: int, r: int) -> dict:
    """
    Smallest power ``q**L`` above ``threshold``.  A scalar code over GF(q**L)
    is equivalent to a vector code over GF(q) of rate ``((R - r) L, L)``.
    """
    L = 1
    while q**L <= threshold:
        L += 1
    return {"base_field": q, "L": L, "field": q**L, "rate": [(R - r) * L, L]}


def count_invertible(q: int, n: int) -> int:
    return math.prod(q**n - q**j for j in range(n))
