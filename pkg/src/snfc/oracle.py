"""
Brute-force ground truth.

The independence oracle runs a code on every message/key assignment and tests
whether what a wiretapper sees is statistically independent of the sum (or of
all the messages).  The counting routines enumerate admissible transforms.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import gf
from .code import LinearCode, check_source_security, check_target_security
from .construct import (selection_constraints_hold, source_conditions_hold,
                        target_conditions_hold, _Forbidden, _coefficient_grid)
from .code import source_matrix, sum_matrix
from .errors import TooLarge
from .network import wiretap_collection

DEFAULT_MAX_ORACLE = 10**7
_CHUNK = 1 << 17


def default_cap() -> int:
    """Oracle enumeration cap, overridable through ``SNFC_MAX_ORACLE``."""
    raw = os.environ.get("SNFC_MAX_ORACLE")
    return int(raw) if raw else DEFAULT_MAX_ORACLE


@dataclass
class JointDistribution:
    """Counts of (observation, statistic) outcomes; rows index observations."""
    counts: np.ndarray
    total: int

    @property
    def marginal_obs(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def marginal_stat(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    def mutual_information(self) -> float:
        """In bits; diagnostic only."""
        p = self.counts / self.total
        px = p.sum(axis=1, keepdims=True)
        py = p.sum(axis=0, keepdims=True)
        nz = p > 0
        return float((p[nz] * np.log2(p[nz] / (px @ py)[nz])).sum())


def _index(F, V):
    # encode rows of field elements as integers, first coordinate least significant
    if V.shape[1] == 0:
        return np.zeros(V.shape[0], dtype=np.int64)
    return (V * (F.q ** np.arange(V.shape[1], dtype=np.int64))).sum(axis=1)


def joint_distribution(code: LinearCode, W, statistic: str = "target",
                       cap: int | None = None) -> JointDistribution:
    """
    Exact joint counts of ``Y_W`` and the sum (``statistic="target"``) or the
    full message tuple (``statistic="source"``) over all ``q**n`` inputs.

    Inputs are visited in odometer order with the first coordinate fastest.
    """
    F = code.F
    n = code.dim
    cap = default_cap() if cap is None else cap
    total = F.q ** n
    if total > cap:
        raise TooLarge(f"{total} assignments exceed the oracle cap of {cap}")
    G = code.G(W)
    S = code.T if statistic == "target" else code.Gamma
    n_obs, n_stat = F.q ** G.shape[1], F.q ** S.shape[1]
    flat = np.zeros(n_obs * n_stat, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        X = _coefficient_grid(F.q, n, start, min(total, start + _CHUNK))
        y = _index(F, F.matmul(X, G)) if G.shape[1] else np.zeros(len(X), dtype=np.int64)
        u = _index(F, F.matmul(X, S)) if S.shape[1] else np.zeros(len(X), dtype=np.int64)
        flat += np.bincount(y * n_stat + u, minlength=n_obs * n_stat)
    return JointDistribution(flat.reshape(n_obs, n_stat), total)


def is_independent(d: JointDistribution) -> bool:
    """Exact factorization test ``count(y,u) * total == count(y) * count(u)``."""
    lhs = d.counts * d.total
    rhs = np.outer(d.marginal_obs, d.marginal_stat)
    return bool(np.array_equal(lhs, rhs))


def oracle_secure(code: LinearCode, W, statistic: str = "target", cap: int | None = None) -> bool:
    if not code.net.canon(W) or code.ell == 0:
        return True  # nothing observed, or a constant statistic
    return is_independent(joint_distribution(code, W, statistic, cap))


def oracle_secure_all(code: LinearCode, sets, statistic: str = "target",
                      cap: int | None = None) -> list[bool]:
    """
    Oracle verdict for every wiretap set, enumerating the inputs only once.

    Equivalent to calling :func:`oracle_secure` per set.
    """
    F = code.F
    sets = [code.net.canon(W) for W in sets]
    verdicts = [True] * len(sets)
    live = [k for k, W in enumerate(sets) if W]
    if not live or code.ell == 0:
        return verdicts
    n = code.dim
    cap = default_cap() if cap is None else cap
    total = F.q ** n
    if total > cap:
        raise TooLarge(f"{total} assignments exceed the oracle cap of {cap}")
    ids = code.net.edge_ids
    G = code.G(ids)
    S = code.T if statistic == "target" else code.Gamma
    n_stat = F.q ** S.shape[1]
    cols = {e: k for k, e in enumerate(ids)}
    flat = {k: np.zeros(F.q ** len(sets[k]) * n_stat, dtype=np.int64) for k in live}
    for start in range(0, total, _CHUNK):
        X = _coefficient_grid(F.q, n, start, min(total, start + _CHUNK))
        Y = F.matmul(X, G)
        u = _index(F, F.matmul(X, S))
        for k in live:
            y = _index(F, Y[:, [cols[e] for e in sets[k]]])
            flat[k] += np.bincount(y * n_stat + u, minlength=flat[k].size)
    for k in live:
        d = JointDistribution(flat[k].reshape(-1, n_stat), total)
        verdicts[k] = is_independent(d)
    return verdicts


def verify_equivalence(code: LinearCode, W, kind: str = "target", cap: int | None = None) -> dict:
    """Subspace verdict and oracle verdict for one wiretap set, and whether they agree."""
    check = check_target_security if kind == "target" else check_source_security
    sub = check(code, [W]).secure
    orc = oracle_secure(code, W, kind, cap)
    return {"subspace": sub, "oracle": orc, "agree": sub == orc}


# -- transform-set counting --

@lru_cache(maxsize=None)
def _invertible(q: int, R: int, poly=None) -> tuple:
    F = gf.field(q, poly)
    out = []
    for idx in range(q ** (R * R)):
        M = _coefficient_grid(q, R * R, idx, idx + 1)[0].reshape(R, R)
        if gf.rank(F, M) == R:
            out.append(M)
    return tuple(out)


def invertible_matrices(F: gf.GF, R: int) -> tuple:
    """Every invertible ``R x R`` matrix over F, in odometer order (cached)."""
    return _invertible(F.q, R, F.poly)


def completion_count(q: int, R: int, k: int) -> int:
    """Ways to extend ``k`` independent columns to an invertible ``R x R`` matrix."""
    return math.prod(q**R - q**j for j in range(k, R))


def lower_bound_bhat(q: int, R: int, r: int, s: int, n_wiretaps: int) -> int:
    """
    Closed-form lower bound on the number of admissible per-source transforms,
    with ``n_wiretaps`` counting every member of the collection (empty set included).
    Only meaningful when ``q > n_wiretaps + s``.
    """
    head = (q ** (R - 1) * (q - n_wiretaps - s)) ** (R - r)
    tail = math.prod((q**R - q**(j - 1)) ** s for j in range(R - r + 1, R + 1))
    return head * tail


@dataclass
class TransformCounts:
    count_Bhat: int
    count_Ahat: int
    lower_bound_Bhat: int
    bound_applicable: bool
    method: str
    membership_ok: bool | None = None
    containment_ok: bool | None = None

    @property
    def ratio(self) -> float:
        return self.count_Ahat / self.count_Bhat if self.count_Bhat else float("nan")

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "count_Bhat", "count_Ahat", "lower_bound_Bhat", "bound_applicable",
            "method", "membership_ok", "containment_ok")}


def _count_b_sequences(base, R, r, sets) -> int:
    F = base.F
    s = base.s
    basis = gf.column_basis(F, base.G_sink)
    k = basis.shape[1]
    cands = F.matmul(_coefficient_grid(F.q, k, 0, F.q ** k), basis.T)

    def walk(forb, depth):
        if depth == R - r:
            return 1
        ok = np.nonzero(forb.ok_rows(cands))[0]
        if depth == R - r - 1:
            return int(ok.size)
        total = 0
        for idx in ok:
            child = _Forbidden.__new__(_Forbidden)
            child.F, child.R, child.s = F, R, s
            child.wire = [sp.copy() for sp in forb.wire]
            child.blocks = [sp.copy() for sp in forb.blocks]
            child.accept(cands[idx])
            total += walk(child, depth + 1)
        return total

    return walk(_Forbidden(F, R, s, base, sets), 0)


def _count_shared(base, R, r, wt) -> int:
    F = base.F
    s = base.s
    k = R * (R - r)
    good = 0
    for idx in range(F.q ** k):
        V = _coefficient_grid(F.q, k, idx, idx + 1)[0].reshape(R - r, R).T
        if gf.rank(F, V) < R - r:
            continue
        P = gf.complete_to_basis(F, V, R)
        if source_conditions_hold(base, gf.block_diag([P] * s), r, wt, inverse_given=True):
            good += 1
    return good * completion_count(F.q, R, R - r)


def enumerate_transform_sets(base: LinearCode, R: int, r: int, wiretaps=None,
                             method: str = "exhaustive", max_candidates: int = 200_000) -> TransformCounts:
    """
    Count admissible per-source transforms (target mode) and admissible shared
    transforms (source modes) for a base code.

    ``method="exhaustive"`` tries every tuple of invertible blocks, and also
    checks the sequential membership constraints for every admissible tuple and
    that each admissible shared block is admissible per source.
    ``method="bijection"`` counts the admissible leading columns and multiplies
    by the number of completions; it scales to larger fields.
    """
    F = base.F
    s = base.s
    wt = wiretap_collection(base.net, r) if wiretaps is None else wiretaps
    sets = wt.sets if hasattr(wt, "sets") else tuple(wt)
    n_w = len(sets)
    lb = lower_bound_bhat(F.q, R, r, s, n_w)
    applicable = F.q > n_w + s
    T = sum_matrix(R - r, [r] * s)
    if method == "exhaustive":
        inv = invertible_matrices(F, R)
        if len(inv) ** s > max_candidates:
            raise TooLarge(f"{len(inv) ** s} transform tuples exceed the cap of {max_candidates}")
        count_b, member = 0, True
        admissible = set()
        for tup in itertools.product(range(len(inv)), repeat=s):
            Minv = gf.block_diag([inv[t] for t in tup])
            if target_conditions_hold(base, Minv, r, sets, inverse_given=True):
                count_b += 1
                admissible.add(tup)
                member &= selection_constraints_hold(base, F.matmul(Minv, T), sets)
        count_a, contained = 0, True
        for t, P in enumerate(inv):
            if source_conditions_hold(base, gf.block_diag([P] * s), r, sets, inverse_given=True):
                count_a += 1
                contained &= (t,) * s in admissible
        return TransformCounts(count_b, count_a, lb, applicable, method, member, contained)
    if method == "bijection":
        seqs = _count_b_sequences(base, R, r, [W for W in sets if W])
        count_b = seqs * completion_count(F.q, R, R - r) ** s
        count_a = _count_shared(base, R, r, sets)
        return TransformCounts(count_b, count_a, lb, applicable, method)
    raise ValueError(f"unknown method {method!r}")
