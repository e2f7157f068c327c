"""
Exact arithmetic and linear algebra over finite fields GF(q).

Elements are integer codes in ``[0, q)``.  For a prime field the code is the
residue itself; for ``q = p**m`` with ``m > 1`` the base-``p`` digits of a code
are the coefficients (lowest degree first) of a polynomial reduced modulo a
fixed monic irreducible of degree ``m``.

Matrices are plain two-dimensional ``numpy`` integer arrays; every routine
takes the field as its first argument.  Column spaces are the objects of
interest throughout, so ``solve_right`` and ``column_space_intersection``
work on columns.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .errors import RankError, ShapeError

__all__ = [
    "GF",
    "field",
    "rref",
    "rank",
    "solve_right",
    "nullspace",
    "column_basis",
    "column_space_intersection",
    "complete_to_basis",
    "inverse",
    "block_diag",
    "Span",
    "identity",
]

# Reduction polynomials, coefficients lowest degree first, monic.
BUILTIN_POLYS = {
    4: (1, 1, 1),        # x^2 + x + 1
    8: (1, 1, 0, 1),     # x^3 + x + 1
    9: (1, 0, 1),        # x^2 + 1
    16: (1, 1, 0, 0, 1),  # x^4 + x + 1
    25: (2, 0, 1),       # x^2 + 2
    27: (1, 2, 0, 1),    # x^3 + 2x + 1
}

_TABLE_LIMIT = 1 << 16


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, m)`` with ``q == p**m``, or None if q is not a prime power."""
    if q < 2:
        return None
    p = 2
    while p * p <= q and q % p:
        p += 1
    if q % p:
        p = q
    m, rest = 0, q
    while rest % p == 0:
        rest //= p
        m += 1
    if rest != 1 or not _is_prime(p):
        return None
    return p, m


def is_prime_power(q: int) -> bool:
    return prime_power(q) is not None


def smallest_prime_power_above(n: int) -> int:
    """Smallest prime power strictly greater than ``n``."""
    q = max(n + 1, 2)
    while not is_prime_power(q):
        q += 1
    return q


# --- polynomial helpers over GF(p), coefficient lists lowest degree first ---

def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, mod, p):
    a = _poly_trim(a)
    mod = _poly_trim(mod)
    inv_lead = pow(mod[-1], p - 2, p)
    while len(a) >= len(mod):
        c = (a[-1] * inv_lead) % p
        shift = len(a) - len(mod)
        for k, mk in enumerate(mod):
            a[shift + k] = (a[shift + k] - c * mk) % p
        a = _poly_trim(a)
    return a


def _is_irreducible(poly, p) -> bool:
    m = len(poly) - 1
    for d in range(1, m // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            if not _poly_mod(poly, list(tail) + [1], p):
                return False
    return True


def _find_irreducible(p, m):
    # lexicographic search, deterministic
    for tail in itertools.product(range(p), repeat=m):
        poly = list(reversed(tail)) + [1]
        if poly[0] != 0 and _is_irreducible(poly, p):
            return tuple(poly)
    raise ValueError(f"no irreducible polynomial of degree {m} over GF({p})")


class GF:
    """
    The finite field GF(q), q a prime power.

    Parameters
    ----------
    q : int
        Field order.
    poly : sequence of int, optional
        Monic irreducible reduction polynomial over GF(p), lowest degree first.
        Only used when ``q`` is not prime.  Defaults to the built-in table, then
        to the lexicographically first irreducible of the right degree.

    Instances are immutable and compare equal when order and polynomial agree.
    Arithmetic methods accept Python ints or integer arrays and broadcast.
    """

    def __init__(self, q: int, poly=None):
        pm = prime_power(int(q))
        if pm is None:
            raise ValueError(f"field order {q} is not a prime power")
        self.q = int(q)
        self.p, self.m = pm
        if self.m == 1:
            if poly is not None and tuple(poly) not in ((0, 1),):
                raise ValueError("a prime field takes no reduction polynomial")
            self.poly = None
        else:
            if poly is None:
                poly = BUILTIN_POLYS.get(self.q) or _find_irreducible(self.p, self.m)
            poly = tuple(int(c) for c in poly)
            if len(poly) != self.m + 1 or poly[-1] != 1:
                raise ValueError(f"reduction polynomial must be monic of degree {self.m}")
            if any(not 0 <= c < self.p for c in poly):
                raise ValueError("polynomial coefficients must lie in [0, p)")
            if not _is_irreducible(poly, self.p):
                raise ValueError(f"polynomial {poly} is reducible over GF({self.p})")
            if self.q > _TABLE_LIMIT:
                raise ValueError("extension fields larger than 2**16 are not supported")
            self.poly = poly
            self._build_tables()
        self._digit_weights = self.p ** np.arange(self.m, dtype=np.int64)

    # -- construction --

    def _poly_mulmod_code(self, a: int, b: int) -> int:
        p, m = self.p, self.m
        da = [(a // p**k) % p for k in range(m)]
        db = [(b // p**k) % p for k in range(m)]
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        red = _poly_mod(prod, self.poly, p)
        return sum(c * p**k for k, c in enumerate(red))

    def _build_tables(self) -> None:
        q = self.q
        for g in range(2, q):
            exp = [1]
            x = 1
            for _ in range(q - 2):
                x = self._poly_mulmod_code(x, g)
                if x == 1:
                    break
                exp.append(x)
            if len(exp) == q - 1:
                break
        else:  # pragma: no cover - only reached for q == 2, handled as prime
            raise ValueError("no primitive element found")
        exp_arr = np.array(exp + exp, dtype=np.int64)
        log_arr = np.zeros(q, dtype=np.int64)
        log_arr[np.array(exp)] = np.arange(q - 1)
        self._exp = exp_arr
        self._log = log_arr

    # -- identity / hashing --

    def __eq__(self, other):
        return isinstance(other, GF) and (self.q, self.poly) == (other.q, other.poly)

    def __hash__(self):
        return hash((self.q, self.poly))

    def __repr__(self):
        if self.poly is None:
            return f"GF({self.q})"
        return f"GF({self.q}, poly={list(self.poly)})"

    # -- element arithmetic (vectorized) --

    @staticmethod
    def _out(x):
        return int(x) if np.ndim(x) == 0 else x

    def _check(self, a):
        arr = np.asarray(a, dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= self.q):
            raise ValueError(f"element code out of range for {self!r}")
        return arr

    def _digits(self, a):
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self._digit_weights) % self.p

    def _undigits(self, d):
        return (d * self._digit_weights).sum(axis=-1)

    def add(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.m == 1:
            return self._out((a + b) % self.p)
        if self.p == 2:
            return self._out(a ^ b)
        return self._out(self._undigits((self._digits(a) + self._digits(b)) % self.p))

    def neg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.m == 1:
            return self._out((-a) % self.p)
        if self.p == 2:
            return self._out(a)
        return self._out(self._undigits((-self._digits(a)) % self.p))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.m == 1:
            return self._out((a * b) % self.p)
        zero = (a == 0) | (b == 0)
        res = self._exp[self._log[a] + self._log[b]]
        return self._out(np.where(zero, 0, res))

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero in a finite field")
        if self.m == 1:
            if a.ndim == 0:
                return pow(int(a), self.p - 2, self.p)
            return np.array([pow(int(x), self.p - 2, self.p) for x in a.ravel()],
                            dtype=np.int64).reshape(a.shape)
        return self._out(self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)])

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def elements(self):
        return range(self.q)

    # -- matrix helpers --

    def matmul(self, A, B):
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        if A.shape[-1] != B.shape[0]:
            raise ShapeError(f"cannot multiply {A.shape} by {B.shape}")
        if self.m == 1:
            inner = A.shape[-1]
            if inner == 0:
                return np.zeros(A.shape[:-1] + B.shape[1:], dtype=np.int64)
            if (self.p - 1) ** 2 * inner < 2**62:
                return (A @ B) % self.p
            return np.asarray(
                (A.astype(object) @ B.astype(object)) % self.p, dtype=np.int64)
        out = np.zeros(A.shape[:-1] + B.shape[1:], dtype=np.int64)
        for k in range(A.shape[-1]):
            out = self.add(out, self.mul(A[..., k, None], B[None, k, :]
                                         if A.ndim > 1 else B[k]))
        return np.asarray(out, dtype=np.int64)

    def random(self, rng, size=None):
        return rng.integers(0, self.q, size=size, dtype=np.int64)


@lru_cache(maxsize=None)
def field(q: int, poly: tuple | None = None) -> GF:
    """Cached field constructor."""
    return GF(q, poly)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def block_diag(blocks) -> np.ndarray:
    blocks = [np.asarray(b, dtype=np.int64) for b in blocks]
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def _as_matrix(M) -> np.ndarray:
    M = np.asarray(M, dtype=np.int64)
    if M.ndim == 1:
        M = M.reshape(-1, 1)
    if M.ndim != 2:
        raise ShapeError("expected a 2-D matrix")
    return M


def rref(F: GF, M) -> tuple[np.ndarray, list[int]]:
    """
    Reduced row echelon form.

    Columns are scanned left to right and the pivot is the first nonzero entry
    at or below the current row.  Returns the reduced matrix and the pivot
    column indices.
    """
    A = _as_matrix(M).copy()
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = F.mul(A[r], F.inv(int(A[r, c])))
        others = np.nonzero(A[:, c])[0]
        others = others[others != r]
        if others.size:
            A[others] = F.sub(A[others], F.mul(A[others, c][:, None], A[r][None, :]))
        pivots.append(c)
        r += 1
    return A, pivots


def rank(F: GF, M) -> int:
    M = _as_matrix(M)
    if M.size == 0:
        return 0
    return len(rref(F, M)[1])


def solve_right(F: GF, A, B) -> np.ndarray | None:
    """
    Solve ``A @ X == B``.

    Returns None when some column of B lies outside the column space of A.
    Free variables are set to zero, which makes the answer deterministic.
    """
    A = _as_matrix(A)
    B = _as_matrix(B)
    if A.shape[0] != B.shape[0]:
        raise ShapeError(f"row mismatch: A has {A.shape[0]} rows, B has {B.shape[0]}")
    n = A.shape[1]
    R, pivots = rref(F, np.hstack([A, B]))
    if any(c >= n for c in pivots):
        return None
    X = np.zeros((n, B.shape[1]), dtype=np.int64)
    for i, c in enumerate(pivots):
        X[c] = R[i, n:]
    return X


def nullspace(F: GF, M) -> np.ndarray:
    """Basis of ``{v : M @ v == 0}`` as columns."""
    M = _as_matrix(M)
    n = M.shape[1]
    R, pivots = rref(F, M)
    free = [c for c in range(n) if c not in pivots]
    N = np.zeros((n, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        N[f, k] = 1
        for i, c in enumerate(pivots):
            N[c, k] = F.neg(int(R[i, f]))
    return N


def column_basis(F: GF, M) -> np.ndarray:
    """The pivot columns of M: a basis of its column space drawn from M itself."""
    M = _as_matrix(M)
    if M.shape[1] == 0:
        return M
    _, pivots = rref(F, M)
    return M[:, pivots]


def column_space_intersection(F: GF, A, B) -> np.ndarray:
    """Basis (as columns) of the intersection of the column spaces of A and B."""
    A = _as_matrix(A)
    B = _as_matrix(B)
    if A.shape[0] != B.shape[0]:
        raise ShapeError(f"row mismatch: {A.shape[0]} vs {B.shape[0]}")
    if A.shape[1] == 0 or B.shape[1] == 0:
        return np.zeros((A.shape[0], 0), dtype=np.int64)
    N = nullspace(F, np.hstack([A, F.neg(B)]))
    if N.shape[1] == 0:
        return np.zeros((A.shape[0], 0), dtype=np.int64)
    V = F.matmul(A, N[: A.shape[1]])
    return column_basis(F, V)


def complete_to_basis(F: GF, V, n: int | None = None) -> np.ndarray:
    """
    Extend independent columns V to a basis of GF(q)^rows.

    Standard basis vectors e_1, e_2, ... are tried in that order and kept
    whenever they raise the rank.
    """
    if n is None:
        V = _as_matrix(V)
    else:
        V = np.asarray(V, dtype=np.int64)
        V = np.zeros((n, 0), dtype=np.int64) if V.size == 0 else V.reshape(n, -1)
    rows, k = V.shape
    if k > rows:
        raise RankError("more columns than rows")
    span = Span(F, rows)
    for j in range(k):
        if not span.add(V[:, j]):
            raise RankError("input columns are linearly dependent")
    cols = [V[:, j] for j in range(k)]
    for i in range(rows):
        if span.dim == rows:
            break
        e = np.zeros(rows, dtype=np.int64)
        e[i] = 1
        if span.add(e):
            cols.append(e)
    return np.column_stack(cols) if cols else np.zeros((rows, 0), dtype=np.int64)


def inverse(F: GF, M) -> np.ndarray:
    M = _as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise ShapeError("only square matrices are invertible")
    X = solve_right(F, M, identity(M.shape[0]))
    if X is None:
        raise RankError("matrix is singular")
    return X


class Span:
    """
    Incrementally built subspace of GF(q)^n with fast membership tests.

    The basis is kept in reduced echelon form as rows, so ``contains`` is a
    single reduction pass.
    """

    def __init__(self, F: GF, n: int, vectors=None):
        self.F = F
        self.n = n
        self._rows = np.zeros((0, n), dtype=np.int64)
        self._pivots: list[int] = []
        if vectors is not None:
            V = _as_matrix(vectors)
            for j in range(V.shape[1]):
                self.add(V[:, j])

    @property
    def dim(self) -> int:
        return len(self._pivots)

    def reduce(self, v) -> np.ndarray:
        F = self.F
        v = np.asarray(v, dtype=np.int64).copy()
        for row, c in zip(self._rows, self._pivots):
            if v[c]:
                v = F.sub(v, F.mul(int(v[c]), row))
        return np.asarray(v, dtype=np.int64)

    def contains(self, v) -> bool:
        return not self.reduce(v).any()

    def contains_rows(self, V) -> np.ndarray:
        """Membership of every row of V, as a boolean array."""
        F = self.F
        V = np.array(V, dtype=np.int64, copy=True).reshape(-1, self.n)
        for row, c in zip(self._rows, self._pivots):
            col = V[:, c]
            hit = col != 0
            if hit.any():
                V[hit] = F.sub(V[hit], F.mul(col[hit][:, None], row[None, :]))
        return ~V.any(axis=1)

    def add(self, v) -> bool:
        """Add v to the span; return True if the dimension grew."""
        F = self.F
        w = self.reduce(v)
        nz = np.nonzero(w)[0]
        if nz.size == 0:
            return False
        c = int(nz[0])
        w = np.asarray(F.mul(w, F.inv(int(w[c]))), dtype=np.int64)
        if self._rows.shape[0]:
            col = self._rows[:, c]
            hit = np.nonzero(col)[0]
            if hit.size:
                self._rows[hit] = F.sub(self._rows[hit], F.mul(col[hit][:, None], w[None, :]))
        self._rows = np.vstack([self._rows, w])
        self._pivots.append(c)
        return True

    def copy(self) -> "Span":
        s = Span(self.F, self.n)
        s._rows = self._rows.copy()
        s._pivots = list(self._pivots)
        return s

    def basis(self) -> np.ndarray:
        """Basis vectors as columns."""
        return self._rows.T.copy()
