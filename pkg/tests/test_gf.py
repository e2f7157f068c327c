import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from snfc import gf
from snfc.errors import RankError, ShapeError


SMALL_FIELDS = [2, 3, 4, 5, 7, 8, 9, 16]


def poly_mul_table(p, poly):
    """Multiplication table of GF(p)[x]/(poly) computed by schoolbook polynomial arithmetic."""
    m = len(poly) - 1
    q = p**m

    def digits(a):
        return [(a // p**k) % p for k in range(m)]

    table = np.zeros((q, q), dtype=int)
    for a in range(q):
        for b in range(q):
            prod = [0] * (2 * m - 1)
            for i, x in enumerate(digits(a)):
                for j, y in enumerate(digits(b)):
                    prod[i + j] += x * y
            # reduce from the top degree down
            for d in range(2 * m - 2, m - 1, -1):
                c = prod[d] % p
                if c:
                    for k in range(m + 1):
                        prod[d - m + k] -= c * poly[k]
            table[a, b] = sum((prod[k] % p) * p**k for k in range(m))
    return table


def leibniz_det(F, M):
    n = len(M)
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = 1
        for i in range(n):
            term = F.mul(term, int(M[i][perm[i]]))
        total = F.sub(total, term) if inv % 2 else F.add(total, term)
    return total


def test_prime_field_examples():
    F = gf.GF(3)
    assert F.add(2, 2) == 1
    assert F.inv(2) == 2


def test_gf4_multiplication_matches_polynomial_table():
    F = gf.GF(4)
    assert F.mul(2, 2) == 3
    table = poly_mul_table(2, [1, 1, 1])
    a, b = np.meshgrid(np.arange(4), np.arange(4), indexing="ij")
    assert np.array_equal(F.mul(a, b), table)


@pytest.mark.parametrize("q", [8, 9, 16, 25, 27])
def test_extension_tables_match_polynomial_arithmetic(q):
    F = gf.GF(q)
    table = poly_mul_table(F.p, F.poly)
    a, b = np.meshgrid(np.arange(q), np.arange(q), indexing="ij")
    assert np.array_equal(F.mul(a, b), table)


@pytest.mark.parametrize("q", SMALL_FIELDS)
def test_field_axioms_exhaustive(q):
    F = gf.GF(q)
    a, b, c = np.meshgrid(np.arange(q), np.arange(q), np.arange(q), indexing="ij")
    assert np.array_equal(F.add(F.add(a, b), c), F.add(a, F.add(b, c)))
    assert np.array_equal(F.mul(F.mul(a, b), c), F.mul(a, F.mul(b, c)))
    assert np.array_equal(F.mul(a, F.add(b, c)), F.add(F.mul(a, b), F.mul(a, c)))
    assert np.array_equal(F.add(a, b), F.add(b, a))
    x = np.arange(q)
    assert np.array_equal(F.add(x, F.neg(x)), np.zeros(q))
    assert np.array_equal(F.mul(x[1:], F.inv(x[1:])), np.ones(q - 1))
    assert np.array_equal(F.mul(x, 1), x)


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        gf.GF(5).inv(0)
    with pytest.raises(ZeroDivisionError):
        gf.GF(4).inv(0)


def test_rejects_non_prime_powers_and_reducible_polys():
    with pytest.raises(ValueError):
        gf.GF(6)
    with pytest.raises(ValueError):
        gf.GF(4, poly=[1, 0, 1])  # x^2 + 1 = (x + 1)^2 over GF(2)
    assert gf.GF(4, poly=[1, 1, 1]) == gf.GF(4)


def test_irreducible_search_for_unlisted_orders():
    F = gf.GF(32)
    assert F.poly[-1] == 1 and len(F.poly) == 6
    x = np.arange(1, 32)
    assert np.array_equal(F.mul(x, F.inv(x)), np.ones(31))


def test_smallest_prime_power_above():
    assert gf.smallest_prime_power_above(9) == 11
    assert gf.smallest_prime_power_above(6) == 7
    assert gf.smallest_prime_power_above(7) == 8
    assert gf.smallest_prime_power_above(1) == 2


def test_rank_examples():
    F = gf.GF(3)
    assert gf.rank(F, [[1, 0], [0, 1], [1, 0], [0, 1]]) == 2
    assert gf.rank(F, np.zeros((3, 3), dtype=int)) == 0
    assert gf.rank(F, np.array([[1, 1, 0, 1]]).T) == 1


def test_solve_right_examples():
    F = gf.GF(3)
    X = gf.solve_right(F, [[1, 0], [1, 1], [0, 2], [1, 1]], [1, 0, 1, 0])
    assert X.ravel().tolist() == [1, 2]
    assert np.array_equal(gf.solve_right(F, np.eye(2, dtype=int), np.eye(2, dtype=int)), np.eye(2))
    assert gf.solve_right(F, [[1, 0], [0, 0]], [0, 1]) is None
    with pytest.raises(ShapeError):
        gf.solve_right(F, np.eye(2, dtype=int), np.eye(3, dtype=int))


def test_solve_right_sets_free_variables_to_zero():
    F = gf.GF(5)
    X = gf.solve_right(F, [[1, 1]], [[3]])
    assert X.ravel().tolist() == [3, 0]


def test_intersection_examples():
    F = gf.GF(3)
    assert gf.column_space_intersection(F, [1, 1, 0, 1], [1, 0, 1, 0]).shape[1] == 0
    assert gf.column_space_intersection(F, np.eye(2, dtype=int), np.eye(2, dtype=int)).shape[1] == 2
    Gamma = [[1, 0], [0, 0], [0, 1], [0, 0]]
    I = gf.column_space_intersection(F, [1, 0, 0, 0], Gamma)
    assert I.ravel().tolist() == [1, 0, 0, 0]


def test_complete_to_basis_examples():
    F = gf.GF(3)
    B = gf.complete_to_basis(F, [1, 2])
    assert B.tolist() == [[1, 1], [2, 0]]
    assert leibniz_det(F, B) != 0
    assert np.array_equal(gf.complete_to_basis(F, np.eye(3, dtype=int)), np.eye(3))
    assert np.array_equal(gf.complete_to_basis(F, np.zeros((2, 0), dtype=int)), np.eye(2))
    with pytest.raises(RankError):
        gf.complete_to_basis(F, [[1, 2], [2, 1]])  # second column is twice the first


def test_inverse_of_singular_raises():
    with pytest.raises(RankError):
        gf.inverse(gf.GF(3), [[1, 2], [2, 1]])


def matrices(max_rows=4, max_cols=4):
    return st.tuples(st.sampled_from([2, 3, 4, 5, 9]), st.integers(1, max_rows),
                     st.integers(1, max_cols), st.integers(0, 2**32 - 1))


def _draw(params):
    q, r, c, seed = params
    F = gf.field(q)
    return F, np.random.default_rng(seed).integers(0, q, size=(r, c))


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_equals_transpose_rank(params):
    F, A = _draw(params)
    assert gf.rank(F, A) == gf.rank(F, A.T)


@settings(max_examples=150, deadline=None)
@given(matrices(), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_rank_subadditive_with_equality_iff_trivial_intersection(params, k, seed):
    F, A = _draw(params)
    B = np.random.default_rng(seed).integers(0, F.q, size=(A.shape[0], k))
    joint = gf.rank(F, np.hstack([A, B]))
    ra, rb = gf.rank(F, A), gf.rank(F, B)
    assert joint <= ra + rb
    trivial = gf.column_space_intersection(F, A, B).shape[1] == 0
    assert (joint == ra + rb) == trivial
    # dimension formula
    assert gf.column_space_intersection(F, A, B).shape[1] == ra + rb - joint


@settings(max_examples=150, deadline=None)
@given(matrices(), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_solve_right_solutions_are_exact(params, k, seed):
    F, A = _draw(params)
    rng = np.random.default_rng(seed)
    X0 = rng.integers(0, F.q, size=(A.shape[1], k))
    B = F.matmul(A, X0)
    X = gf.solve_right(F, A, B)
    assert X is not None
    assert np.array_equal(F.matmul(A, X), B)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3, 5, 4]), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_completion_is_invertible(q, n, seed):
    F = gf.field(q)
    rng = np.random.default_rng(seed)
    V = rng.integers(0, q, size=(n, int(rng.integers(0, n + 1))))
    V = gf.column_basis(F, V)
    B = gf.complete_to_basis(F, V, n)
    assert gf.rank(F, B) == n
    assert np.array_equal(B[:, :V.shape[1]], V)
    if n <= 3:
        assert leibniz_det(F, B) != 0


@settings(max_examples=100, deadline=None)
@given(matrices(3, 3))
def test_nullspace_is_annihilated(params):
    F, A = _draw(params)
    N = gf.nullspace(F, A)
    assert N.shape[1] == A.shape[1] - gf.rank(F, A)
    assert not F.matmul(A, N).any()


def test_span_membership_matches_solver():
    F = gf.GF(5)
    rng = np.random.default_rng(1)
    A = rng.integers(0, 5, size=(4, 2))
    sp = gf.Span(F, 4, A)
    V = rng.integers(0, 5, size=(200, 4))
    V[:50] = F.matmul(rng.integers(0, 5, size=(50, 2)), A.T)
    expect = [gf.solve_right(F, A, v) is not None for v in V]
    assert sp.contains_rows(V).tolist() == expect
    assert [sp.contains(v) for v in V] == expect


def test_large_prime_matmul_does_not_overflow():
    F = gf.GF(2**31 - 1)
    A = np.full((2, 3), 2**31 - 2, dtype=np.int64)
    expect = [[(3 * (2**31 - 2) ** 2) % (2**31 - 1)] * 2] * 2
    assert F.matmul(A, A.T).tolist() == expect
