import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from genusforge import exactla as la

int_matrices = st.integers(1, 5).flatmap(
    lambda n: st.integers(1, 5).flatmap(
        lambda m: st.lists(st.lists(st.integers(-50, 50), min_size=m, max_size=m), min_size=n, max_size=n)
    )
)


def test_det_examples():
    assert la.det(la.identity(3)) == 1
    assert la.det([[0, 1], [1, 0]]) == -1
    assert la.det([[2, 1], [1, 2]]) == 3
    with pytest.raises(ValueError):
        la.det([[1, 2, 3]])


def test_inverse_examples():
    assert la.inverse(la.identity(3)) == la.identity(3)
    assert la.inverse([[2, 0], [0, 2]]) == [[Fraction(1, 2), 0], [0, Fraction(1, 2)]]
    third = Fraction(1, 3)
    assert la.inverse([[2, 1], [1, 2]]) == [[2 * third, -third], [-third, 2 * third]]
    with pytest.raises(la.SingularMatrixError, match="singular"):
        la.inverse([[1, 2], [2, 4]])


@given(st.integers(1, 5), st.integers(0, 10**6))
def test_inverse_is_exact(n, seed):
    rng = random.Random(seed)
    M = [[Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(n)] for _ in range(n)]
    if la.det(M) == 0:
        return
    assert la.matmul(M, la.inverse(M)) == la.identity(n)


def test_hnf_examples():
    assert la.hnf(la.identity(3)) == la.identity(3)
    assert la.hnf([[2, 0], [4, 0]]) == [[2, 0], [0, 0]]
    assert la.hnf([[1, 2], [3, 4]]) == [[1, 0], [0, 2]]


@given(int_matrices)
def test_hnf_transform_and_shape(A):
    H, U = la.hnf_with_transform(A)
    assert la.matmul(U, A) == H
    assert abs(la.det(U)) == 1
    last_pivot = -1
    for row in H:
        nz = [j for j, x in enumerate(row) if x]
        if not nz:
            continue
        j = nz[0]
        assert j > last_pivot and row[j] > 0
        for above in H[: H.index(row)]:
            assert 0 <= above[j] < row[j]
        last_pivot = j


@given(int_matrices)
def test_hnf_preserves_row_lattice(A):
    H, U = la.hnf_with_transform(A)
    # U is unimodular, so both row lattices coincide
    Uinv = la.inverse(U)
    assert la.is_integral(Uinv)
    assert la.matmul(Uinv, H) == [list(map(Fraction, r)) for r in A]


def test_snf_examples():
    assert la.snf([[2, 0], [0, 3]]).d == (1, 6)
    assert la.snf(la.identity(3)).d == (1, 1, 1)
    assert la.snf(la.zeros(2, 2)).d == (0, 0)


@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 10**6))
def test_snf_invariants(n, m, seed):
    rng = random.Random(seed)
    A = [[rng.randint(-50, 50) for _ in range(m)] for _ in range(n)]
    r = la.snf(A)
    D = la.matmul(la.matmul(r.U, A), r.V)
    assert all(D[i][j] == (r.d[i] if i == j else 0) for i in range(n) for j in range(m))
    assert abs(la.det(r.U)) == 1 and abs(la.det(r.V)) == 1
    assert all(x >= 0 for x in r.d)
    for a, b in zip(r.d, r.d[1:]):
        assert (b % a == 0) if a else b == 0


@given(st.integers(1, 5), st.integers(0, 10**6))
def test_hnf_mod_matches_stacked_hnf(n, seed):
    rng = random.Random(seed)
    A = [[rng.randint(-20, 20) for _ in range(n)] for _ in range(n)]
    if la.det(A) == 0:
        return
    d = abs(la.det(A)) * rng.randint(1, 3)
    stacked = A + [[d * int(i == j) for j in range(n)] for i in range(n)]
    assert la.hnf_mod(A, d) == la.hnf_basis(stacked)


def test_inverse_mod():
    M = [[2, 1], [1, 1]]
    inv = la.inverse_mod(M, 7)
    prod = la.matmul(M, inv)
    assert all((prod[i][j] - int(i == j)) % 7 == 0 for i in range(2) for j in range(2))
