import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from genusforge import exactla as la
from genusforge.arith import valuation
from genusforge.lattice import (
    Lattice,
    contains,
    determinant,
    discriminant_group,
    dual,
    gram,
    index_in,
    intersect,
    lattice_sum,
    p_saturate,
    rescale_basis,
)

from helpers import random_gram

Z2 = Lattice.from_gram(la.identity(2))


def test_gram_examples():
    assert gram(Z2) == la.identity(2)
    assert gram(rescale_basis(Z2, 2)) == [[4, 0], [0, 4]]
    assert gram(Lattice(la.identity(2), [[1, 1], [0, 1]])) == [[2, 1], [1, 1]]


def test_lattice_rejects_degenerate_input():
    with pytest.raises(ValueError):
        Lattice(la.identity(2), [[1, 1], [2, 2]])
    with pytest.raises(ValueError):
        Lattice([[1, 2], [3, 1]], la.identity(2))


def test_dual_examples():
    U = Lattice.from_gram([[2, 1], [1, 1]])
    assert contains(dual(U), U) and contains(U, dual(U))
    D = dual(Lattice.from_gram([[2]]))
    assert D.basis == ((Fraction(1, 2),),)
    L = Lattice.from_gram([[1, 0], [0, 9]])
    Ld = dual(L)
    assert index_in(L, Ld) == 9
    assert la.is_integral(la.matmul(la.matmul(Ld.basis, L.ambient_gram), la.transpose(L.basis)))


def test_sum_and_intersection_examples():
    assert lattice_sum(Z2, Z2).basis == Z2.basis
    twice = rescale_basis(Z2, 2)
    meet = intersect(Z2, twice)
    assert contains(meet, twice) and contains(twice, meet)
    diag = Lattice(la.identity(2), [[1, 1], [0, 2]])
    joined = lattice_sum(twice, diag)
    assert contains(joined, diag) and contains(Z2, joined) and index_in(joined, Z2) == 2


def test_rescale_round_trip():
    L = Lattice.from_gram([[2, 1], [1, 3]])
    assert rescale_basis(L, 1) == L
    assert rescale_basis(rescale_basis(L, 2), Fraction(1, 2)) == L
    with pytest.raises(ValueError):
        rescale_basis(L, 0)


def test_json_round_trip():
    L = Lattice([[1, Fraction(1, 2)], [Fraction(1, 2), 3]], [[1, 0], [Fraction(1, 3), 2]])
    assert Lattice.from_json(L.to_json()) == L


def test_discriminant_group_examples():
    D = discriminant_group(Lattice.from_gram([[1, 0], [0, 9]]), 3)
    assert D.orders == (9,)
    assert D.size == 9 and D.quadratic[0].denominator == 9
    D2 = discriminant_group(Lattice.from_gram([[2, 0], [0, -2]]), 2)
    assert D2.orders == (2, 2)
    assert sorted(D2.quadratic) == [Fraction(1, 2), Fraction(3, 2)]
    assert D2.even


def test_p_saturate_examples():
    L = Lattice.from_gram([[1, 0], [0, 9]])
    S = p_saturate(L, 3)
    assert determinant(S) == 1 and contains(S, L)
    T = Lattice.from_gram([[3, 0], [0, 27]])
    assert all(o == 3 for o in discriminant_group(p_saturate(T, 3), 3).orders)
    U = Lattice.from_gram([[1, 0], [0, 3]])
    assert p_saturate(U, 3) == U


def _random_lattice(seed: int, n: int) -> Lattice:
    rng = random.Random(seed)
    G = random_gram(rng, n, 6)
    while True:
        B = [[Fraction(rng.randint(-3, 3), rng.choice([1, 1, 2, 3])) for _ in range(n)] for _ in range(n)]
        if la.det(B) != 0:
            return Lattice(G, B)


@given(st.integers(0, 10**6), st.integers(1, 4))
def test_dual_is_involution(seed, n):
    L = _random_lattice(seed, n)
    M = dual(dual(L))
    assert contains(L, M) and contains(M, L)


@given(st.integers(0, 10**6), st.integers(1, 4))
def test_index_multiplicativity(seed, n):
    L1 = _random_lattice(seed, n)
    rng = random.Random(seed + 1)
    while True:
        B = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
        if la.det(B) != 0:
            break
    L2 = Lattice(L1.ambient_gram, B)
    lhs = determinant(lattice_sum(L1, L2)) * determinant(intersect(L1, L2))
    assert lhs == determinant(L1) * determinant(L2)


@given(st.integers(0, 10**6), st.integers(1, 4), st.sampled_from([2, 3, 5]))
def test_discriminant_order_and_saturation(seed, n, p):
    rng = random.Random(seed)
    L = Lattice.from_gram(random_gram(rng, n, 12))
    d = abs(determinant(L))
    D = discriminant_group(L, p)
    assert D.size == p ** valuation(d, p)
    S = p_saturate(L, p)
    assert contains(S, L)
    assert la.is_integral(gram(S))
    idx = index_in(L, S)
    assert idx == p ** valuation(idx, p)
    assert all(o == p for o in discriminant_group(S, p).orders)
