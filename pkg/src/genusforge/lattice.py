"""Lattices inside a fixed rational quadratic space."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from . import exactla as la
from .arith import factorize, valuation


def _frozen(M: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(x) for x in row) for row in M)


@dataclass(frozen=True)
class Lattice:
    """Rows of ``basis`` span the lattice inside (Q^n, ambient_gram)."""

    ambient_gram: tuple[tuple[Fraction, ...], ...]
    basis: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ambient_gram", _frozen(self.ambient_gram))
        object.__setattr__(self, "basis", _frozen(self.basis))
        n = len(self.ambient_gram)
        if not la.is_symmetric(self.ambient_gram):
            raise ValueError("ambient Gram matrix is not symmetric")
        if len(self.basis) != n or any(len(row) != n for row in self.basis):
            raise ValueError("basis must be a square matrix matching the ambient dimension")
        if la.det(self.basis) == 0:
            raise ValueError("basis is not of full rank")

    @classmethod
    def from_gram(cls, G: Sequence[Sequence]) -> "Lattice":
        return cls(G, la.identity(len(G)))

    @property
    def rank(self) -> int:
        return len(self.basis)

    @cached_property
    def gram_matrix(self) -> la.Matrix:
        db = la.common_denominator(self.basis)
        da = la.common_denominator(self.ambient_gram)
        B = [[int(x * db) for x in row] for row in self.basis]
        A = [[int(x * da) for x in row] for row in self.ambient_gram]
        P = la.congruence(B, A)
        scale = db * db * da
        if all(x % scale == 0 for row in P for x in row):
            return [[x // scale for x in row] for row in P]
        return [[Fraction(x, scale) if x % scale else x // scale for x in row] for row in P]

    def to_dict(self) -> dict:
        enc = lambda M: [[f"{x.numerator}/{x.denominator}" for x in row] for row in M]
        return {"ambient_gram": enc(self.ambient_gram), "basis": enc(self.basis)}

    @classmethod
    def from_dict(cls, data: dict) -> "Lattice":
        dec = lambda M: [[Fraction(x) for x in row] for row in M]
        return cls(dec(data["ambient_gram"]), dec(data["basis"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Lattice":
        return cls.from_dict(json.loads(text))


def gram(L: Lattice) -> la.Matrix:
    return [list(row) for row in L.gram_matrix]


def determinant(L: Lattice):
    return la.det(gram(L))


def is_integral(L: Lattice) -> bool:
    return la.is_integral(gram(L))


def is_even(L: Lattice) -> bool:
    G = gram(L)
    return la.is_integral(G) and all(G[i][i] % 2 == 0 for i in range(len(G)))


def _same_space(L1: Lattice, L2: Lattice) -> None:
    if L1.ambient_gram != L2.ambient_gram:
        raise ValueError("lattices live in different quadratic spaces")


def _span(rows: Sequence[Sequence]) -> la.Matrix:
    """HNF basis of the Z-span of rational rows."""
    den = la.common_denominator(rows)
    H = la.hnf_basis([[int(x * den) for x in row] for row in rows])
    return [[Fraction(x, den) for x in row] for row in H]


def dual(L: Lattice) -> Lattice:
    return Lattice(L.ambient_gram, la.matmul(la.inverse(gram(L)), L.basis))


def lattice_sum(L1: Lattice, L2: Lattice) -> Lattice:
    _same_space(L1, L2)
    return Lattice(L1.ambient_gram, _span(list(L1.basis) + list(L2.basis)))


def _coordinate_dual(B: Sequence[Sequence]) -> la.Matrix:
    # dual with respect to the standard dot product on coordinates
    return la.transpose(la.inverse(B))


def intersect(L1: Lattice, L2: Lattice) -> Lattice:
    _same_space(L1, L2)
    joined = _span(_coordinate_dual(L1.basis) + _coordinate_dual(L2.basis))
    return Lattice(L1.ambient_gram, _span(_coordinate_dual(joined)))


def rescale_basis(L: Lattice, c) -> Lattice:
    if c == 0:
        raise ValueError("cannot rescale by zero")
    return Lattice(L.ambient_gram, la.scale(L.basis, Fraction(c)))


def contains(L: Lattice, M: Lattice) -> bool:
    """Whether M is a sublattice of L."""
    _same_space(L, M)
    return la.is_integral(la.matmul(M.basis, la.inverse(L.basis)))


def index_in(M: Lattice, L: Lattice) -> int:
    """[L : M] for M a sublattice of L."""
    return abs(la.det(M.basis) / la.det(L.basis))


def adjoin(L: Lattice, coefficients: Sequence[Sequence]) -> Lattice:
    """Overlattice spanned by L and vectors given by coefficients over L's basis."""
    if not coefficients:
        return L
    rows = la.identity(L.rank) + [list(v) for v in coefficients]
    return Lattice(L.ambient_gram, la.matmul(_span(rows), L.basis))


def sublattice(L: Lattice, coefficients: Sequence[Sequence]) -> Lattice:
    """Lattice whose basis is given by full-rank coefficients over L's basis."""
    return Lattice(L.ambient_gram, la.matmul(coefficients, L.basis))


@dataclass(frozen=True)
class DiscriminantGroup:
    """p-part of L^dual / L.

    ``generators`` are coefficient vectors over the lattice basis and
    ``values[i][j]`` is the exact rational B(g_i, g_j); ``bilinear`` reduces
    it into [0, 1) and ``quadratic`` reduces the norms into [0, 2).
    """

    p: int
    generators: tuple[tuple[Fraction, ...], ...]
    orders: tuple[int, ...]
    values: tuple[tuple[Fraction, ...], ...]
    even: bool

    @property
    def size(self) -> int:
        out = 1
        for o in self.orders:
            out *= o
        return out

    @property
    def bilinear(self) -> list[list[Fraction]]:
        return [[x % 1 for x in row] for row in self.values]

    @property
    def quadratic(self) -> list[Fraction]:
        return [self.values[i][i] % (2 if self.even else 1) for i in range(len(self.orders))]

    def element(self, coords: Sequence[int]) -> list[Fraction]:
        """Coefficient vector (over the lattice basis) of sum c_i g_i."""
        n = len(self.generators[0]) if self.generators else 0
        return [sum((c * g[k] for c, g in zip(coords, self.generators)), Fraction(0)) for k in range(n)]

    def norm(self, coords: Sequence[int]) -> Fraction:
        """B(x, x) for x = sum c_i g_i, taken modulo 2 (even) or 1 (odd)."""
        m = len(coords)
        v = sum(coords[i] * coords[j] * self.values[i][j] for i in range(m) for j in range(m))
        return Fraction(v) % (2 if self.even else 1)


def discriminant_group(L: Lattice, p: int) -> DiscriminantGroup:
    G = L.gram_matrix
    if not la.is_integral(G):
        raise ValueError("discriminant group needs an integral lattice")
    res = la.snf(G)
    rows, orders = [], []
    for i, d in enumerate(res.d):
        if d == 0:
            raise ValueError("singular Gram matrix")
        e = valuation(d, p)
        if e:
            rows.append(res.U[i])
            orders.append(p**e)
    GU = [[sum(g * u for g, u in zip(grow, urow)) for grow in G] for urow in rows]
    values = tuple(
        tuple(Fraction(sum(a * b for a, b in zip(GU[i], rows[j])), orders[i] * orders[j]) for j in range(len(rows)))
        for i in range(len(rows))
    )
    gens = tuple(tuple(Fraction(x, o) for x in u) for u, o in zip(rows, orders))
    even = all(G[i][i] % 2 == 0 for i in range(len(G)))
    return DiscriminantGroup(p, gens, tuple(orders), values, even)


def p_saturate(L: Lattice, p: int) -> Lattice:
    """Smallest-step overlattice chain until p kills the p-part of the discriminant."""
    if not is_integral(L):
        raise ValueError("p_saturate needs an integral lattice")
    while True:
        D = discriminant_group(L, p)
        extra = []
        for g, order in zip(D.generators, D.orders):
            e = valuation(order, p)
            if e >= 2:
                c = p ** ((e + 1) // 2)
                extra.append([c * x for x in g])
        if not extra:
            return L
        L = adjoin(L, extra)


def relevant_primes(L: Lattice) -> list[int]:
    """Primes dividing 2·det of an integral lattice."""
    d = abs(determinant(L))
    return sorted(set([2] + factorize(d).primes))
