"""Maximal overlattices, local modification and genus representatives."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import exactla as la
from .arith import (
    hilbert_symbol,
    legendre,
    prime_divisors,
    solve_conic,
    sqrt_mod,
    squarefree_part,
    valuation,
)
from .genus import GenusSymbol, is_valid, symbol_of
from .lattice import (
    DiscriminantGroup,
    Lattice,
    adjoin,
    discriminant_group,
    gram,
    is_even,
    is_integral,
    p_saturate,
    rescale_basis,
    sublattice,
)
from .padic import canonical_local_symbol, gram_zp_representative, normal_form

EXHAUSTIVE_LIMIT = 2**16


class ResourceLimitError(RuntimeError):
    pass


class ConstructionError(RuntimeError):
    """A construction stage failed; ``stage`` and ``prime`` locate it."""

    def __init__(self, stage: str, prime: int | None, message: str) -> None:
        where = f"{stage}" + (f" at p={prime}" if prime is not None else "")
        super().__init__(f"{where}: {message}")
        self.stage = stage
        self.prime = prime


class VerificationError(ConstructionError):
    pass


@dataclass(frozen=True)
class MaximalityCertificate:
    p: int
    group_size: int
    witness: str  # "trivial", "dimension<=1", "binary-nonresidue" or "exhaustive"


# -- isotropy search on discriminant groups -------------------------------------

def _integer_values(D: DiscriminantGroup) -> tuple[np.ndarray, int]:
    scale = 1
    for row in D.values:
        for x in row:
            scale = math.lcm(scale, x.denominator)
    V = np.array([[int(x * scale) for x in row] for row in D.values], dtype=object)
    return V, scale


def _elements(orders: Sequence[int]) -> np.ndarray:
    size = math.prod(orders)
    if size > EXHAUSTIVE_LIMIT:
        raise ResourceLimitError(f"discriminant group of size {size} exceeds the exhaustive search limit")
    grids = np.indices(tuple(orders)).reshape(len(orders), -1).T
    return grids.astype(np.int64)


def isotropic_elements(D: DiscriminantGroup, even: bool) -> np.ndarray:
    """All nonzero x in D with q(x) = 0 (mod 2 when ``even``, else mod 1)."""
    if not D.orders:
        return np.zeros((0, 0), dtype=np.int64)
    X = _elements(D.orders)
    V, scale = _integer_values(D)
    modulus = scale * (2 if even else 1)
    Vm = np.array([[int(v) % modulus for v in row] for row in V], dtype=np.int64)
    # c_i < 2^16 and entries below 2^20 keep products inside int64 after reduction
    Y = (X % modulus) @ Vm % modulus
    norms = np.einsum("ij,ij->i", Y, X % modulus) % modulus
    mask = norms == 0
    mask[0] = False
    return X[mask]


def _bilinear_matrix(D: DiscriminantGroup) -> tuple[np.ndarray, int]:
    V, scale = _integer_values(D)
    return np.array([[int(v) % scale for v in row] for row in V], dtype=np.int64), scale


def has_isotropic_vector(L: Lattice, p: int, even: bool | None = None) -> bool:
    """Exhaustive test for a nonzero isotropic element of D_p(L)."""
    D = discriminant_group(L, p)
    if even is None:
        even = p == 2 and is_even(L)
    return len(isotropic_elements(D, even)) > 0


# -- odd primes ---------------------------------------------------------------------

def _diagonalize_mod_p(A: list[list[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """P with P A P^T diagonal mod p (A symmetric, nondegenerate)."""
    m = len(A)
    A = [[x % p for x in row] for row in A]
    P = la.identity(m)
    diag = []
    for s in range(m):
        piv = next((i for i in range(s, m) if A[i][i] % p), None)
        if piv is None:
            i, j = next((i, j) for i in range(s, m) for j in range(s, m) if A[i][j] % p)
            A[i] = [(x + y) % p for x, y in zip(A[i], A[j])]
            for row in A:
                row[i] = (row[i] + row[j]) % p
            P[i] = [(x + y) % p for x, y in zip(P[i], P[j])]
            piv = i
        if piv != s:
            A[s], A[piv] = A[piv], A[s]
            for row in A:
                row[s], row[piv] = row[piv], row[s]
            P[s], P[piv] = P[piv], P[s]
        a = A[s][s]
        inv = pow(a, -1, p)
        for r in range(s + 1, m):
            f = A[r][s] * inv % p
            if f:
                A[r] = [(x - f * y) % p for x, y in zip(A[r], A[s])]
                for row in A:
                    row[r] = (row[r] - f * row[s]) % p
                P[r] = [(x - f * y) % p for x, y in zip(P[r], P[s])]
        diag.append(a)
    return P, diag


def _even_representative(L: Lattice, coeffs: list[Fraction], p: int, order: int) -> list[Fraction]:
    """Same class modulo L, but with even norm when L is even (p odd)."""
    G = gram(L)
    norm = sum(coeffs[i] * G[i][j] * coeffs[j] for i in range(len(G)) for j in range(len(G)))
    if is_even(L) and Fraction(norm) % 2:
        return [(1 + order) * x for x in coeffs]
    return coeffs


def op_overlattice(L: Lattice, p: int) -> Lattice:
    """One isotropic step at an odd prime; L itself when L is maximal at p."""
    return _op_step(L, p)[0]


def _op_step(L: Lattice, p: int) -> tuple[Lattice, MaximalityCertificate | None]:
    if p == 2:
        raise ValueError("op_overlattice is for odd primes")
    D = discriminant_group(L, p)
    if any(o != p for o in D.orders):
        raise ValueError(f"lattice is not {p}-saturated")
    m = len(D.orders)
    if m == 0:
        return L, MaximalityCertificate(p, 1, "trivial")
    if m == 1:
        return L, MaximalityCertificate(p, p, "dimension<=1")
    A = [[int(x * p) for x in row] for row in D.values]
    P, diag = _diagonalize_mod_p(A, p)
    if m == 2:
        a, b = diag
        r = (-b * pow(a, -1, p)) % p
        if legendre(r, p) != 1:
            return L, MaximalityCertificate(p, p * p, "binary-nonresidue")
        x = sqrt_mod(r, p)
        local = [x, 1]
    else:
        x, y = solve_conic(diag[0], diag[1], diag[2], p)
        local = [x, y, 1] + [0] * (m - 3)
    c = [sum(local[i] * P[i][j] for i in range(m)) % p for j in range(m)]
    t = D.element(c)
    t = _even_representative(L, t, p, p)
    return adjoin(L, [t]), None


def op_maximal(L: Lattice, p: int) -> tuple[Lattice, MaximalityCertificate]:
    if not is_integral(L):
        raise ValueError("op_maximal needs an integral lattice")
    L = _saturate(L, p)
    while True:
        M, cert = _op_step(L, p)
        if cert is not None:
            return L, cert
        L = _saturate(M, p)


def _saturate(L: Lattice, p: int) -> Lattice:
    """p_saturate that keeps even lattices even (odd p only)."""
    if not is_even(L):
        return p_saturate(L, p)
    while True:
        D = discriminant_group(L, p)
        extra = []
        for g, order in zip(D.generators, D.orders):
            e = valuation(order, p)
            if e >= 2:
                s = (e + 1) // 2
                extra.append(_even_representative(L, [p**s * x for x in g], p, p ** (e - s)))
        if not extra:
            return L
        L = adjoin(L, extra)


# -- the prime 2 ----------------------------------------------------------------

def two_maximal(L: Lattice, even: bool | None = None) -> Lattice:
    """2-maximal overlattice; even lattices stay even unless ``even`` is False."""
    return two_maximal_certified(L, even)[0]


def two_maximal_certified(L: Lattice, even: bool | None = None) -> tuple[Lattice, MaximalityCertificate]:
    if not is_integral(L):
        raise ValueError("two_maximal needs an integral lattice")
    if even is None:
        even = is_even(L)
    if even and not is_even(L):
        raise ValueError("even mode needs an even lattice")
    # stage 1: shrink the exponent of the discriminant group
    while True:
        D = discriminant_group(L, 2)
        step = None
        for i, (g, order) in enumerate(zip(D.generators, D.orders)):
            nu = valuation(order, 2)
            if nu < 2:
                continue
            if even:
                # an extra factor 2 when 2^nu * B(g, g) is odd keeps the norm even
                delta = (D.values[i][i] * order).numerator % 2 if nu % 2 == 0 else 0
                s = (nu + 1) // 2 + delta
            else:
                s = (nu + 1) // 2
            if s < nu:
                step = [2**s * x for x in g]
                break
        if step is None:
            break
        L = adjoin(L, [step])
    # stage 2: adjoin a totally isotropic subgroup found greedily
    D = discriminant_group(L, 2)
    chosen: list[np.ndarray] = []
    iso = isotropic_elements(D, even)
    if len(iso):
        Vb, scale = _bilinear_matrix(D)
        pairing = iso @ Vb % scale
        for idx, x in enumerate(iso):
            if all(int(pairing[idx] @ y % scale) == 0 for y in chosen):
                chosen.append(x)
    if chosen:
        L = adjoin(L, [D.element([int(v) for v in x]) for x in chosen])
    # stage 3: single isotropic vectors until none remain
    while True:
        D = discriminant_group(L, 2)
        iso = isotropic_elements(D, even)
        if len(iso) == 0:
            return L, MaximalityCertificate(2, D.size, "trivial" if D.size == 1 else "exhaustive")
        L = adjoin(L, [D.element([int(v) for v in iso[0]])])


def maximal_overlattice(L: Lattice) -> Lattice:
    return maximal_overlattice_with_certificates(L)[0]


def maximal_overlattice_with_certificates(L: Lattice) -> tuple[Lattice, list[MaximalityCertificate]]:
    if not is_integral(L):
        raise ValueError("maximal_overlattice needs an integral lattice")
    certs = []
    det = abs(la.det(gram(L)))
    if det % 2 == 0:
        L, cert = two_maximal_certified(L)
        certs.append(cert)
    for p in prime_divisors(abs(la.det(gram(L)))):
        if p == 2:
            continue
        L, cert = op_maximal(L, p)
        certs.append(cert)
    return L, certs


# -- rational representative ---------------------------------------------------------

def _rational_diagonal(G: Sequence[Sequence]) -> list[Fraction]:
    """Diagonal entries of a rational diagonalization of a symmetric matrix."""
    A = la.to_fractions(G)
    n = len(A)
    out = []
    idx = list(range(n))
    while idx:
        piv = next((i for i in idx if A[i][i] != 0), None)
        if piv is None:
            i, j = next((i, j) for i in idx for j in idx if A[i][j] != 0)
            A[i] = [x + y for x, y in zip(A[i], A[j])]
            for row in A:
                row[i] += row[j]
            piv = i
        a = A[piv][piv]
        out.append(a)
        idx.remove(piv)
        for r in idx:
            if A[r][piv]:
                f = A[r][piv] / a
                A[r] = [x - f * y for x, y in zip(A[r], A[piv])]
                for row in A:
                    row[r] -= f * row[piv]
    return out


def hasse_invariant(entries: Sequence, p: int) -> int:
    c = 1
    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            c *= hilbert_symbol(entries[i], entries[j], p)
    return c


def _squarefree_candidates(limit: int):
    for m in range(1, limit + 1):
        if squarefree_part(m) == m:
            yield m
            yield -m


def rational_representative(g: GenusSymbol) -> Lattice:
    """A diagonal integral lattice in the rational quadratic space of g."""
    validity = is_valid(g)
    if not validity:
        raise ConstructionError("rational_representative", None, f"invalid symbol: {validity.reason}")
    n_plus, n_minus = g.signature
    det = g.det
    primes = g.primes
    target = {}
    for s in g.locals:
        entries = _rational_diagonal(gram_zp_representative(s))
        target[s.p] = hasse_invariant(entries, s.p)
    entries: list[int] = []
    d = squarefree_part(det)
    while n_plus + n_minus > 3:
        a = 1 if n_plus >= 1 else -1
        d = squarefree_part(d * a)
        if a == -1:
            for p in primes:
                target[p] *= hilbert_symbol(-1, d, p)
            n_minus -= 1
        else:
            n_plus -= 1
        entries.append(a)
    entries += _small_diagonal(n_plus, n_minus, d, target)
    L = Lattice.from_gram(la.diagonal(entries))
    _check_rational(entries, g)
    return L


def _hasse_matches(entries: list[int], target: dict[int, int]) -> bool:
    primes = set(target)
    for a in entries:
        primes.update(prime_divisors(a))
    return all(hasse_invariant(entries, p) == target.get(p, 1) for p in primes)


def _small_diagonal(n_plus: int, n_minus: int, d: int, target: dict[int, int]) -> list[int]:
    m = n_plus + n_minus
    if m == 1:
        return [d]
    cands = list(_squarefree_candidates(200))
    if m == 2:
        for a in cands:
            e = [a, squarefree_part(a * d)]
            if sum(x < 0 for x in e) == n_minus and _hasse_matches(e, target):
                return e
    else:
        for a, b in itertools.product(cands[:120], repeat=2):
            e = [a, b, squarefree_part(a * b * d)]
            if sum(x < 0 for x in e) == n_minus and _hasse_matches(e, target):
                return e
    raise ConstructionError("rational_representative", None, "no small diagonal form found")


def _check_rational(entries: list[int], g: GenusSymbol) -> None:
    neg = sum(x < 0 for x in entries)
    if neg != g.signature[1] or squarefree_part(math.prod(entries)) != squarefree_part(g.det):
        raise VerificationError("rational_representative", None, "signature or determinant class mismatch")
    for s in g.locals:
        if hasse_invariant(entries, s.p) != hasse_invariant(_rational_diagonal(gram_zp_representative(s)), s.p):
            raise VerificationError("rational_representative", s.p, "Hasse invariant mismatch")


# -- local modification ----------------------------------------------------------

def _p_part(x: int, p: int) -> int:
    return p ** valuation(x, p) if x else 1


def local_modification(M: Lattice, G: Sequence[Sequence[int]], p: int, check: bool = True) -> Lattice:
    """Lattice equal to M away from p whose completion at p has Gram G."""
    G = [[int(x) for x in row] for row in G]
    if check:
        if p == 2 and not (is_even(M) and all(G[i][i] % 2 == 0 for i in range(len(G)))):
            raise ConstructionError("local_modification", p, "lattice and target must be even at 2")
        if has_isotropic_vector(M, p, even=(p == 2)):
            raise ConstructionError("local_modification", p, "lattice is not maximal at p")
    Ginv = la.inverse(G)
    d = _p_part(la.common_denominator(Ginv), p)
    target = Lattice.from_gram(G)
    if p == 2:
        Lmax = two_maximal(target, even=True)
    else:
        Lmax, _ = op_maximal(target, p)
    LB = [[int(x) for x in row] for row in Lmax.basis] if la.is_integral(Lmax.basis) else Lmax.basis
    Gmax = gram(Lmax)
    GM = gram(M)
    nu = valuation(d, p) if d > 1 else 0
    prec = nu + valuation(abs(la.det(GM)), p) + 6
    TL, NL = normal_form(Gmax, p, prec)
    TM, NM = normal_form(GM, p, prec)
    if NL != NM:
        raise ConstructionError("local_modification", p, "target is not isometric to the lattice at p")
    mod = p**prec
    TLinv = la.inverse_mod(TL, mod)
    LBinv = la.inverse(LB)
    if not la.is_integral(LBinv):
        raise ConstructionError("local_modification", p, "maximal overlattice does not contain the target lattice")
    C = la.matmul(la.matmul(LBinv, TLinv), TM)
    C = [[int(x) % d for x in row] for row in C]
    rows = la.hnf_mod(C, d) if d > 1 else la.identity(len(G))
    N = sublattice(M, rows)
    if check and canonical_local_symbol(gram(N), p) != canonical_local_symbol(G, p):
        raise VerificationError("local_modification", p, "local symbol of the result differs from the target")
    return N


# -- representatives -------------------------------------------------------------

def representative(g: GenusSymbol, verify: bool = True) -> Lattice:
    """An integral lattice in the genus g."""
    validity = is_valid(g)
    if not validity:
        raise ConstructionError("representative", None, f"invalid symbol: {validity.reason}")
    L = rational_representative(g)
    M = maximal_overlattice(rescale_basis(L, 2))
    G2 = gram_zp_representative(g.local(2))
    if g.is_even:
        M = local_modification(M, G2, 2, check=verify)
    else:
        M = local_modification(M, la.scale(G2, 4), 2, check=verify)
        M = rescale_basis(M, Fraction(1, 2))
    for s in g.locals:
        if s.p == 2:
            continue
        M = local_modification(M, gram_zp_representative(s), s.p, check=verify)
    if verify:
        got = symbol_of(M)
        if got != g:
            raise VerificationError("representative", None, f"constructed lattice has symbol {got}, expected {g}")
    return M


__all__ = [
    "ConstructionError",
    "MaximalityCertificate",
    "ResourceLimitError",
    "VerificationError",
    "has_isotropic_vector",
    "isotropic_elements",
    "local_modification",
    "maximal_overlattice",
    "maximal_overlattice_with_certificates",
    "op_maximal",
    "op_overlattice",
    "rational_representative",
    "representative",
    "two_maximal",
    "two_maximal_certified",
]
