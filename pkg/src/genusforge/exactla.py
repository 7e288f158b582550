"""Exact linear algebra over Z and Q.

Matrices are plain lists of row lists holding ``int`` or ``Fraction`` entries.
Nothing here mutates its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Matrix = list[list]


class SingularMatrixError(ValueError):
    pass


def shape(M: Sequence[Sequence]) -> tuple[int, int]:
    return len(M), (len(M[0]) if M else 0)


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(r: int, c: int) -> Matrix:
    return [[0] * c for _ in range(r)]


def diagonal(entries: Sequence) -> Matrix:
    n = len(entries)
    return [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(M: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*M)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def scale(M: Sequence[Sequence], c) -> Matrix:
    return [[c * x for x in row] for row in M]


def congruence(T: Sequence[Sequence], G: Sequence[Sequence]) -> Matrix:
    """T G T^T."""
    return matmul(matmul(T, G), transpose(T))


def to_fractions(M: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in M]


def simplify(M: Sequence[Sequence]) -> Matrix:
    """Turn integral Fractions back into ints."""
    return [[x.numerator if isinstance(x, Fraction) and x.denominator == 1 else x for x in row] for row in M]


def is_integral(M: Sequence[Sequence]) -> bool:
    return all(getattr(x, "denominator", 1) == 1 for row in M for x in row)


def is_symmetric(M: Sequence[Sequence]) -> bool:
    n = len(M)
    return all(M[i][j] == M[j][i] for i in range(n) for j in range(i))


def common_denominator(M: Sequence[Sequence]) -> int:
    d = 1
    for row in M:
        for x in row:
            d = math.lcm(d, getattr(x, "denominator", 1))
    return d


def det(M: Sequence[Sequence]):
    """Exact determinant (Bareiss on the cleared integer matrix)."""
    n, m = shape(M)
    if n != m:
        raise ValueError("det of a non-square matrix")
    if n == 0:
        return 1
    d = common_denominator(M)
    A = [[int(x * d) for x in row] for row in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    value = sign * A[n - 1][n - 1]
    if d == 1:
        return value
    r = Fraction(value, d**n)
    return r.numerator if r.denominator == 1 else r


def inverse(M: Sequence[Sequence]) -> Matrix:
    """Exact inverse by Gauss-Jordan over Q."""
    n, m = shape(M)
    if n != m:
        raise ValueError("inverse of a non-square matrix")
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            raise SingularMatrixError("singular")
        A[c], A[piv] = A[piv], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return simplify([row[n:] for row in A])


def rank(M: Sequence[Sequence]) -> int:
    A = [[Fraction(x) for x in row] for row in M]
    r = 0
    rows, cols = shape(A)
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(r + 1, rows):
            if A[i][c] != 0:
                f = A[i][c] / A[r][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        r += 1
    return r


def inverse_mod(M: Sequence[Sequence[int]], m: int) -> Matrix:
    """Inverse of an integer matrix modulo m (det must be a unit mod m)."""
    n = len(M)
    A = [[x % m for x in row] + [int(i == j) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        piv = next((r for r in range(c, n) if math.gcd(A[r][c], m) == 1), None)
        if piv is None:
            raise SingularMatrixError(f"matrix not invertible modulo {m}")
        A[c], A[piv] = A[piv], A[c]
        inv = pow(A[c][c], -1, m)
        A[c] = [x * inv % m for x in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [(x - f * y) % m for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def hnf_with_transform(A: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix]:
    """Row-style Hermite normal form H = U A, U unimodular.

    Pivots are positive, entries above a pivot are reduced into [0, pivot),
    zero rows are moved to the bottom.
    """
    H = [list(map(int, row)) for row in A]
    rows, cols = shape(H)
    U = identity(rows)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        while True:
            nz = [i for i in range(r, rows) if H[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(H[i][c]))
            H[r], H[piv] = H[piv], H[r]
            U[r], U[piv] = U[piv], U[r]
            done = True
            for i in range(r + 1, rows):
                if H[i][c]:
                    q = H[i][c] // H[r][c]
                    H[i] = [x - q * y for x, y in zip(H[i], H[r])]
                    U[i] = [x - q * y for x, y in zip(U[i], U[r])]
                    if H[i][c]:
                        done = False
            if done:
                break
        if r < rows and H[r][c] != 0:
            if H[r][c] < 0:
                H[r] = [-x for x in H[r]]
                U[r] = [-x for x in U[r]]
            for i in range(r):
                q = H[i][c] // H[r][c]
                if q:
                    H[i] = [x - q * y for x, y in zip(H[i], H[r])]
                    U[i] = [x - q * y for x, y in zip(U[i], U[r])]
            r += 1
    return H, U


def hnf(A: Sequence[Sequence[int]]) -> Matrix:
    return hnf_with_transform(A)[0]


def hnf_basis(A: Sequence[Sequence[int]]) -> Matrix:
    """Nonzero rows of the HNF of an integer matrix."""
    H = _hnf_fast(A)
    return [row for row in H if any(row)]


def _hnf_fast(A: Sequence[Sequence[int]]) -> Matrix:
    # same reduction as hnf_with_transform, without tracking the transform
    H = [list(map(int, row)) for row in A]
    rows, cols = shape(H)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        while True:
            nz = [i for i in range(r, rows) if H[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(H[i][c]))
            H[r], H[piv] = H[piv], H[r]
            done = True
            for i in range(r + 1, rows):
                if H[i][c]:
                    q = H[i][c] // H[r][c]
                    H[i] = [x - q * y for x, y in zip(H[i], H[r])]
                    if H[i][c]:
                        done = False
            if done:
                break
        if r < rows and H[r][c] != 0:
            if H[r][c] < 0:
                H[r] = [-x for x in H[r]]
            for i in range(r):
                q = H[i][c] // H[r][c]
                if q:
                    H[i] = [x - q * y for x, y in zip(H[i], H[r])]
            r += 1
    return H


def hnf_mod(A: Sequence[Sequence[int]], d: int) -> Matrix:
    """HNF basis of the row lattice spanned by A together with d·Z^n.

    Every d·e_j lies in the lattice, so entries may be reduced modulo d at
    will; this keeps the numbers bounded by d.
    """
    cols = len(A[0]) if A else 0
    pool = [[x % d for x in row] for row in A]
    basis = []
    for c in range(cols):
        pivot = [0] * cols
        pivot[c] = d
        rest = []
        for row in pool:
            if row[c] == 0:
                rest.append(row)
                continue
            a, b = pivot, row
            while b[c]:
                q = a[c] // b[c]
                a, b = b, [(x - q * y) for x, y in zip(a, b)]
            pivot = a
            rest.append([x % d for x in b])
        if pivot[c] < 0:
            pivot = [-x for x in pivot]
        pivot = [x % d if j > c else x for j, x in enumerate(pivot)]
        g = pivot[c]
        # (d/g)·pivot reduces to a row with zero in column c
        extra = [(d // g) * x % d for x in pivot]
        extra[c] = 0
        rest.append(extra)
        basis.append(pivot)
        pool = [r for r in rest if any(r[c + 1:])]
    for c in range(cols):
        for i in range(c):
            q = basis[i][c] // basis[c][c]
            if q:
                basis[i] = [x - q * y for x, y in zip(basis[i], basis[c])]
    return basis


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


@dataclass(frozen=True)
class SnfResult:
    U: Matrix
    V: Matrix
    d: tuple[int, ...]


def snf(A: Sequence[Sequence[int]]) -> SnfResult:
    """Smith normal form with transforms: U A V = diag(d), d_i | d_{i+1}.

    Pivot is always the nonzero entry of least absolute value in the
    remaining block.
    """
    S = [list(map(int, row)) for row in A]
    rows, cols = shape(S)
    U, V = identity(rows), identity(cols)
    for t in range(min(rows, cols)):
        while True:
            entries = [(abs(S[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if S[i][j]]
            if not entries:
                break
            _, i, j = min(entries)
            S[t], S[i] = S[i], S[t]
            U[t], U[i] = U[i], U[t]
            if j != t:
                for row in S:
                    row[t], row[j] = row[j], row[t]
                for row in V:
                    row[t], row[j] = row[j], row[t]
            piv = S[t][t]
            clean = True
            for i in range(t + 1, rows):
                q = S[i][t] // piv
                if q:
                    S[i] = [x - q * y for x, y in zip(S[i], S[t])]
                    U[i] = [x - q * y for x, y in zip(U[i], U[t])]
                if S[i][t]:
                    clean = False
            for j in range(t + 1, cols):
                q = S[t][j] // piv
                if q:
                    for row in S:
                        row[j] -= q * row[t]
                    for row in V:
                        row[j] -= q * row[t]
                if S[t][j]:
                    clean = False
            if not clean:
                continue
            # divisibility: fold an offending row into row t
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if S[i][j] % piv), None)
            if bad is None:
                break
            i = bad[0]
            S[t] = [x + y for x, y in zip(S[t], S[i])]
            U[t] = [x + y for x, y in zip(U[t], U[i])]
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
    d = tuple(S[i][i] for i in range(min(rows, cols)))
    return SnfResult(U, V, d)


def solve_left(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    """X with X A = B for square nonsingular A."""
    return matmul(B, inverse(A))
