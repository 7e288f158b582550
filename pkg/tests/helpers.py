"""Random test data shared by several test modules."""

import random

from genusforge import exactla as la


def random_gram(rng: random.Random, n: int, bound: int, max_det: int | None = None) -> list[list[int]]:
    """Nonsingular symmetric integer matrix with entries in [-bound, bound]."""
    while True:
        G = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                G[i][j] = G[j][i] = rng.randint(-bound, bound)
        d = la.det(G)
        if d != 0 and (max_det is None or abs(d) <= max_det):
            return G


def random_unimodular(rng: random.Random, n: int, steps: int = 6) -> list[list[int]]:
    A = la.identity(n)
    for _ in range(steps):
        if n == 1:
            A[0][0] = -A[0][0]
            continue
        i, j = rng.sample(range(n), 2)
        f = rng.randint(-2, 2)
        A[i] = [a + f * b for a, b in zip(A[i], A[j])]
    perm = list(range(n))
    rng.shuffle(perm)
    return [A[k] for k in perm]


_DIAGONAL_CHOICES = [1, 2, 3, 4, 5, 6, 7, 8, 9, 12, 16, 18, 25, 27, 32, 49]


def random_integral_lattice_gram(rng: random.Random, max_rank: int = 5, max_det: int = 10**4) -> list[list[int]]:
    """Mix of dense small-entry Grams and disguised diagonal forms with prime-power entries."""
    n = rng.randint(1, max_rank)
    if rng.random() < 0.5:
        return random_gram(rng, n, 4, max_det=max_det)
    while True:
        diag = [rng.choice(_DIAGONAL_CHOICES) * rng.choice((1, -1)) for _ in range(n)]
        det = 1
        for x in diag:
            det *= x
        if abs(det) <= max_det:
            break
    A = random_unimodular(rng, n, steps=4)
    return la.congruence(A, la.diagonal(diag))


def random_coefficient_matrix(rng: random.Random, n: int, primes=(2, 3, 5)) -> list[list[int]]:
    """Full-rank integer matrix whose determinant involves only small primes."""
    p = rng.choice(primes)
    D = la.diagonal([rng.choice((1, 1, p, p * p)) for _ in range(n)])
    return la.matmul(la.matmul(random_unimodular(rng, n, 3), D), random_unimodular(rng, n, 3))
