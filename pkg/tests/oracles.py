"""Independent reference computations used by the tests."""

import itertools
from functools import lru_cache

import numpy as np


def _upper_indices(n):
    return [(i, j) for i in range(n) for j in range(i, n)]


def _det_np(M):
    n = M.shape[1]
    if n == 1:
        return M[:, 0, 0]
    if n == 2:
        return M[:, 0, 0] * M[:, 1, 1] - M[:, 0, 1] * M[:, 1, 0]
    return (
        M[:, 0, 0] * (M[:, 1, 1] * M[:, 2, 2] - M[:, 1, 2] * M[:, 2, 1])
        - M[:, 0, 1] * (M[:, 1, 0] * M[:, 2, 2] - M[:, 1, 2] * M[:, 2, 0])
        + M[:, 0, 2] * (M[:, 1, 0] * M[:, 2, 1] - M[:, 1, 1] * M[:, 2, 0])
    )


@lru_cache(maxsize=None)
def gram_sweep(n: int, bound: int, max_det: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """All symmetric integer n x n matrices with entries in [-bound, bound] and
    0 < |det| <= max_det, one per orbit of the signed permutation group."""
    idx = _upper_indices(n)
    values = np.arange(-bound, bound + 1, dtype=np.int64)
    grid = np.array(list(itertools.product(values, repeat=len(idx))), dtype=np.int64)
    M = np.zeros((len(grid), n, n), dtype=np.int64)
    for col, (i, j) in enumerate(idx):
        M[:, i, j] = grid[:, col]
        M[:, j, i] = grid[:, col]
    d = np.abs(_det_np(M))
    keep = (d > 0) & (d <= max_det)
    M = M[keep]
    base = 2 * bound + 1
    best = None
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1, -1), repeat=n):
            s = np.array(signs, dtype=np.int64)
            P = M[:, list(perm)][:, :, list(perm)] * np.outer(s, s)
            code = np.zeros(len(M), dtype=np.int64)
            for i, j in idx:
                code = code * base + (P[:, i, j] + bound)
            best = code if best is None else np.minimum(best, code)
    reps = []
    for c in np.unique(best):
        entries = []
        c = int(c)
        for _ in idx:
            entries.append(c % base - bound)
            c //= base
        entries.reverse()
        G = [[0] * n for _ in range(n)]
        for (i, j), x in zip(idx, entries):
            G[i][j] = G[j][i] = x
        reps.append(tuple(tuple(r) for r in G))
    return tuple(reps)


def partition_weight_series(K: int) -> list[int]:
    """c_k by listing partitions explicitly and weighting 2^(#distinct parts)."""

    def partitions(k, largest):
        if k == 0:
            yield ()
            return
        for part in range(min(k, largest), 0, -1):
            for rest in partitions(k - part, part):
                yield (part,) + rest

    return [sum(2 ** len(set(q)) for q in partitions(k, k)) for k in range(K + 1)]


def partition_numbers_dp(K: int) -> list[int]:
    ways = [1] + [0] * K
    for part in range(1, K + 1):
        for total in range(part, K + 1):
            ways[total] += ways[total - part]
    return ways
