"""Naive unpacked reference implementations shared by the tests."""
import itertools

import numpy as np

from bindl.core.bitmat import BinMatrix, PackedBits, transpose


def random_dense(rng, rows, cols, density=0.5):
    return (rng.random((rows, cols)) < density).astype(np.uint8)


def random_matrix(rng, rows, cols, density=0.5):
    return BinMatrix.from_dense(random_dense(rng, rows, cols, density))


def random_vector(rng, length, density=0.5):
    return PackedBits.from_bits(rng.random(length) < density)


def from_row_words(rows, cols, row_words):
    """Matrix whose row i is packed in row_words[i]."""
    return transpose(BinMatrix(cols, rows, row_words))


def naive_mod2_matmul(D, A):
    return (np.asarray(D, dtype=np.int64) @ np.asarray(A, dtype=np.int64)) & 1


def naive_bool_matmul(D, A):
    return ((np.asarray(D, dtype=np.int64) @ np.asarray(A, dtype=np.int64)) > 0).astype(np.int64)


def naive_residual(X, D, A):
    return np.asarray(X, dtype=np.int64) ^ naive_mod2_matmul(D, A)


def naive_correlations(D, r):
    return np.asarray(D, dtype=np.int64).T @ np.asarray(r, dtype=np.int64)


def naive_bmp(x, D, a0, h_max=None, w_max=1):
    """BMP that recomputes g = Dᵀr from scratch before every toggle."""
    D = np.asarray(D, dtype=np.int64)
    a = np.asarray(a0, dtype=np.int64).copy()
    atom_weights = D.sum(axis=0)
    r = np.asarray(x, dtype=np.int64) ^ naive_mod2_matmul(D, a)
    h_max = D.shape[1] if h_max is None else h_max

    for _ in range(h_max):
        if r.sum() < w_max:
            break
        g = naive_correlations(D, r)
        scores = np.where(atom_weights > 0, np.abs(g) / np.maximum(atom_weights, 1), -1.0)
        k = int(np.argmax(scores))
        if scores[k] < 0 or g[k] == 0:
            break
        candidate = r ^ D[:, k]
        if candidate.sum() >= r.sum():
            break
        a[k] ^= 1
        r = candidate
    return a


def all_vectors(length):
    """Every 0/1 vector of the given length, in lexicographic order."""
    return np.array(list(itertools.product((0, 1), repeat=length)), dtype=np.int64).reshape(-1, length)


def brute_force_atom(restored):
    """Atom minimising the residual weight on the restored columns (m x |J|).

    Among equally good atoms the one with the fewest set bits wins, which is
    unique and equal to a majority vote with ties going to 0.
    """
    restored = np.asarray(restored, dtype=np.int64)
    best = None
    for candidate in all_vectors(restored.shape[0]):
        cost = int((restored ^ candidate[:, None]).sum())
        key = (cost, int(candidate.sum()))
        if best is None or key < best[0]:
            best = (key, candidate)
    return best[1], best[0][0]


def rank_one_cost(X, u, v):
    return int((np.asarray(X, dtype=np.int64) ^ np.outer(u, v)).sum())


def best_rank_one_cost(X, v_fixed=None):
    """Minimum of h(X ⊕ uvᵀ) over all u and all v (or the given v)."""
    X = np.asarray(X, dtype=np.int64)
    vs = all_vectors(X.shape[1]) if v_fixed is None else [np.asarray(v_fixed)]
    best = None
    for v in vs:
        # for a fixed v the best u is a per-row majority
        overlap = X @ v
        u = (2 * overlap > v.sum()).astype(np.int64)
        cost = rank_one_cost(X, u, v)
        best = cost if best is None else min(best, cost)
    return best


def planted(rng, m, n, p, coeff_weight, noise=0.0):
    D = random_dense(rng, m, p)
    A = np.zeros((p, n), dtype=np.uint8)
    for j in range(n):
        A[rng.choice(p, size=coeff_weight, replace=False), j] = 1
    X = naive_mod2_matmul(D, A) ^ (rng.random((m, n)) < noise)
    return X.astype(np.uint8), D, A
