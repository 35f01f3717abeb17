"""Proximus rank-one approximation of a binary matrix.

Alternates majority updates of ``u`` given ``v`` and of ``v`` given ``u`` until
the outer product stops changing. Each half-step is the global minimiser of
h(X ⊕ uvᵀ) for the other factor held fixed, so the cost never increases and the
fixed point is optimal against any single-bit change of u or v.
"""
import numpy as np

from bindl.core.bindl_logger import LOGGER
from bindl.core.bitmat import BinMatrix, DimensionError, PackedBits, pack_rows, popcount


def _majority(words, vector):
    """1 where the row of ``words`` overlaps ``vector`` on more than half its weight."""
    overlap = popcount(words & vector[None, :]).sum(axis=1, dtype=np.int64)
    total = int(popcount(vector).sum(dtype=np.int64))
    return pack_rows((2 * overlap > total)[None, :])[0]


def _same_outer_product(u, v, u_next, v_next):
    zero = not u.any() or not v.any()
    zero_next = not u_next.any() or not v_next.any()
    if zero or zero_next:
        return zero and zero_next
    return np.array_equal(u, u_next) and np.array_equal(v, v_next)


def proximus_rank1(X, u0, v0, max_rounds=None):
    """Local rank-one fit X ≈ uvᵀ started from (u0, v0); returns (u, v)."""
    if u0.len != X.rows or v0.len != X.cols:
        raise DimensionError('factors of lengths ({}, {}) for a {}x{} matrix'.format(
            u0.len, v0.len, X.rows, X.cols))

    rows, cols = X.row_words, X.col_words
    u, v = u0.words.copy(), v0.words.copy()
    max_rounds = max(1, X.rows + X.cols) if max_rounds is None else max_rounds

    for _ in range(max_rounds):
        u_next = _majority(rows, v)
        v_next = _majority(cols, u_next)
        if _same_outer_product(u, v, u_next, v_next):
            return PackedBits(X.rows, u_next), PackedBits(X.cols, v_next)
        u, v = u_next, v_next

    LOGGER.warning('Proximus stopped after %s rounds without reaching a fixed point', max_rounds)
    return PackedBits(X.rows, u), PackedBits(X.cols, v)


def rank_one_residual(X, u, v):
    """X ⊕ uvᵀ."""
    if u.len != X.rows or v.len != X.cols:
        raise DimensionError('factors of lengths ({}, {}) for a {}x{} matrix'.format(
            u.len, v.len, X.rows, X.cols))
    outer = u.words[None, :] * v.to_bits()[:, None].astype(np.uint64)
    return BinMatrix(X.rows, X.cols, X.col_words ^ outer)
