"""Binary Matching Pursuit.

A sample ``x`` is encoded against a dictionary ``D`` by greedily toggling the
coefficient of the atom with the best association accuracy ``|g_k| / h(D_k)``
while the residual weight keeps dropping. The correlation vector ``g = Dᵀr`` is
maintained incrementally: toggling atom ``k`` flips the residual on the support
of ``D_k``, so bits of ``D_k`` outside ``r`` add one to every atom covering them
and bits inside ``r`` subtract one. Modulo 2 each increment equals column ``k``
of the GF(2) Gram matrix.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from joblib import Parallel, delayed

from bindl.core import constants
from bindl.core.bindl_logger import LOGGER
from bindl.core.bitmat import (BinMatrix, DimensionError, PackedBits, correlations, mod2_gram,
                               mod2_matvec, pack_rows, popcount, weight)


@dataclass(frozen=True)
class EncodeParams:
    h_max: Optional[int] = None
    w_max: int = constants.DEFAULT_W_MAX
    n_jobs: int = 1

    def __post_init__(self):
        if self.h_max is not None and self.h_max < 0:
            raise ValueError('h_max must be >= 0')
        if self.w_max < 0:
            raise ValueError('w_max must be >= 0')
        if self.n_jobs == 0:
            raise ValueError('n_jobs must be non-zero')

    def max_toggles(self, num_atoms):
        """Toggle cap for a dictionary of ``num_atoms`` atoms; defaults to p."""
        return num_atoms if self.h_max is None else self.h_max


@dataclass
class EncodeState:
    a: PackedBits
    r: PackedBits
    g: np.ndarray

    @classmethod
    def start(cls, x, D, a0):
        r = PackedBits(x.len, x.words ^ mod2_matvec(D, a0).words)
        return cls(a=a0.copy(), r=r, g=correlations(D, r))

    def check(self, x, D):
        expected = PackedBits(x.len, x.words ^ mod2_matvec(D, self.a).words)
        assert self.r == expected, 'residual drifted from x ⊕ D⊗a'
        assert np.array_equal(self.g, correlations(D, self.r)), 'correlations drifted from Dᵀr'


def _scores(g, atom_weights):
    usable = atom_weights > 0
    denom = np.where(usable, atom_weights, 1).astype(np.float64)
    return np.where(usable, np.abs(g) / denom, -1.0)


def _correlation_step(dictionary_words, atom_words, residual_words):
    """Change of Dᵀr when the residual is XORed with the given atoms (one per row)."""
    gained = atom_words & ~residual_words
    lost = atom_words & residual_words
    plus = popcount(gained[:, None, :] & dictionary_words[None, :, :]).sum(axis=2, dtype=np.int64)
    minus = popcount(lost[:, None, :] & dictionary_words[None, :, :]).sum(axis=2, dtype=np.int64)
    return plus - minus


def _check_conformable(x_rows, D, a_len, G=None, atom_weights=None):
    if x_rows != D.rows:
        raise DimensionError('sample of length {} against a dictionary with {} rows'.format(x_rows, D.rows))
    if a_len != D.cols:
        raise DimensionError('coefficients of length {} for {} atoms'.format(a_len, D.cols))
    if G is not None and np.shape(G) != (D.cols, D.cols):
        raise DimensionError('Gram matrix of shape {} for {} atoms'.format(np.shape(G), D.cols))
    if atom_weights is not None and np.shape(atom_weights) != (D.cols,):
        raise DimensionError('{} atom weights for {} atoms'.format(np.shape(atom_weights), D.cols))


def bmp_encode(x, D, G, atom_weights, a0, params=EncodeParams(), on_toggle=None):
    """Encode one sample; returns the coefficient vector.

    ``on_toggle(state)`` is called after every committed toggle.
    """
    _check_conformable(x.len, D, a0.len, G, atom_weights)
    atom_weights = np.asarray(atom_weights, dtype=np.int64)
    if constants.DEBUG:
        assert np.array_equal(G, mod2_gram(D)), 'G is not the GF(2) Gram matrix of D'
        assert np.array_equal(atom_weights, D.col_weights()), 'atom weights do not match D'

    state = EncodeState.start(x, D, a0)
    residual_weight = weight(state.r)
    h_max = params.max_toggles(D.cols)
    t = 0

    while residual_weight >= params.w_max and t < h_max:
        scores = _scores(state.g, atom_weights)
        k = int(np.argmax(scores))
        if scores[k] < 0 or state.g[k] == 0:
            break

        atom = D.col_words[k]
        candidate = state.r.words ^ atom
        candidate_weight = int(popcount(candidate).sum(dtype=np.int64))
        if candidate_weight >= residual_weight:
            break

        delta = _correlation_step(D.col_words, atom[None, :], state.r.words[None, :])[0]
        if constants.DEBUG:
            assert np.all((delta - G[:, k]) % 2 == 0), 'correlation step disagrees with the Gram parity'
        state.g += delta
        state.a.toggle(k)
        state.r = PackedBits(state.r.len, candidate)
        residual_weight = candidate_weight
        t += 1

        if on_toggle is not None:
            on_toggle(state)

    return state.a


def _encode_block(x_words, a_bits, D, atom_weights, params, G=None):
    """Run BMP in lock-step over a block of samples; rows of the inputs are samples.

    With ``G`` given every correlation step is checked against its Gram parity.
    """
    dictionary = D.col_words
    a = a_bits.copy()
    r = x_words.copy()
    for k in range(D.cols):
        r[a[:, k] == 1] ^= dictionary[k]

    g = popcount(r[:, None, :] & dictionary[None, :, :]).sum(axis=2, dtype=np.int64)
    h = popcount(r).sum(axis=1, dtype=np.int64)
    active = np.ones(r.shape[0], dtype=bool)

    for _ in range(params.max_toggles(D.cols)):
        active &= h >= params.w_max
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break

        scores = _scores(g[idx], atom_weights)
        k = scores.argmax(axis=1)
        picked = np.arange(idx.size)
        stop = (scores[picked, k] < 0) | (g[idx, k] == 0)

        candidate = r[idx] ^ dictionary[k]
        candidate_weight = popcount(candidate).sum(axis=1, dtype=np.int64)
        stop |= candidate_weight >= h[idx]
        active[idx[stop]] = False

        go = ~stop
        rows, atoms = idx[go], k[go]
        if rows.size == 0:
            break

        delta = _correlation_step(dictionary, dictionary[atoms], r[rows])
        if G is not None:
            assert np.all((delta - G[:, atoms].T) % 2 == 0), 'correlation step disagrees with the Gram parity'
        g[rows] += delta
        a[rows, atoms] ^= 1
        r[rows] = candidate[go]
        h[rows] = candidate_weight[go]

    return a, r


def encode_all(X, D, A_init, params=EncodeParams()):
    """Encode every column of X; returns (A, E) with E = X ⊕ D⊗A."""
    if A_init.shape != (D.cols, X.cols):
        raise DimensionError('initial coefficients of shape {} for {} atoms and {} samples'.format(
            A_init.shape, D.cols, X.cols))
    _check_conformable(X.rows, D, D.cols)

    if D.cols == 0 or X.cols == 0:
        return BinMatrix(D.cols, X.cols), X.copy()

    atom_weights = D.col_weights()
    G = mod2_gram(D) if constants.DEBUG else None
    a_bits = A_init.to_dense().T
    starts = range(0, X.cols, constants.ENCODE_BLOCK_SIZE)
    jobs = (delayed(_encode_block)(X.col_words[s:s + constants.ENCODE_BLOCK_SIZE],
                                   a_bits[s:s + constants.ENCODE_BLOCK_SIZE],
                                   D, atom_weights, params, G)
            for s in starts)

    if params.n_jobs == 1:
        results = [fn(*args, **kwargs) for fn, args, kwargs in jobs]
    else:
        results = Parallel(n_jobs=params.n_jobs, prefer='threads')(jobs)

    a_bits = np.vstack([a for a, _ in results])
    r_words = np.vstack([r for _, r in results])
    LOGGER.debug('Encoded %s samples against %s atoms', X.cols, D.cols)

    return BinMatrix(D.cols, X.cols, pack_rows(a_bits)), BinMatrix(X.rows, X.cols, r_words)
