import numpy as np

from bindl.core import constants
from bindl.core.bindl_logger import LOGGER
from bindl.core.bitmat import BinMatrix, PackedBits, popcount, residual
from bindl.methods.kprox.proximus import proximus_rank1, rank_one_residual
from bindl.methods.mob.update import usage_set


def kprox_update_atom(X, D, A, E, r):
    """Refit atom ``r`` and its coefficient row on the usage set J.

    The residual restricted to J with the atom's contribution restored is fitted
    by a rank-one tile started at the current atom and coefficients. The tile is
    kept only if it does not increase the residual weight on J. D, A and E are
    updated in place and returned. Samples outside J never gain the atom.
    """
    if not 0 <= r < D.cols:
        raise IndexError('atom {} out of range for {} atoms'.format(r, D.cols))
    users = usage_set(A, r)
    if users.size == 0:
        return D, A, E

    atom = D.column(r)
    restored = BinMatrix(E.rows, users.size, E.col_words[users] ^ atom.words)
    u, v = proximus_rank1(restored, atom, PackedBits.ones(users.size))

    fitted = rank_one_residual(restored, u, v)
    incumbent = int(popcount(E.col_words[users]).sum(dtype=np.int64))
    candidate = fitted.weight()
    if candidate > incumbent:
        LOGGER.debug('Rejected rank-one refit of atom %s (%s > %s)', r, candidate, incumbent)
        return D, A, E

    coefficients = A.row_bits(r)
    coefficients[users] = v.to_bits()
    A.set_row_bits(r, coefficients)
    D.set_column(r, u)
    E.set_columns(users, fitted.col_words)

    if constants.DEBUG:
        assert E == residual(X, D, A), 'K-PROX broke E = X ⊕ D⊗A at atom {}'.format(r)
    return D, A, E


def kprox_update(D, A, E, X):
    """Sweep every atom once; returns new (D, A, E) without touching the inputs."""
    D, A, E = D.copy(), A.copy(), E.copy()
    before = E.weight()

    for r in range(D.cols):
        D, A, E = kprox_update_atom(X, D, A, E, r)

    after = E.weight()
    if constants.DEBUG:
        assert after <= before, 'K-PROX increased h(E)'
    LOGGER.debug('K-PROX sweep over %s atoms: h(E) %s -> %s', D.cols, before, after)
    return D, A, E
