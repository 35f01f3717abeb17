import numpy as np

from bindl.core import constants
from bindl.core.bindl_logger import LOGGER
from bindl.core.bitmat import PackedBits, unpack_rows


def usage_set(A, r):
    """Indices of the samples whose coefficients use atom ``r``."""
    if not 0 <= r < A.rows:
        raise IndexError('atom {} out of range for {} atoms'.format(r, A.rows))
    return np.flatnonzero(A.row_bits(r))


def mob_update_atom(E, D, A, r):
    """Refit atom ``r`` by majority vote; updates D and E in place and returns them.

    With the atom's contribution removed from the columns in its usage set J,
    bit i of the new atom is set iff more than half of those columns have bit i
    set. Ties keep the bit at 0.
    """
    if not 0 <= r < D.cols:
        raise IndexError('atom {} out of range for {} atoms'.format(r, D.cols))
    users = usage_set(A, r)
    if users.size == 0:
        return D, E

    restored = E.col_words[users] ^ D.col_words[r]
    counts = unpack_rows(restored, E.rows).sum(axis=0, dtype=np.int64)
    atom = PackedBits.from_bits(2 * counts > users.size)

    E.set_columns(users, restored ^ atom.words)
    D.set_column(r, atom)
    return D, E


def mob_update(D, A, E):
    """Sweep every atom once; returns new (D, E) without touching the inputs."""
    D, E = D.copy(), E.copy()
    before = E.weight() if constants.DEBUG else None

    for r in range(D.cols):
        D, E = mob_update_atom(E, D, A, r)
        if constants.DEBUG:
            after = E.weight()
            assert after <= before, 'MOB increased h(E) at atom {}'.format(r)
            before = after

    LOGGER.debug('MOB sweep over %s atoms', D.cols)
    return D, E
