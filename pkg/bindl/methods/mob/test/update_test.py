import numpy as np
import pytest

from bindl.core.bitmat import BinMatrix, residual
from bindl.core.method import create_method
from bindl.core.test.helpers import brute_force_atom, random_dense, random_matrix
from bindl.methods.mob.update import mob_update, mob_update_atom, usage_set


def _model(rng, m, p, n):
    X = random_matrix(rng, m, n)
    D = random_matrix(rng, m, p)
    A = random_matrix(rng, p, n, density=0.4)
    return X, D, A, residual(X, D, A)


def test_usage_set():
    A = BinMatrix.from_dense([[1, 0, 1], [0, 0, 0]])
    assert list(usage_set(A, 0)) == [0, 2]
    assert usage_set(A, 1).size == 0


def test_majority_example():
    # atom 0 used by all three samples, nothing else in the model
    X = BinMatrix.from_dense([[1, 1, 0], [1, 0, 0], [0, 0, 0]])
    D = BinMatrix.zeros(3, 1)
    A = BinMatrix.from_dense([[1, 1, 1]])
    E = residual(X, D, A)

    D, E = mob_update_atom(E, D, A, 0)
    assert np.array_equal(D.to_dense()[:, 0], [1, 0, 0])
    assert E == residual(X, D, A)


def test_tie_keeps_bit_at_zero():
    X = BinMatrix.from_dense([[1, 0]])
    D = BinMatrix.from_dense([[1]])
    A = BinMatrix.from_dense([[1, 1]])
    E = residual(X, D, A)

    D, E = mob_update_atom(E, D, A, 0)
    assert D.to_dense()[0, 0] == 0


def test_unused_atom_is_left_alone():
    X = BinMatrix.from_dense([[1, 1]])
    D = BinMatrix.from_dense([[1]])
    A = BinMatrix.zeros(1, 2)
    E = residual(X, D, A)

    D2, E2 = mob_update_atom(E.copy(), D.copy(), A, 0)
    assert D2 == D
    assert E2 == E


@pytest.mark.parametrize('seed', range(300))
def test_atom_update_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    m, n, p = rng.integers(1, 9), rng.integers(1, 9), rng.integers(1, 4)
    X, D, A, E = _model(rng, m, p, n)
    r = int(rng.integers(p))
    users = usage_set(A, r)

    restored = E.to_dense()[:, users] ^ D.to_dense()[:, [r]]
    D, E = mob_update_atom(E, D, A, r)

    if users.size:
        best_atom, best_cost = brute_force_atom(restored)
        assert np.array_equal(D.to_dense()[:, r], best_atom)
        assert int(E.to_dense()[:, users].sum()) == best_cost
    assert E == residual(X, D, A)


@pytest.mark.parametrize('seed', range(100))
def test_sweep_never_increases_residual(seed):
    rng = np.random.default_rng(seed)
    X, D, A, E = _model(rng, int(rng.integers(1, 40)), int(rng.integers(1, 8)), int(rng.integers(1, 40)))

    D2, E2 = mob_update(D, A, E)

    assert E2.weight() <= E.weight()
    assert E2 == residual(X, D2, A)


def test_sweep_does_not_touch_inputs():
    rng = np.random.default_rng(1)
    X, D, A, E = _model(rng, 10, 3, 12)
    D_before, E_before = D.copy(), E.copy()
    mob_update(D, A, E)
    assert D == D_before
    assert E == E_before


def test_out_of_range_atom():
    with pytest.raises(IndexError):
        mob_update_atom(BinMatrix(2, 2), BinMatrix(2, 1), BinMatrix(1, 2), 1)


def test_updater_is_registered():
    updater = create_method('mob')
    rng = np.random.default_rng(2)
    X = BinMatrix.from_dense(random_dense(rng, 6, 5))
    D, A = random_matrix(rng, 6, 2), random_matrix(rng, 2, 5)
    D2, A2, E2 = updater.update(X, D, A, residual(X, D, A))
    assert A2 == A
    assert E2 == residual(X, D2, A)
