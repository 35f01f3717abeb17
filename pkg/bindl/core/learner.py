import time
from dataclasses import dataclass, field

import numpy as np

from bindl.core import constants
from bindl.core.bindl_logger import LOGGER
from bindl.core.bitmat import BinMatrix, DimensionError, changed_bits, residual
from bindl.core.codelength import model_codelength
from bindl.core.encoder import EncodeParams, encode_all
from bindl.core.method import create_method

INIT_METHODS = ('bernoulli', 'samples')


@dataclass(frozen=True)
class LearnParams:
    method: str = 'mob'
    encode: EncodeParams = field(default_factory=EncodeParams)
    max_outer_iter: int = constants.DEFAULT_MAX_OUTER_ITER
    seed: int = 0
    init: str = 'samples'
    theta: float = constants.DEFAULT_THETA
    replace_unused: bool = False

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError('theta must lie in (0, 1)')
        if self.max_outer_iter < 1:
            raise ValueError('max_outer_iter must be >= 1')
        if self.init not in INIT_METHODS:
            raise ValueError('init must be one of {}'.format(', '.join(INIT_METHODS)))


@dataclass
class Model:
    D: BinMatrix
    A: BinMatrix
    E: BinMatrix
    residual_weight: int
    outer_iters: int
    method: str = ''
    seed: int = 0
    converged: bool = False
    history: list = field(default_factory=list)

    @property
    def m(self):
        return self.D.rows

    @property
    def n(self):
        return self.A.cols

    @property
    def p(self):
        return self.D.cols

    def check(self, X):
        assert self.E == residual(X, self.D, self.A), 'E differs from X ⊕ D⊗A'
        assert self.residual_weight == self.E.weight(), 'cached residual weight is stale'


def init_bernoulli(m, p, theta, seed):
    """m x p dictionary with i.i.d. Bernoulli(theta) bits."""
    if not 0.0 < theta < 1.0:
        raise ValueError('theta must lie in (0, 1)')
    rng = np.random.default_rng(seed)
    return BinMatrix.from_dense(rng.random((m, p)) < theta)


def init_samples(X, p, seed):
    """Dictionary made of p distinct columns of X drawn uniformly."""
    if p > X.cols:
        raise ValueError('cannot draw {} atoms from {} samples'.format(p, X.cols))
    rng = np.random.default_rng(seed)
    picked = rng.choice(X.cols, size=p, replace=False)
    return BinMatrix(X.rows, p, X.col_words[picked])


def initial_dictionary(X, p, params):
    if p < 1:
        raise ValueError('p must be ≥ 1')
    if params.init == 'bernoulli':
        return init_bernoulli(X.rows, p, params.theta, params.seed)
    return init_samples(X, p, params.seed)


def replace_unused_atoms(D, A, E, rng, previous=None):
    """Swap atoms nobody uses for residual columns drawn from ``rng``.

    With ``previous`` coefficients given, only atoms that were in use there and
    lost their last sample are swapped. An atom that stays unused keeps its
    replacement.
    """
    unused = A.row_weights() == 0
    if previous is not None:
        unused &= previous.row_weights() > 0
    unused = np.flatnonzero(unused)
    if unused.size == 0 or E.cols == 0:
        return D
    D = D.copy()
    for k in unused:
        D.set_column(k, E.column(int(rng.integers(E.cols))))
    LOGGER.debug('Replaced %s unused atoms', unused.size)
    return D


def learn(X, D0, params=LearnParams(), A0=None, callbacks=()):
    """Alternate BMP coding and dictionary updates until (D, A) stop changing."""
    if D0.rows != X.rows:
        raise DimensionError('dictionary with {} rows for samples of length {}'.format(D0.rows, X.rows))
    if A0 is not None and A0.shape != (D0.cols, X.cols):
        raise DimensionError('initial coefficients of shape {} for {} atoms and {} samples'.format(
            A0.shape, D0.cols, X.cols))

    updater = create_method(params.method)
    rng = np.random.default_rng(params.seed)

    D = D0.copy()
    A = A0.copy() if A0 is not None else BinMatrix(D.cols, X.cols)
    used = A0
    E = residual(X, D, A)
    history = []
    converged = False

    for callback in callbacks:
        callback.on_learn_begin(params)

    for iteration in range(1, params.max_outer_iter + 1):
        start = time.perf_counter()
        D_prev, A_prev, E_prev = D, A, E

        A, E = encode_all(X, D, A, params.encode)
        coded_weight = E.weight()
        D, A, E = updater.update(X, D, A, E)
        if params.replace_unused:
            D = replace_unused_atoms(D, A, E, rng, previous=used)
        used = A

        record = {
            'iter': iteration,
            'residual_weight': E.weight(),
            'changed_bits_D': changed_bits(D_prev, D),
            'changed_bits_A': changed_bits(A_prev, A),
            'seconds': time.perf_counter() - start,
            'changed_bits_E': changed_bits(E_prev, E),
            'total_bits': model_codelength(D, A, E).total,
        }
        history.append(record)

        if constants.DEBUG:
            assert coded_weight <= E_prev.weight(), 'coding step increased h(E)'
            assert record['residual_weight'] <= coded_weight, 'dictionary step increased h(E)'
            assert E == residual(X, D, A), 'E differs from X ⊕ D⊗A'

        LOGGER.info('Iteration %s: h(E)=%s, changed bits D=%s A=%s', iteration,
                    record['residual_weight'], record['changed_bits_D'], record['changed_bits_A'])
        for callback in callbacks:
            callback.on_iteration_end(iteration, record)

        if record['changed_bits_D'] == 0 and record['changed_bits_A'] == 0:
            converged = True
            break

    if not converged:
        LOGGER.warning('Stopped after max_outer_iter=%s iterations without convergence', params.max_outer_iter)

    model = Model(D=D, A=A, E=E, residual_weight=E.weight(), outer_iters=len(history),
                  method=params.method, seed=params.seed, converged=converged, history=history)

    for callback in callbacks:
        callback.on_learn_end(model)
    return model
