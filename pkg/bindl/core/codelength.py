"""Enumerative codelengths of binary models.

A binary string of length n and weight r costs ⌈log₂ n⌉ bits for its weight
plus ⌈log₂ C(n, r)⌉ bits for its index among the strings of that weight. A model
(D, A, E) codes every row of E, every column of D and every row of A separately.
"""
import math
from dataclasses import asdict, dataclass
from functools import lru_cache

from scipy.special import gammaln

# Binomials up to this length are evaluated with exact integers
EXACT_LENGTH = 64

# Log-binomials closer than this to an integer are re-evaluated exactly
CEILING_GUARD = 1e-6

_LN2 = math.log(2.0)


def _ceil_log2(value):
    return (int(value) - 1).bit_length()


def _ceil_log2_binomial(n, r):
    r = min(r, n - r)
    if r == 0:
        return 0
    if n <= EXACT_LENGTH:
        return _ceil_log2(math.comb(n, r))

    bits = (gammaln(n + 1) - gammaln(r + 1) - gammaln(n - r + 1)) / _LN2
    if abs(bits - round(bits)) < CEILING_GUARD:
        return _ceil_log2(math.comb(n, r))
    return int(math.ceil(bits))


@lru_cache(maxsize=None)
def enum_codelength(n, r):
    """Bits to code a length-``n`` binary string of weight ``r``."""
    n, r = int(n), int(r)
    if n < 1:
        raise ValueError('n must be >= 1')
    if not 0 <= r <= n:
        raise ValueError('weight {} out of range for length {}'.format(r, n))
    return _ceil_log2(n) + _ceil_log2_binomial(n, r)


def _sum_codelengths(length, weights):
    if length == 0:
        return 0
    return sum(enum_codelength(length, w) for w in weights)


@dataclass(frozen=True)
class CodelengthReport:
    L_D: int
    L_A: int
    L_E: int
    n: int

    @property
    def total(self):
        return self.L_D + self.L_A + self.L_E

    @property
    def bits_per_sample(self):
        return self.total / self.n if self.n else 0.0

    def as_dict(self):
        report = asdict(self)
        report.pop('n')
        report.update(total=self.total, bits_per_sample=self.bits_per_sample)
        return report


def model_codelength(D, A, E):
    """Codelength of (D, A, E): rows of E and A over n, columns of D over m."""
    return CodelengthReport(
        L_D=_sum_codelengths(D.rows, D.col_weights()),
        L_A=_sum_codelengths(A.cols, A.row_weights()),
        L_E=_sum_codelengths(E.cols, E.row_weights()),
        n=E.cols,
    )


def baseline_codelength(X):
    """Codelength of the empty model, where the residual is X itself."""
    return CodelengthReport(L_D=0, L_A=0, L_E=_sum_codelengths(X.cols, X.row_weights()), n=X.cols)
