"""Bit-packed binary vectors and matrices.

Bits are stored MSB-first in uint64 words: bit ``i`` of a vector lives in word
``i // 64`` at position ``63 - i % 64`` counted from the least significant bit.
Pad bits past the logical length are always zero. A ``BinMatrix`` keeps its
columns packed (one vector per sample) and derives the row-packed view lazily.
"""
import numpy as np

from bindl.core import constants
from bindl.core.constants import WORD_BITS

_ONE = np.uint64(1)


class DimensionError(ValueError):
    """Operands have incompatible lengths or shapes."""


def num_words(length):
    return (int(length) + WORD_BITS - 1) // WORD_BITS


if hasattr(np, 'bitwise_count'):
    def popcount(words):
        return np.bitwise_count(words)
else:
    _S55 = np.uint64(0x5555555555555555)
    _S33 = np.uint64(0x3333333333333333)
    _S0F = np.uint64(0x0F0F0F0F0F0F0F0F)
    _S01 = np.uint64(0x0101010101010101)

    def popcount(words):
        # SWAR bit count for numpy releases without bitwise_count
        arr = np.asarray(words, dtype=np.uint64)
        arr = arr - ((arr >> _ONE) & _S55)
        arr = (arr & _S33) + ((arr >> np.uint64(2)) & _S33)
        arr = (arr + (arr >> np.uint64(4))) & _S0F
        return (arr * _S01) >> np.uint64(56)


def pack_rows(bits):
    """Pack a 2-D array of 0/1 values row by row into uint64 words."""
    bits = np.asarray(bits)
    if bits.ndim != 2:
        raise DimensionError('expected a 2-D bit array, got {} dimensions'.format(bits.ndim))
    count, length = bits.shape
    words = num_words(length)
    if count == 0 or length == 0:
        return np.zeros((count, words), dtype=np.uint64)

    packed = np.packbits(bits != 0, axis=1)
    buf = np.zeros((count, words * 8), dtype=np.uint8)
    buf[:, :packed.shape[1]] = packed
    return buf.view('>u8').astype(np.uint64)


def unpack_rows(words, length):
    """Inverse of :func:`pack_rows`; returns a uint8 array of shape (rows, length)."""
    words = np.asarray(words, dtype=np.uint64)
    count = words.shape[0]
    if count == 0 or length == 0:
        return np.zeros((count, length), dtype=np.uint8)
    raw = words.astype('>u8').view(np.uint8).reshape(count, -1)
    return np.unpackbits(raw, axis=1, count=length)


def _pad_mask(length):
    rem = length % WORD_BITS
    if rem == 0:
        return np.uint64(0)
    return np.uint64((1 << (WORD_BITS - rem)) - 1)


def _bit_position(index):
    return index // WORD_BITS, np.uint64(WORD_BITS - 1 - index % WORD_BITS)


class PackedBits:
    """Fixed-length bit vector stored in machine words."""

    __slots__ = ('_len', '_words')

    def __init__(self, length, words=None):
        if length < 0:
            raise ValueError('length must be >= 0')
        self._len = int(length)
        expected = num_words(self._len)

        if words is None:
            self._words = np.zeros(expected, dtype=np.uint64)
        else:
            words = np.array(words, dtype=np.uint64).reshape(-1)
            if words.shape[0] != expected:
                raise DimensionError('{} bits need {} words, got {}'.format(self._len, expected, words.shape[0]))
            self._words = words
        self._check_pad()

    @classmethod
    def zeros(cls, length):
        return cls(length)

    @classmethod
    def ones(cls, length):
        return cls.from_bits(np.ones(length, dtype=np.uint8))

    @classmethod
    def from_bits(cls, bits):
        bits = np.asarray(bits).reshape(-1)
        return cls(bits.shape[0], pack_rows(bits[None, :])[0])

    @classmethod
    def from_string(cls, text):
        return cls.from_bits([int(c) for c in text])

    @property
    def len(self):
        return self._len

    @property
    def words(self):
        return self._words

    def __len__(self):
        return self._len

    def _check_index(self, index):
        if not 0 <= index < self._len:
            raise IndexError('bit {} out of range for length {}'.format(index, self._len))

    def __getitem__(self, index):
        self._check_index(index)
        word, shift = _bit_position(index)
        return int((self._words[word] >> shift) & _ONE)

    def set(self, index, value):
        self._check_index(index)
        word, shift = _bit_position(index)
        if value:
            self._words[word] |= _ONE << shift
        else:
            self._words[word] &= ~(_ONE << shift)
        return self

    def toggle(self, index):
        self._check_index(index)
        word, shift = _bit_position(index)
        self._words[word] ^= _ONE << shift
        return self

    def support(self):
        return np.flatnonzero(self.to_bits())

    def to_bits(self):
        return unpack_rows(self._words[None, :], self._len)[0]

    def copy(self):
        return PackedBits(self._len, self._words.copy())

    def _check_pad(self):
        if self._len % WORD_BITS and self._words[-1] & _pad_mask(self._len):
            raise ValueError('pad bits beyond length {} are set'.format(self._len))

    def __eq__(self, other):
        if not isinstance(other, PackedBits):
            return NotImplemented
        return self._len == other._len and np.array_equal(self._words, other._words)

    __hash__ = None

    def __repr__(self):
        return "PackedBits('{}')".format(''.join(str(b) for b in self.to_bits()))


def _check_lengths(x, y):
    if x.len != y.len:
        raise DimensionError('length mismatch: {} != {}'.format(x.len, y.len))


def weight(v):
    """Hamming weight h(v)."""
    return int(popcount(v.words).sum(dtype=np.int64))


def xor_into(dst, src):
    """dst <- dst XOR src, in place; returns dst."""
    _check_lengths(dst, src)
    np.bitwise_xor(dst.words, src.words, out=dst.words)
    dst._check_pad()
    return dst


def bool_dot(x, y, chunk=16):
    """Boolean inner product: 1 iff the supports of x and y overlap."""
    _check_lengths(x, y)
    xw, yw = x.words, y.words
    for start in range(0, xw.shape[0], chunk):
        if np.any(xw[start:start + chunk] & yw[start:start + chunk]):
            return 1
    return 0


def int_dot(x, y):
    """Integer inner product of two 0/1 vectors: h(x AND y)."""
    _check_lengths(x, y)
    return int(popcount(x.words & y.words).sum(dtype=np.int64))


def mod2_dot(x, y):
    """Inner product over GF(2)."""
    return int_dot(x, y) & 1


class BinMatrix:
    """Binary m x n matrix, column-packed, with a lazily derived row-packed view.

    Column words are the source of truth. Any mutation through the methods below
    drops the row view; weight caches are patched in place for single-column
    edits and dropped otherwise.
    """

    def __init__(self, rows, cols, col_words=None):
        if rows < 0 or cols < 0:
            raise ValueError('matrix dimensions must be >= 0')
        self._rows = int(rows)
        self._cols = int(cols)
        words = num_words(self._rows)

        if col_words is None:
            col_words = np.zeros((self._cols, words), dtype=np.uint64)
        else:
            col_words = np.array(col_words, dtype=np.uint64)
            if col_words.shape != (self._cols, words):
                raise DimensionError('column words of shape {} do not fit a {}x{} matrix'.format(
                    col_words.shape, self._rows, self._cols))
            if self._cols and words and np.any(col_words[:, -1] & _pad_mask(self._rows)):
                raise ValueError('pad bits beyond row {} are set'.format(self._rows))

        self._col_words = col_words
        self._row_words = None
        self._col_weights = None
        self._row_weights = None

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols)

    @classmethod
    def from_dense(cls, bits):
        bits = np.asarray(bits)
        if bits.ndim != 2:
            raise DimensionError('expected a 2-D bit array')
        rows, cols = bits.shape
        return cls(rows, cols, pack_rows(bits.T))

    @classmethod
    def from_columns(cls, columns, rows):
        columns = list(columns)
        for column in columns:
            if column.len != rows:
                raise DimensionError('column of length {} in a matrix with {} rows'.format(column.len, rows))
        words = np.array([c.words for c in columns], dtype=np.uint64).reshape(len(columns), num_words(rows))
        return cls(rows, len(columns), words)

    @property
    def rows(self):
        return self._rows

    @property
    def cols(self):
        return self._cols

    @property
    def shape(self):
        return self._rows, self._cols

    @property
    def col_words(self):
        """Column-packed words, shape (cols, num_words(rows)). Do not mutate directly."""
        return self._col_words

    @property
    def row_words(self):
        """Row-packed words, shape (rows, num_words(cols)); built on first use."""
        if self._row_words is None:
            self._row_words = pack_rows(self.to_dense())
        return self._row_words

    def column(self, j):
        return PackedBits(self._rows, self._col_words[j].copy())

    def row(self, i):
        return PackedBits(self._cols, self.row_words[i].copy())

    def row_bits(self, i):
        """Row ``i`` as a uint8 array, read straight from the column words."""
        if not 0 <= i < self._rows:
            raise IndexError('row {} out of range for {} rows'.format(i, self._rows))
        word, shift = _bit_position(i)
        return ((self._col_words[:, word] >> shift) & _ONE).astype(np.uint8)

    def col_weights(self):
        if self._col_weights is None:
            self._col_weights = popcount(self._col_words).sum(axis=1, dtype=np.int64)
        return self._col_weights

    def row_weights(self):
        if self._row_weights is None:
            self._row_weights = self.to_dense().sum(axis=1, dtype=np.int64)
        return self._row_weights

    def weight(self):
        return int(self.col_weights().sum())

    def to_dense(self):
        return unpack_rows(self._col_words, self._rows).T.copy()

    def _invalidate(self):
        self._row_words = None
        self._col_weights = None
        self._row_weights = None

    def set_column(self, j, value):
        if value.len != self._rows:
            raise DimensionError('column of length {} in a matrix with {} rows'.format(value.len, self._rows))
        delta = PackedBits(self._rows, self._col_words[j] ^ value.words)
        self.xor_column(j, delta)
        return self

    def xor_column(self, j, delta):
        """Column j <- column j XOR delta, patching weight caches incrementally."""
        if delta.len != self._rows:
            raise DimensionError('column of length {} in a matrix with {} rows'.format(delta.len, self._rows))
        if self._row_weights is not None:
            old_bits = unpack_rows(self._col_words[j:j + 1], self._rows)[0].astype(np.int64)
        self._col_words[j] ^= delta.words
        self._row_words = None
        if self._col_weights is not None:
            self._col_weights[j] = popcount(self._col_words[j]).sum(dtype=np.int64)
        if self._row_weights is not None:
            new_bits = unpack_rows(self._col_words[j:j + 1], self._rows)[0].astype(np.int64)
            self._row_weights += new_bits - old_bits
        if constants.DEBUG:
            self.check_caches()
        return self

    def set_col_words(self, col_words):
        col_words = np.array(col_words, dtype=np.uint64)
        if col_words.shape != self._col_words.shape:
            raise DimensionError('expected column words of shape {}, got {}'.format(
                self._col_words.shape, col_words.shape))
        self._col_words = col_words
        self._invalidate()
        return self

    def set_columns(self, indices, words):
        """Overwrite the columns at ``indices`` with packed ``words``."""
        indices = np.asarray(indices, dtype=np.intp)
        words = np.asarray(words, dtype=np.uint64)
        if words.shape != (indices.shape[0], self._col_words.shape[1]):
            raise DimensionError('expected column words of shape {}, got {}'.format(
                (indices.shape[0], self._col_words.shape[1]), words.shape))
        self._col_words[indices] = words
        self._invalidate()
        return self

    def set_row_bits(self, i, bits):
        """Overwrite row ``i`` with a length-``cols`` 0/1 array."""
        bits = np.asarray(bits).reshape(-1)
        if bits.shape[0] != self._cols:
            raise DimensionError('row of length {} in a matrix with {} columns'.format(bits.shape[0], self._cols))
        word, shift = _bit_position(i)
        mask = _ONE << shift
        column = self._col_words[:, word]
        self._col_words[:, word] = (column & ~mask) | ((bits != 0).astype(np.uint64) << shift)
        self._invalidate()
        return self

    def check_caches(self):
        """Revalidate derived views and weight caches against the column words."""
        dense = self.to_dense()
        if self._row_words is not None:
            assert np.array_equal(self._row_words, pack_rows(dense)), 'row view is stale'
        if self._col_weights is not None:
            assert np.array_equal(self._col_weights, dense.sum(axis=0)), 'column weights are stale'
        if self._row_weights is not None:
            assert np.array_equal(self._row_weights, dense.sum(axis=1)), 'row weights are stale'

    def copy(self):
        return BinMatrix(self._rows, self._cols, self._col_words.copy())

    def __eq__(self, other):
        if not isinstance(other, BinMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self._col_words, other._col_words)

    __hash__ = None

    def __repr__(self):
        return 'BinMatrix({}x{}, weight={})'.format(self._rows, self._cols, self.weight())


def transpose(matrix):
    """Bitwise transpose; the row view of ``matrix`` becomes the column words of the result."""
    return BinMatrix(matrix.cols, matrix.rows, matrix.row_words.copy())


def xor(left, right):
    if left.shape != right.shape:
        raise DimensionError('shape mismatch: {} != {}'.format(left.shape, right.shape))
    return BinMatrix(left.rows, left.cols, left.col_words ^ right.col_words)


def changed_bits(before, after):
    """Number of positions where two equally shaped matrices differ."""
    return xor(before, after).weight()


def int_gram(D):
    """Standard integer Gram matrix DᵀD of the columns of D."""
    words = D.col_words
    if D.cols == 0:
        return np.zeros((0, 0), dtype=np.int64)
    return popcount(words[:, None, :] & words[None, :, :]).sum(axis=2, dtype=np.int64)


def mod2_gram(D):
    """Gram matrix of the columns of D over GF(2)."""
    return int_gram(D) & 1


def correlations(D, r):
    """Integer correlations Dᵀr of every atom with the vector r."""
    if r.len != D.rows:
        raise DimensionError('vector of length {} against {} rows'.format(r.len, D.rows))
    return popcount(D.col_words & r.words[None, :]).sum(axis=1, dtype=np.int64)


def mod2_matvec(D, a):
    """D ⊗ a: XOR of the columns of D selected by a."""
    if a.len != D.cols:
        raise DimensionError('coefficient vector of length {} for {} atoms'.format(a.len, D.cols))
    selected = a.support()
    if selected.shape[0] == 0:
        return PackedBits(D.rows)
    return PackedBits(D.rows, np.bitwise_xor.reduce(D.col_words[selected], axis=0))


def mod2_matmul(D, A):
    """D ⊗ A over GF(2), accumulated one atom at a time."""
    if D.cols != A.rows:
        raise DimensionError('cannot multiply {}x{} by {}x{}'.format(D.rows, D.cols, A.rows, A.cols))
    out = np.zeros((A.cols, num_words(D.rows)), dtype=np.uint64)
    for k in range(D.cols):
        users = A.row_bits(k).astype(bool)
        out[users] ^= D.col_words[k]
    return BinMatrix(D.rows, A.cols, out)


def append_column(matrix, column):
    if column.len != matrix.rows:
        raise DimensionError('column of length {} in a matrix with {} rows'.format(column.len, matrix.rows))
    words = np.vstack([matrix.col_words, column.words[None, :]])
    return BinMatrix(matrix.rows, matrix.cols + 1, words)


def append_row(matrix, bits):
    bits = np.asarray(bits).reshape(-1)
    if bits.shape[0] != matrix.cols:
        raise DimensionError('row of length {} in a matrix with {} columns'.format(bits.shape[0], matrix.cols))
    dense = np.vstack([matrix.to_dense(), (bits != 0).astype(np.uint8)[None, :]])
    return BinMatrix.from_dense(dense)


def residual(X, D, A):
    """E = X ⊕ D⊗A."""
    if X.shape != (D.rows, A.cols):
        raise DimensionError('data of shape {} against a {}x{} reconstruction'.format(X.shape, D.rows, A.cols))
    return xor(X, mod2_matmul(D, A))
