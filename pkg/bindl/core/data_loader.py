from abc import ABC, abstractmethod
from pathlib import Path

import numpy as np
from PIL import Image

from bindl.core import constants
from bindl.core.bindl_logger import LOGGER
from bindl.core.bitmat import BinMatrix, DimensionError, pack_rows, unpack_rows
from bindl.core.pbm import load_pbm


class DataLoader(ABC):
    """Base class for data loaders

    This defines the interface that new data loaders must adhere to: a loader
    turns some source into an m x n sample matrix, one sample per column.
    """

    @property
    @abstractmethod
    def sample_shape(self):
        pass

    @abstractmethod
    def to_matrix(self):
        pass


def load_gray(path):
    """Read any Pillow-readable image (PGM included) as a uint8 grayscale array."""
    with Image.open(path) as image:
        return np.asarray(image.convert('L'), dtype=np.uint8)


def binarize(gray, threshold):
    """Bit (i, j) is 1 iff gray[i, j] >= threshold."""
    gray = np.asarray(gray)
    if gray.ndim != 2:
        raise DimensionError('expected a 2-D image, got {} dimensions'.format(gray.ndim))
    return BinMatrix.from_dense(gray >= threshold)


def _check_block(bh, bw):
    if bh < 1 or bw < 1:
        raise ValueError('block size must be >= 1, got {}x{}'.format(bh, bw))


def image_to_blocks(img, bh, bw):
    """Cut ``img`` into non-overlapping bh x bw blocks, one sample column each.

    Blocks are taken in raster order and each block is vectorised column by
    column, so pixel (r, c) of a block is bit ``c * bh + r`` of its sample.
    Trailing rows and columns that do not fill a whole block are dropped.
    """
    _check_block(bh, bw)
    if bh > img.rows or bw > img.cols:
        raise DimensionError('block {}x{} larger than image {}x{}'.format(bh, bw, img.rows, img.cols))

    grid_rows, grid_cols = img.rows // bh, img.cols // bw
    dense = img.to_dense()[:grid_rows * bh, :grid_cols * bw]
    blocks = dense.reshape(grid_rows, bh, grid_cols, bw).transpose(0, 2, 3, 1)
    samples = blocks.reshape(grid_rows * grid_cols, bh * bw)
    return BinMatrix(bh * bw, samples.shape[0], pack_rows(samples))


def blocks_to_image(X, bh, bw, grid_cols):
    """Inverse of :func:`image_to_blocks` for a grid ``grid_cols`` blocks wide."""
    _check_block(bh, bw)
    if X.rows != bh * bw:
        raise DimensionError('samples of length {} do not form {}x{} blocks'.format(X.rows, bh, bw))
    if grid_cols < 1 or X.cols % grid_cols:
        raise DimensionError('{} blocks do not fill a grid {} blocks wide'.format(X.cols, grid_cols))

    grid_rows = X.cols // grid_cols
    blocks = unpack_rows(X.col_words, X.rows).reshape(grid_rows, grid_cols, bw, bh)
    dense = blocks.transpose(0, 3, 1, 2).reshape(grid_rows * bh, grid_cols * bw)
    return BinMatrix.from_dense(dense)


def centre_crop(image):
    """Largest centred square of a 2-D array."""
    height, width = image.shape
    side = min(height, width)
    top, left = (height - side) // 2, (width - side) // 2
    return image[top:top + side, left:left + side]


def digits_to_samples(stack, size=constants.DIGIT_SIZE, threshold=constants.DEFAULT_THRESHOLD):
    """Grayscale digit stack (N x H x W) -> (size*size) x N sample matrix.

    Each digit is centre-cropped to a square, resampled to size x size and
    binarised; pixels are vectorised column by column like image blocks.
    """
    stack = np.asarray(stack)
    if stack.ndim != 3:
        raise DimensionError('expected an N x H x W digit stack, got {} dimensions'.format(stack.ndim))
    if size < 1:
        raise ValueError('size must be >= 1')

    samples = np.zeros((stack.shape[0], size * size), dtype=np.uint8)
    for index, digit in enumerate(stack):
        image = Image.fromarray(centre_crop(np.clip(digit, 0, 255).astype(np.uint8)))
        small = np.asarray(image.resize((size, size), Image.BILINEAR))
        samples[index] = (small >= threshold).T.reshape(-1)

    return BinMatrix(size * size, samples.shape[0], pack_rows(samples))


def synth_planted(m, n, p, coeff_weight, noise_rate, seed=0, atom_density=0.5):
    """Random planted model: returns (X, D*, A*) with X = D*⊗A* ⊕ N.

    D* has i.i.d. Bernoulli(atom_density) bits, every column of A* has exactly
    ``coeff_weight`` set bits at uniformly chosen atoms and N has i.i.d.
    Bernoulli(noise_rate) bits.
    """
    if min(m, n, p) < 1:
        raise ValueError('m, n and p must be >= 1')
    if not 0 <= coeff_weight <= p:
        raise ValueError('coeff_weight must lie in [0, p]')
    if not 0.0 <= noise_rate < 1.0:
        raise ValueError('noise_rate must lie in [0, 1)')
    if not 0.0 < atom_density < 1.0:
        raise ValueError('atom_density must lie in (0, 1)')

    rng = np.random.default_rng(seed)
    D = rng.random((m, p)) < atom_density
    ranks = np.argsort(rng.random((p, n)), axis=0)
    A = ranks < coeff_weight
    noise = rng.random((m, n)) < noise_rate

    clean = (D.astype(np.int64) @ A.astype(np.int64)) & 1
    X = clean.astype(bool) ^ noise
    LOGGER.debug('Planted %s atoms into %s samples with %s flipped bits', p, n, int(noise.sum()))
    return BinMatrix.from_dense(X), BinMatrix.from_dense(D), BinMatrix.from_dense(A)


class PBMDataset(DataLoader):
    """Sample matrix stored directly as a PBM image."""

    def __init__(self, path):
        self._path = Path(path)
        self._matrix = None

    @property
    def sample_shape(self):
        return (self.to_matrix().rows,)

    def to_matrix(self):
        if self._matrix is None:
            self._matrix = load_pbm(self._path)
        return self._matrix


class ImageBlockDataset(DataLoader):
    """Non-overlapping blocks of a single bitmap or grayscale image."""

    def __init__(self, path, block_shape, threshold=constants.DEFAULT_THRESHOLD):
        self._path = Path(path)
        self._block_shape = tuple(block_shape)
        self._threshold = threshold

    @property
    def sample_shape(self):
        return self._block_shape

    def image(self):
        if self._path.suffix.lower() == '.pbm':
            return load_pbm(self._path)
        return binarize(load_gray(self._path), self._threshold)

    def to_matrix(self):
        img = self.image()
        X = image_to_blocks(img, *self._block_shape)
        LOGGER.info('Cut %s x %s image into %s blocks of %s bits', img.rows, img.cols, X.cols, X.rows)
        return X


class DigitDataset(DataLoader):
    """Stack of grayscale digits saved with ``numpy.save`` (N x H x W)."""

    def __init__(self, path, size=constants.DIGIT_SIZE, threshold=constants.DEFAULT_THRESHOLD):
        self._path = Path(path)
        self._size = size
        self._threshold = threshold

    @property
    def sample_shape(self):
        return (self._size, self._size)

    def to_matrix(self):
        stack = np.load(self._path)
        X = digits_to_samples(stack, self._size, self._threshold)
        LOGGER.info('Converted %s digits to %s x %s bitmaps', X.cols, self._size, self._size)
        return X
