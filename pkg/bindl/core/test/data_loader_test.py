import numpy as np
import pytest
from PIL import Image

from bindl.core.bitmat import BinMatrix, DimensionError, mod2_matmul, xor
from bindl.core.data_loader import (DigitDataset, ImageBlockDataset, PBMDataset, binarize, blocks_to_image,
                                    centre_crop, digits_to_samples, image_to_blocks, synth_planted)
from bindl.core.pbm import save_pbm
from bindl.core.test.helpers import random_matrix


def test_single_block_is_one_column():
    rng = np.random.default_rng(0)
    img = random_matrix(rng, 16, 16)
    X = image_to_blocks(img, 16, 16)
    assert X.shape == (256, 1)
    assert np.array_equal(X.column(0).to_bits(), img.to_dense().T.reshape(-1))


def test_block_count_drops_partial_blocks():
    X = image_to_blocks(BinMatrix.zeros(1160, 896), 16, 16)
    assert X.shape == (256, 72 * 56)


def test_blocks_are_raster_ordered_and_column_vectorised():
    img = BinMatrix.from_dense([[1, 0, 0, 0],
                                [0, 0, 0, 1]])
    X = image_to_blocks(img, 2, 2)
    assert X.shape == (4, 2)
    assert list(X.column(0).to_bits()) == [1, 0, 0, 0]
    assert list(X.column(1).to_bits()) == [0, 0, 0, 1]

    img = BinMatrix.from_dense([[0, 1], [0, 0]])
    assert list(image_to_blocks(img, 2, 2).column(0).to_bits()) == [0, 0, 1, 0]


def test_blocks_reassemble_covered_region():
    rng = np.random.default_rng(1)
    img = random_matrix(rng, 37, 50)
    X = image_to_blocks(img, 8, 6)
    back = blocks_to_image(X, 8, 6, grid_cols=50 // 6)
    assert np.array_equal(back.to_dense(), img.to_dense()[:32, :48])


def test_block_errors():
    with pytest.raises(ValueError):
        image_to_blocks(BinMatrix.zeros(4, 4), 0, 2)
    with pytest.raises(DimensionError):
        image_to_blocks(BinMatrix.zeros(4, 4), 5, 2)
    with pytest.raises(DimensionError):
        blocks_to_image(BinMatrix.zeros(4, 3), 2, 2, grid_cols=2)


def test_binarize():
    gray = np.array([[0, 10], [200, 255]])
    assert binarize(gray, 256).weight() == 0
    assert binarize(gray, 0).weight() == 4
    assert np.array_equal(binarize(gray, 128).to_dense(), [[0, 0], [1, 1]])

    bits = np.array([[1, 0, 1], [0, 0, 1]])
    assert np.array_equal(binarize(bits, 1).to_dense(), bits)


def test_centre_crop():
    image = np.arange(12).reshape(3, 4)
    assert np.array_equal(centre_crop(image), [[0, 1, 2], [4, 5, 6], [8, 9, 10]])


def test_digits_to_samples():
    stack = np.zeros((3, 28, 28), dtype=np.uint8)
    stack[1] = 255
    X = digits_to_samples(stack, size=17)
    assert X.shape == (289, 3)
    assert list(X.col_weights()) == [0, 289, 0]


def test_synth_without_noise_is_exact():
    X, D, A = synth_planted(20, 50, 6, 3, 0.0, seed=0)
    assert X == mod2_matmul(D, A)
    assert set(A.col_weights()) == {3}


def test_synth_single_atom():
    X, D, A = synth_planted(10, 12, 1, 1, 0.0, seed=1)
    for j in range(X.cols):
        assert X.column(j) == D.column(0)


def test_synth_noise_rate():
    m, n, rate = 100, 1000, 0.05
    X, D, A = synth_planted(m, n, 4, 2, rate, seed=2)
    flipped = xor(X, mod2_matmul(D, A)).weight()
    sigma = np.sqrt(m * n * rate * (1 - rate))
    assert abs(flipped - rate * m * n) < 3 * sigma


def test_synth_is_reproducible():
    assert synth_planted(8, 9, 3, 2, 0.1, seed=4) == synth_planted(8, 9, 3, 2, 0.1, seed=4)


def test_synth_atom_density():
    assert synth_planted(8, 9, 3, 2, 0.1, seed=4) == synth_planted(8, 9, 3, 2, 0.1, seed=4, atom_density=0.5)

    m, p, density = 200, 40, 0.1
    _, D, _ = synth_planted(m, 5, p, 1, 0.0, seed=5, atom_density=density)
    sigma = np.sqrt(m * p * density * (1 - density))
    assert abs(D.weight() - density * m * p) < 3 * sigma


def test_synth_validation():
    with pytest.raises(ValueError):
        synth_planted(8, 9, 3, 4, 0.0)
    with pytest.raises(ValueError):
        synth_planted(8, 9, 3, 1, 1.0)
    with pytest.raises(ValueError):
        synth_planted(8, 0, 3, 1, 0.0)
    with pytest.raises(ValueError):
        synth_planted(8, 9, 3, 1, 0.0, atom_density=1.0)


def test_dataset_loaders(tmpdir):
    rng = np.random.default_rng(3)
    img = random_matrix(rng, 12, 10)
    save_pbm(img, tmpdir / 'img.pbm')

    assert PBMDataset(tmpdir / 'img.pbm').to_matrix() == img
    blocks = ImageBlockDataset(tmpdir / 'img.pbm', (4, 5))
    assert blocks.sample_shape == (4, 5)
    assert blocks.to_matrix() == image_to_blocks(img, 4, 5)

    gray = (img.to_dense() * 255).astype(np.uint8)
    Image.fromarray(gray).save(str(tmpdir / 'img.pgm'))
    assert ImageBlockDataset(tmpdir / 'img.pgm', (4, 5)).to_matrix() == image_to_blocks(img, 4, 5)

    np.save(str(tmpdir / 'digits.npy'), np.full((2, 28, 28), 255, dtype=np.uint8))
    digits = DigitDataset(tmpdir / 'digits.npy').to_matrix()
    assert digits.shape == (289, 2)
