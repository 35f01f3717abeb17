import numpy as np

from bindl.core.bitmat import BinMatrix, DimensionError, mod2_matmul, unpack_rows, xor
from bindl.core.constants import MOSAIC_BORDER

MOSAIC_SOURCES = ('atoms', 'samples', 'residual')


def parse_tile(text):
    """'HxW' -> (H, W)."""
    try:
        height, width = (int(part) for part in text.lower().split('x'))
    except ValueError:
        raise ValueError('tile must look like HxW, got {!r}'.format(text))
    if height < 1 or width < 1:
        raise ValueError('tile dimensions must be >= 1, got {!r}'.format(text))
    return height, width


def render_mosaic(columns, tile_h, tile_w, grid_cols, border=MOSAIC_BORDER):
    """Lay the columns of a matrix out as tiles, left to right then top to bottom.

    Each column is unfolded column by column into a tile_h x tile_w tile, the
    layout used for image blocks. Tiles are separated and framed by ``border``
    set pixels.
    """
    if tile_h * tile_w != columns.rows:
        raise DimensionError('tile {}x{} does not hold columns of length {}'.format(tile_h, tile_w, columns.rows))
    if grid_cols < 1:
        raise ValueError('grid_cols must be >= 1')
    if columns.cols == 0:
        raise ValueError('no columns to render')

    count = columns.cols
    grid_cols = min(grid_cols, count)
    grid_rows = -(-count // grid_cols)
    step_h, step_w = tile_h + border, tile_w + border

    canvas = np.ones((grid_rows * step_h + border, grid_cols * step_w + border), dtype=np.uint8)
    tiles = unpack_rows(columns.col_words, columns.rows).reshape(count, tile_w, tile_h).transpose(0, 2, 1)
    # cells past the last column stay blank
    for index in range(grid_rows * grid_cols):
        top = border + (index // grid_cols) * step_h
        left = border + (index % grid_cols) * step_w
        canvas[top:top + tile_h, left:left + tile_w] = tiles[index] if index < count else 0

    return BinMatrix.from_dense(canvas)


def mosaic_columns(model, source='atoms'):
    """Columns of a stored model to render: D, the samples D⊗A ⊕ E, or E."""
    if source not in MOSAIC_SOURCES:
        raise ValueError('source must be one of {}'.format(', '.join(MOSAIC_SOURCES)))
    if source == 'atoms':
        return model.D
    if source == 'residual':
        return model.E
    return xor(mod2_matmul(model.D, model.A), model.E)


def take_columns(matrix, count=None):
    if count is None or count >= matrix.cols:
        return matrix
    if count < 1:
        raise ValueError('count must be >= 1')
    return BinMatrix(matrix.rows, count, matrix.col_words[:count])
