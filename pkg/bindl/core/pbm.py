"""Netpbm bitmap (PBM) reading and writing.

P4 rasters are row-major, byte-aligned and MSB-first; P1 rasters are ASCII
digits. Pixel value 1 (black) is a set bit. Image row ``i`` / column ``j`` is
matrix entry (i, j).
"""
import re
from pathlib import Path

import numpy as np

from bindl.core.bitmat import BinMatrix

# Netpbm recommends at most 70 characters per line in plain files
PLAIN_LINE_WIDTH = 70

_COMMENT = re.compile(rb'#[^\n]*')


class PBMFormatError(ValueError):
    """Malformed or truncated PBM data."""


def _next_token(data, pos):
    size = len(data)
    while pos < size:
        char = data[pos:pos + 1]
        if char == b'#':
            end = data.find(b'\n', pos)
            pos = size if end < 0 else end + 1
        elif char.isspace():
            pos += 1
        else:
            break

    start = pos
    while pos < size and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b'#':
        pos += 1
    if start == pos:
        raise PBMFormatError('unexpected end of header')
    return data[start:pos], pos


def _read_header(data):
    magic = data[:2]
    if magic not in (b'P1', b'P4'):
        raise PBMFormatError('unknown magic number {!r}'.format(magic))

    width, pos = _next_token(data, 2)
    height, pos = _next_token(data, pos)
    try:
        width, height = int(width), int(height)
    except ValueError:
        raise PBMFormatError('non-numeric image size {!r} x {!r}'.format(width, height))
    if width < 0 or height < 0:
        raise PBMFormatError('negative image size')
    return magic, width, height, pos


def parse_pbm(data):
    """Decode PBM bytes into a height x width BinMatrix."""
    magic, width, height, pos = _read_header(data)

    if magic == b'P4':
        if pos >= len(data) or not data[pos:pos + 1].isspace():
            if width * height:
                raise PBMFormatError('missing whitespace before raster')
        pos += 1
        row_bytes = (width + 7) // 8
        needed = row_bytes * height
        raster = data[pos:pos + needed]
        if len(raster) < needed:
            raise PBMFormatError('truncated raster: expected {} bytes, got {}'.format(needed, len(raster)))
        raster = np.frombuffer(raster, dtype=np.uint8).reshape(height, row_bytes)
        bits = np.unpackbits(raster, axis=1, count=width)
        return BinMatrix.from_dense(bits)

    body = np.frombuffer(_COMMENT.sub(b'', data[pos:]), dtype=np.uint8)
    digits = (body == ord('0')) | (body == ord('1'))
    spaces = np.isin(body, np.frombuffer(b' \t\n\r\v\f', dtype=np.uint8))
    if np.any(~(digits | spaces)):
        raise PBMFormatError('unexpected characters in plain raster')
    values = body[digits] - ord('0')
    if values.size < width * height:
        raise PBMFormatError('truncated raster: expected {} pixels, got {}'.format(width * height, values.size))
    return BinMatrix.from_dense(values[:width * height].reshape(height, width))


def load_pbm(path):
    return parse_pbm(Path(path).read_bytes())


def format_pbm(matrix, plain=False):
    dense = matrix.to_dense()
    height, width = dense.shape
    if not plain:
        header = 'P4\n{} {}\n'.format(width, height).encode('ascii')
        return header + np.packbits(dense, axis=1).tobytes()

    lines = ['P1', '{} {}'.format(width, height)]
    for row in dense:
        text = ''.join('1' if bit else '0' for bit in row)
        lines.extend(text[i:i + PLAIN_LINE_WIDTH] for i in range(0, len(text), PLAIN_LINE_WIDTH))
    return ('\n'.join(lines) + '\n').encode('ascii')


def save_pbm(matrix, path, plain=False):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(format_pbm(matrix, plain=plain))
