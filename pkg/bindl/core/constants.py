import os

# Bits per machine word of a PackedBits vector
WORD_BITS = 64

# Bernoulli parameter used for random dictionaries
DEFAULT_THETA = 0.5

# Residual weight below which BMP stops
DEFAULT_W_MAX = 1

DEFAULT_MAX_OUTER_ITER = 100

# Rank-one tiles tried per growth step of forward selection
DEFAULT_SELECT_TILES = 4

# Samples per lock-step block in the batched encoder
ENCODE_BLOCK_SIZE = 512

# Revalidate caches and invariants after mutations
DEBUG = os.environ.get('BINDL_DEBUG', '0') == '1'

# Side of the square bitmaps produced from digit images
DIGIT_SIZE = 17

# Gray level at or above which a pixel becomes a set bit
DEFAULT_THRESHOLD = 128

# Width of the separator lines between mosaic tiles
MOSAIC_BORDER = 1

MANIFEST_FILE = 'manifest.yml'
