import logging
import os

LOG_LEVELS = ('debug', 'info', 'warning', 'error', 'critical')

# ANSI colour of the *** marker, from the highest level down
LEVEL_COLOURS = (
    (logging.ERROR, '\x1b[31;1m'),
    (logging.WARNING, '\x1b[33;1m'),
    (logging.INFO, '\x1b[32;1m'),
    (logging.DEBUG, '\x1b[35;1m'),
)
RESET = '\x1b[0m'
BOLD = '\x1b[1m'

log = logging.getLogger('bindl')
log.setLevel(level=logging.INFO)
formatter = logging.Formatter('%(name)s - %(levelname)s - %(message)s')

ch = logging.StreamHandler()
ch.setLevel(level=logging.DEBUG)
ch.setFormatter(formatter)


def _colour(levelno):
    for threshold, colour in LEVEL_COLOURS:
        if levelno >= threshold:
            return colour
    return RESET


def decorate_emit(fn):
    # add colour per level and bold arguments, unless BINDL_NO_COLOR is set
    def new(*args):
        if os.environ.get('BINDL_NO_COLOR'):
            return fn(*args)

        record = args[0]
        record.msg = '{0}***{1} {2}'.format(_colour(record.levelno), RESET, record.msg)
        record.args = tuple(BOLD + str(arg) + RESET for arg in record.args)
        return fn(*args)
    return new


def set_verbosity(verbosity, log_level='info'):
    """0 silences all but critical messages, 1 shows warnings, 2 and up honour ``log_level``."""
    log.setLevel(log_level.upper())
    if verbosity < 2:
        log.setLevel(logging.WARNING)
    if verbosity == 0:
        log.setLevel(logging.CRITICAL)


ch.emit = decorate_emit(ch.emit)
log.addHandler(ch)

LOGGER = log
