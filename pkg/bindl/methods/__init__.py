import importlib.util
from pathlib import Path

from bindl.core.method import METHOD_REGISTRY

# Import the built-in methods so they register themselves
from bindl.methods.mob import spec as _mob_spec  # noqa: F401
from bindl.methods.kprox import spec as _kprox_spec  # noqa: F401

# Register a list of all possible dictionary update methods.
METHODS = METHOD_REGISTRY


def register_all_objects(module_dir):
    """Import every module under ``module_dir`` so user methods can register."""
    from bindl.core.bindl_logger import LOGGER

    module_dir = Path(module_dir).expanduser()
    LOGGER.debug('Importing modules from {}'.format(module_dir))

    for module_path in sorted(module_dir.glob('**/*.py')):
        module_path = str(module_path)
        LOGGER.debug(module_path)

        try:
            spec = importlib.util.spec_from_file_location(module_path.replace('/', '.'), module_path)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
        except ModuleNotFoundError:
            LOGGER.debug('Skipping module {} due to module not found error'.format(module_path))
