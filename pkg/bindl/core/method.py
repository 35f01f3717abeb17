from collections import defaultdict
from abc import ABC, abstractmethod

from bindl.core.bindl_logger import LOGGER

# Registry of dictionary update methods
# This provides a mapping from str -> list, where the key is the name of the
# method and the value is a list of registered classes for that name.
# Currently we take the last class added as the one to use.
METHOD_REGISTRY = defaultdict(list)


def create_method(name):
    import bindl.methods  # noqa: F401  registers the built-in methods

    if name not in METHOD_REGISTRY or len(METHOD_REGISTRY[name]) == 0:
        raise ValueError("Method {} does not exist in registry!".format(name))

    method_cls = METHOD_REGISTRY[name][-1]
    LOGGER.debug('Method implementation is {}'.format(method_cls.__name__))
    return method_cls()


def register_method(cls):
    if getattr(cls, 'name', None) is None:
        raise RuntimeError('Cannot register method without name property!')

    METHOD_REGISTRY[cls.name].append(cls)
    return cls


def available_methods():
    import bindl.methods  # noqa: F401

    return sorted(name for name, classes in METHOD_REGISTRY.items() if classes)


class DictionaryUpdater(ABC):
    """One dictionary update half-step of the alternating learner."""

    name = None

    @abstractmethod
    def update(self, X, D, A, E):
        """Return updated (D, A, E); E must stay equal to X ⊕ D⊗A and h(E) must not grow."""
