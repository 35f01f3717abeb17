import numpy as np
import pytest

from bindl.core.bitmat import BinMatrix
from bindl.core.learner import LearnParams, learn
from bindl.core.method import METHOD_REGISTRY, DictionaryUpdater, available_methods, create_method, register_method
from bindl.methods import register_all_objects
from bindl.methods.kprox.spec import KProxUpdater
from bindl.methods.mob.spec import MOBUpdater

USER_METHOD = '''
from bindl.core.method import DictionaryUpdater, register_method


@register_method
class FrozenUpdater(DictionaryUpdater):
    name = 'frozen'

    def update(self, X, D, A, E):
        return D, A, E
'''


def test_builtin_methods_are_registered():
    assert {'mob', 'kprox'} <= set(available_methods())
    assert isinstance(create_method('mob'), MOBUpdater)
    assert isinstance(create_method('kprox'), KProxUpdater)


def test_unknown_method():
    with pytest.raises(ValueError, match='does not exist'):
        create_method('svd')


def test_register_requires_a_name():
    class Nameless(DictionaryUpdater):
        def update(self, X, D, A, E):
            return D, A, E

    with pytest.raises(RuntimeError):
        register_method(Nameless)


def test_last_registration_wins(mocker):
    mocker.patch.dict(METHOD_REGISTRY, {name: list(classes) for name, classes in METHOD_REGISTRY.items()})

    @register_method
    class Replacement(MOBUpdater):
        pass

    assert isinstance(create_method('mob'), Replacement)


def test_register_all_objects(tmpdir, mocker):
    mocker.patch.dict(METHOD_REGISTRY, {name: list(classes) for name, classes in METHOD_REGISTRY.items()})
    (tmpdir / 'methods').mkdir()
    (tmpdir / 'methods' / 'frozen.py').write_text(USER_METHOD, encoding='utf-8')
    (tmpdir / 'methods' / 'broken.py').write_text('import a_module_that_does_not_exist\n', encoding='utf-8')

    register_all_objects(tmpdir / 'methods')

    assert 'frozen' in available_methods()
    X = BinMatrix.from_dense(np.eye(4, dtype=np.uint8))
    model = learn(X, BinMatrix.from_dense(np.eye(4, dtype=np.uint8)), LearnParams(method='frozen'))
    assert model.method == 'frozen'
    assert model.residual_weight == 0
