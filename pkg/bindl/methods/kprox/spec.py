from bindl.core.method import DictionaryUpdater, register_method
from bindl.methods.kprox.update import kprox_update


@register_method
class KProxUpdater(DictionaryUpdater):
    """K-PROX: per-atom rank-one refit of the restored residual with Proximus."""
    name = 'kprox'

    def update(self, X, D, A, E):
        return kprox_update(D, A, E, X)
