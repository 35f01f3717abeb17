from bindl.core.method import DictionaryUpdater, register_method
from bindl.methods.mob.update import mob_update


@register_method
class MOBUpdater(DictionaryUpdater):
    """Method of Binary Directions: per-atom majority vote over the usage set."""
    name = 'mob'

    def update(self, X, D, A, E):
        D, E = mob_update(D, A, E)
        return D, A, E
