import dataclasses
import time
from pathlib import Path

import numpy as np
from tinydb import Query, TinyDB

RECORD_TYPES = ('metric', 'param', 'tag')


def sanitize_dict(d):
    """Make a (possibly nested) record JSON friendly; dataclasses become dicts."""
    if dataclasses.is_dataclass(d) and not isinstance(d, type):
        d = dataclasses.asdict(d)
    d = dict(d)
    for k, v in d.items():
        if dataclasses.is_dataclass(v) and not isinstance(v, type):
            v = sanitize_dict(v)
        elif isinstance(v, dict):
            v = sanitize_dict(v)
        elif isinstance(v, (bool, np.bool_)):
            v = bool(v)
        elif isinstance(v, (int, np.integer)):
            v = int(v)
        elif isinstance(v, (float, np.floating)):
            v = float(v)
        elif isinstance(v, (set, tuple, list)):
            v = list(v)
        elif v is None or isinstance(v, str):
            pass
        elif hasattr(v, '__name__'):
            v = v.__name__
        else:
            v = str(v)
        d[k] = v
    return d


class TrackingClient:
    """Run log of a learn/select/encode command, kept as a TinyDB JSON file."""

    def __init__(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self._db = TinyDB(str(path))

    def _insert(self, kind, key, value, **extra):
        record = {'name': key, 'data': sanitize_dict(value), 'type': kind}
        record.update(extra)
        self._db.insert(record)

    def log_metric(self, key, value, step=0):
        self._insert('metric', key, value, step=int(step), timestamp=time.time())

    def log_param(self, key, value):
        self._insert('param', key, value)

    def log_tag(self, key, value):
        self._insert('tag', key, value)

    def search(self, kind, name=None):
        if kind not in RECORD_TYPES:
            raise ValueError('record type must be one of {}'.format(', '.join(RECORD_TYPES)))
        query = Query()
        condition = query.type == kind
        if name is not None:
            condition &= query.name == name
        return self._db.search(condition)

    def get_metric(self, name):
        return sorted(self.search('metric', name), key=lambda record: record['step'])

    def get_metrics(self):
        return self.search('metric')

    def get_param(self, name):
        return self.search('param', name)

    def get_params(self):
        return self.search('param')

    def get_tags(self):
        return self.search('tag')

    def close(self):
        self._db.close()
