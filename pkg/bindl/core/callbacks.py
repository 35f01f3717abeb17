import time
from pathlib import Path

import pandas as pd

from bindl.core.tracking import TrackingClient
from bindl.core.selection import TRAJECTORY_COLUMNS

# Column order of learn.csv; never reorder, append new columns at the end
LEARN_COLUMNS = ('iter', 'residual_weight', 'changed_bits_D', 'changed_bits_A', 'seconds',
                 'changed_bits_E', 'total_bits')


def to_frame(rows, columns, time_column=None):
    """Rows (dicts) -> DataFrame with a fixed column order and a 3-decimal time column."""
    frame = pd.DataFrame(list(rows), columns=list(columns))
    if time_column is not None and not frame.empty:
        frame[time_column] = frame[time_column].map('{:.3f}'.format)
    return frame


def write_csv(rows, columns, path, time_column=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    to_frame(rows, columns, time_column).to_csv(path, index=False)
    return path


class LearnCallback:
    """Hooks called by ``learn`` and ``forward_select``; every hook is optional."""

    def on_learn_begin(self, params):
        pass

    def on_iteration_end(self, iteration, record):
        pass

    def on_learn_end(self, model):
        pass

    def on_select_step(self, step):
        pass


class TrackingCallback(LearnCallback):

    def __init__(self, output_dir):
        self._db = TrackingClient(Path(output_dir) / 'logs.json')
        self._run = 0

    def on_learn_begin(self, params):
        self._run += 1
        self._learn_begin_time = time.time()
        self._db.log_param('learn_params', dict(params=params, run=self._run))

    def on_iteration_end(self, iteration, record):
        metrics = dict(record)
        metrics['run'] = self._run
        self._db.log_metric('iteration_log', metrics, step=iteration)

    def on_learn_end(self, model):
        metrics = {
            'run': self._run,
            'duration': time.time() - self._learn_begin_time,
            'p': model.p,
            'residual_weight': model.residual_weight,
            'outer_iters': model.outer_iters,
            'converged': model.converged,
        }
        self._db.log_metric('learn_log', metrics, step=self._run)

    def on_select_step(self, step):
        self._db.log_metric('select_log', step.as_row(), step=step.p)


class HistoryCallback(LearnCallback):
    """Keeps every iteration record and selection step in memory."""

    def __init__(self):
        self.iterations = []
        self.steps = []
        self._p = None

    def on_learn_begin(self, params):
        self._p = None

    def on_iteration_end(self, iteration, record):
        self.iterations.append(dict(record, p=self._p))

    def on_learn_end(self, model):
        for record in self.iterations:
            if record['p'] is None:
                record['p'] = model.p

    def on_select_step(self, step):
        self.steps.append(step.as_row())

    def trajectory_frame(self):
        return to_frame(self.steps, TRAJECTORY_COLUMNS, time_column='wall_time_seconds')

    def iteration_frame(self):
        return to_frame(self.iterations, ('p',) + LEARN_COLUMNS, time_column='seconds')
