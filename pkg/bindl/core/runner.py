import dataclasses
import platform
from pathlib import Path

import numpy as np

import bindl
from bindl.core import constants
from bindl.core.bindl_logger import LOGGER
from bindl.core.bitmat import BinMatrix, DimensionError
from bindl.core.callbacks import HistoryCallback, LEARN_COLUMNS, TrackingCallback, write_csv
from bindl.core.codelength import model_codelength
from bindl.core.data_loader import DigitDataset, ImageBlockDataset, PBMDataset, synth_planted
from bindl.core.encoder import encode_all
from bindl.core.learner import initial_dictionary, learn
from bindl.core.model_store import load_model, save_model
from bindl.core.mosaic import mosaic_columns, render_mosaic, take_columns
from bindl.core.pbm import load_pbm, save_pbm
from bindl.core.selection import forward_select
from bindl.core.tracking import TrackingClient


class Runner:
    """Runs one command and writes its artifacts into ``output_dir``.

    Nothing is written before the inputs have been validated, so a failing
    command leaves no partial output behind.
    """

    def __init__(self, output_dir, command):
        self._output_dir = Path(output_dir)
        self._command = command

    @property
    def output_dir(self):
        return self._output_dir

    def _open(self):
        self._output_dir.mkdir(parents=True, exist_ok=True)
        db = TrackingClient(self._output_dir / 'logs.json')
        db.log_tag('run_info', {
            'command': self._command,
            'version': bindl.__version__,
            'python': platform.python_version(),
            'numpy': np.__version__,
            'node_name': platform.node(),
        })
        return db

    def learn(self, X, p, params, D0=None):
        if D0 is None:
            D0 = initial_dictionary(X, p, params)
        elif D0.cols != p:
            raise DimensionError('initial dictionary has {} atoms, expected {}'.format(D0.cols, p))
        if D0.rows != X.rows:
            raise DimensionError('dictionary with {} rows for samples of length {}'.format(D0.rows, X.rows))

        self._open().close()
        LOGGER.info('Learning %s atoms with %s from %s samples of length %s', D0.cols, params.method, X.cols, X.rows)
        model = learn(X, D0, params, callbacks=(TrackingCallback(self._output_dir),))

        report = model_codelength(model.D, model.A, model.E)
        save_model(model, self._output_dir, report)
        write_csv(model.history, LEARN_COLUMNS, self._output_dir / 'learn.csv', time_column='seconds')
        return model, report

    def select(self, X, params, D0=None):
        if D0 is not None and D0.shape != (X.rows, params.p0):
            raise DimensionError('initial dictionary of shape {} for m={} and p0={}'.format(
                D0.shape, X.rows, params.p0))
        if D0 is None:
            D0 = initial_dictionary(X, params.p0, params.learn)

        db = self._open()
        LOGGER.info('Forward selection with %s from p0=%s', params.learn.method, params.p0)
        history = HistoryCallback()
        result = forward_select(X, params, D0=D0, callbacks=(TrackingCallback(self._output_dir), history))

        db.log_tag('baseline', result.baseline.as_dict())
        db.close()

        save_model(result.model, self._output_dir, result.report)
        write_csv(result.model.history, LEARN_COLUMNS, self._output_dir / 'learn.csv', time_column='seconds')
        history.trajectory_frame().to_csv(self._output_dir / 'trajectory.csv', index=False)
        history.iteration_frame().to_csv(self._output_dir / 'iterations.csv', index=False)
        return result

    def encode(self, model_dir, X, params, warm_start=False):
        model = load_model(model_dir)
        if X.rows != model.m:
            raise DimensionError('samples of length {} for a model with m={}'.format(X.rows, model.m))

        if warm_start:
            if X.cols != model.n:
                raise DimensionError('warm start needs the {} training samples, got {}'.format(model.n, X.cols))
            A0 = model.A
        else:
            A0 = BinMatrix(model.p, X.cols)

        self._open().close()
        A, E = encode_all(X, model.D, A0, params)
        report = dataclasses.replace(model_codelength(model.D, A, E), L_D=0)
        save_pbm(A, self._output_dir / 'A.pbm')
        save_pbm(E, self._output_dir / 'E.pbm')
        return A, E, report


def load_samples(path):
    return PBMDataset(path).to_matrix()


def read_dictionary(path, m):
    D0 = load_pbm(path)
    if D0.rows != m:
        raise DimensionError('initial dictionary with {} rows for samples of length {}'.format(D0.rows, m))
    return D0


def prepare_samples(path, tile=None, threshold=constants.DEFAULT_THRESHOLD, digits=False,
                    size=constants.DIGIT_SIZE):
    if digits:
        return DigitDataset(path, size=size, threshold=threshold).to_matrix()
    if tile is None:
        raise ValueError('a tile size is required for image input')
    return ImageBlockDataset(path, tile, threshold=threshold).to_matrix()


def synth_to_dir(output_dir, m, n, p, coeff_weight, noise_rate, seed, atom_density=0.5):
    X, D, A = synth_planted(m, n, p, coeff_weight, noise_rate, seed, atom_density=atom_density)
    output_dir = Path(output_dir)
    for name, matrix in (('X', X), ('D', D), ('A', A)):
        save_pbm(matrix, output_dir / '{}.pbm'.format(name))
    return X, D, A


def mosaic_to_file(model_dir, output, tile, grid_cols, source='atoms', count=None):
    model = load_model(model_dir)
    columns = take_columns(mosaic_columns(model, source), count)
    image = render_mosaic(columns, tile[0], tile[1], grid_cols)
    save_pbm(image, output)
    return image
