from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from bindl.core.bitmat import BinMatrix, DimensionError
from bindl.core.callbacks import LEARN_COLUMNS
from bindl.core.encoder import EncodeParams
from bindl.core.learner import LearnParams
from bindl.core.model_store import load_model
from bindl.core.pbm import load_pbm, save_pbm
from bindl.core.runner import Runner, mosaic_to_file, prepare_samples, read_dictionary, synth_to_dir
from bindl.core.selection import SelectParams
from bindl.core.tracking import TrackingClient


@pytest.fixture()
def planted(tmpdir):
    X, D, A = synth_to_dir(tmpdir / 'data', 16, 60, 3, 1, 0.0, seed=1)
    return X, D, A


def test_synth_to_dir(tmpdir, planted):
    X, D, A = planted
    for name, matrix in (('X', X), ('D', D), ('A', A)):
        assert load_pbm(tmpdir / 'data' / '{}.pbm'.format(name)) == matrix


def test_learn(tmpdir, planted):
    X, _, _ = planted
    output = Path(tmpdir / 'model')

    model, report = Runner(output, 'learn').learn(X, 3, LearnParams())

    for name in ('D.pbm', 'A.pbm', 'E.pbm', 'manifest.yml', 'learn.csv', 'logs.json'):
        assert (output / name).exists()
    assert load_model(output, X=X).E == model.E
    frame = pd.read_csv(output / 'learn.csv')
    assert list(frame.columns) == list(LEARN_COLUMNS)
    assert len(frame) == model.outer_iters
    assert report.total == report.L_D + report.L_A + report.L_E

    db = TrackingClient(output / 'logs.json')
    assert db.get_tags()[0]['data']['command'] == 'learn'


def test_learn_with_initial_dictionary(tmpdir):
    X = BinMatrix.from_dense(np.eye(8, dtype=np.uint8))
    model, _ = Runner(tmpdir / 'model', 'learn').learn(X, 8, LearnParams(), D0=X.copy())
    assert model.D == X
    assert model.residual_weight == 0


def test_invalid_learn_writes_nothing(tmpdir, planted):
    X, D, _ = planted
    output = Path(tmpdir / 'model')

    with pytest.raises(ValueError, match='p must be ≥ 1'):
        Runner(output, 'learn').learn(X, 0, LearnParams())
    with pytest.raises(DimensionError):
        Runner(output, 'learn').learn(X, 2, LearnParams(), D0=D)
    with pytest.raises(DimensionError):
        Runner(output, 'learn').learn(X, 3, LearnParams(), D0=BinMatrix.zeros(15, 3))
    assert not output.exists()


def test_select(tmpdir, planted):
    X, _, _ = planted
    output = Path(tmpdir / 'select')

    result = Runner(output, 'select').select(X, SelectParams(p0=1))

    trajectory = pd.read_csv(output / 'trajectory.csv')
    assert list(trajectory['p']) == [step.p for step in result.trajectory]
    iterations = pd.read_csv(output / 'iterations.csv')
    assert list(iterations.columns) == ['p'] + list(LEARN_COLUMNS)
    assert load_model(output, X=X).p == result.model.p

    db = TrackingClient(output / 'logs.json')
    baseline = [tag for tag in db.get_tags() if tag['name'] == 'baseline'][0]
    assert baseline['data']['total'] == result.baseline.total


def test_encode(tmpdir, planted):
    X, D, _ = planted
    Runner(tmpdir / 'model', 'learn').learn(X, 3, LearnParams(), D0=D)
    output = Path(tmpdir / 'coded')

    A, E, report = Runner(output, 'encode').encode(tmpdir / 'model', X, EncodeParams())

    assert load_pbm(output / 'A.pbm') == A
    assert load_pbm(output / 'E.pbm') == E
    assert report.L_D == 0
    assert report.total == report.L_A + report.L_E


def test_encode_warm_start(tmpdir, planted):
    X, D, _ = planted
    model, _ = Runner(tmpdir / 'model', 'learn').learn(X, 3, LearnParams(), D0=D)

    A, E, _ = Runner(tmpdir / 'coded', 'encode').encode(tmpdir / 'model', X, EncodeParams(), warm_start=True)
    assert E.weight() <= model.residual_weight

    with pytest.raises(DimensionError):
        Runner(tmpdir / 'other', 'encode').encode(tmpdir / 'model', BinMatrix.zeros(16, 5),
                                                 EncodeParams(), warm_start=True)
    assert not Path(tmpdir / 'other').exists()


def test_encode_warm_start_reproduces_converged_coefficients(tmpdir):
    rng = np.random.default_rng(5)
    X = BinMatrix.from_dense(rng.random((8, 30)) < 0.4)
    D = BinMatrix.from_dense(np.eye(8, dtype=np.uint8))
    model, _ = Runner(tmpdir / 'model', 'learn').learn(X, 8, LearnParams(), D0=D)
    assert model.converged

    A, E, _ = Runner(tmpdir / 'coded', 'encode').encode(tmpdir / 'model', X, EncodeParams(), warm_start=True)

    assert A == model.A
    assert E == model.E


def test_encode_zero_columns(tmpdir, planted):
    X, D, _ = planted
    Runner(tmpdir / 'model', 'learn').learn(X, 3, LearnParams(), D0=D)

    A, E, _ = Runner(tmpdir / 'coded', 'encode').encode(tmpdir / 'model', BinMatrix.zeros(16, 4), EncodeParams())

    assert A == BinMatrix.zeros(3, 4)
    assert E.weight() == 0


def test_encode_rejects_other_sample_length(tmpdir, planted):
    X, D, _ = planted
    Runner(tmpdir / 'model', 'learn').learn(X, 3, LearnParams(), D0=D)
    with pytest.raises(DimensionError):
        Runner(tmpdir / 'coded', 'encode').encode(tmpdir / 'model', BinMatrix.zeros(15, 4), EncodeParams())
    assert not Path(tmpdir / 'coded').exists()


def test_read_dictionary(tmpdir):
    save_pbm(BinMatrix.zeros(8, 2), tmpdir / 'D.pbm')
    assert read_dictionary(tmpdir / 'D.pbm', 8).shape == (8, 2)
    with pytest.raises(DimensionError):
        read_dictionary(tmpdir / 'D.pbm', 9)


def test_prepare_samples_needs_a_tile(tmpdir):
    save_pbm(BinMatrix.zeros(8, 8), tmpdir / 'img.pbm')
    assert prepare_samples(tmpdir / 'img.pbm', tile=(4, 4)).shape == (16, 4)
    with pytest.raises(ValueError):
        prepare_samples(tmpdir / 'img.pbm')


def test_mosaic_to_file(tmpdir):
    D = BinMatrix.from_dense(np.eye(4, dtype=np.uint8))
    Runner(tmpdir / 'model', 'learn').learn(D, 4, LearnParams(), D0=D)

    image = mosaic_to_file(tmpdir / 'model', tmpdir / 'atoms.pbm', (2, 2), grid_cols=2)

    assert image.shape == (7, 7)
    assert load_pbm(tmpdir / 'atoms.pbm') == image
