"""Model directories: D, A and E as PBM images plus a YAML manifest."""
from pathlib import Path

import yaml

from bindl.core.bindl_logger import LOGGER
from bindl.core.bitmat import residual
from bindl.core.codelength import model_codelength
from bindl.core.constants import MANIFEST_FILE
from bindl.core.learner import Model
from bindl.core.pbm import PBMFormatError, load_pbm, save_pbm

MATRIX_FILES = ('D', 'A', 'E')

MANIFEST_KEYS = ('m', 'n', 'p', 'method', 'seed', 'residual_weight', 'outer_iters', 'converged',
                 'L_D', 'L_A', 'L_E', 'total', 'bits_per_sample')


class ModelStoreError(RuntimeError):
    """A model directory is incomplete or contradicts itself."""


def build_manifest(model, report=None):
    report = model_codelength(model.D, model.A, model.E) if report is None else report
    manifest = {
        'm': model.m,
        'n': model.n,
        'p': model.p,
        'method': model.method,
        'seed': int(model.seed),
        'residual_weight': int(model.residual_weight),
        'outer_iters': int(model.outer_iters),
        'converged': bool(model.converged),
    }
    manifest.update({key: int(value) for key, value in report.as_dict().items()})
    manifest['bits_per_sample'] = float(report.bits_per_sample)
    return manifest


def save_model(model, model_dir, report=None):
    model_dir = Path(model_dir)
    model_dir.mkdir(parents=True, exist_ok=True)

    for name in MATRIX_FILES:
        save_pbm(getattr(model, name), model_dir / '{}.pbm'.format(name))

    with open(model_dir / MANIFEST_FILE, 'w') as manifest_file:
        yaml.safe_dump(build_manifest(model, report), manifest_file, sort_keys=False)

    LOGGER.debug('Saved model to %s', str(model_dir))
    return model_dir


def load_manifest(model_dir):
    path = Path(model_dir) / MANIFEST_FILE
    if not path.exists():
        raise ModelStoreError('No manifest found in {}'.format(model_dir))

    with open(path) as manifest_file:
        manifest = yaml.load(manifest_file, yaml.SafeLoader) or {}

    missing = [key for key in MANIFEST_KEYS if key not in manifest]
    if missing:
        raise ModelStoreError('Manifest {} is missing keys: {}'.format(path, ', '.join(missing)))
    return manifest


def _load_matrix(model_dir, name):
    path = Path(model_dir) / '{}.pbm'.format(name)
    if not path.exists():
        raise ModelStoreError('Missing {} in {}'.format(path.name, model_dir))
    try:
        return load_pbm(path)
    except PBMFormatError as e:
        raise ModelStoreError('Could not read {}: {}'.format(path, e))


def load_model(model_dir, X=None):
    """Read a model directory; with ``X`` also check E = X ⊕ D⊗A."""
    manifest = load_manifest(model_dir)
    D, A, E = (_load_matrix(model_dir, name) for name in MATRIX_FILES)
    m, n, p = manifest['m'], manifest['n'], manifest['p']

    expected = {'D': (m, p), 'A': (p, n), 'E': (m, n)}
    for name, matrix in zip(MATRIX_FILES, (D, A, E)):
        if matrix.shape != expected[name]:
            raise ModelStoreError('{} has shape {} but the manifest says {}'.format(
                name, matrix.shape, expected[name]))

    if E.weight() != manifest['residual_weight']:
        raise ModelStoreError('Residual weight {} does not match the manifest value {}'.format(
            E.weight(), manifest['residual_weight']))

    if X is not None:
        if X.shape != (m, n):
            raise ModelStoreError('Data of shape {} does not match a {}x{} model'.format(X.shape, m, n))
        if E != residual(X, D, A):
            raise ModelStoreError('Stored residual differs from X ⊕ D⊗A')

    return Model(D=D, A=A, E=E, residual_weight=manifest['residual_weight'],
                 outer_iters=manifest['outer_iters'], method=manifest['method'],
                 seed=manifest['seed'], converged=manifest['converged'])
