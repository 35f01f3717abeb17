import sys
import traceback
from functools import wraps
from importlib import resources
from pathlib import Path

import click
import yaml

import bindl
from bindl.core import constants
from bindl.core.bindl_logger import LOG_LEVELS, LOGGER, set_verbosity
from bindl.core.encoder import EncodeParams
from bindl.core.learner import INIT_METHODS, LearnParams
from bindl.core.method import available_methods
from bindl.core.mosaic import MOSAIC_SOURCES, parse_tile
from bindl.core.pbm import save_pbm
from bindl.core.runner import (Runner, load_samples, mosaic_to_file, prepare_samples, read_dictionary,
                               synth_to_dir)
from bindl.core.selection import SelectParams
from bindl.methods import register_all_objects

CONFIG_FILE = 'bindl-config.yml'


def load_yaml(file_path):
    if not Path(file_path).exists():
        return {}

    with open(file_path) as config_data:
        cfg = yaml.load(config_data, yaml.SafeLoader)
        cfg = {} if cfg is None else cfg
        return cfg


def load_config():
    pkg_config_file = resources.files(bindl).joinpath(CONFIG_FILE)
    user_config_file = Path('~/.{}'.format(CONFIG_FILE)).expanduser()
    local_config_file = Path(CONFIG_FILE)

    # load and overwrite configs in order of precedence
    with resources.as_file(pkg_config_file) as pkg_config_path:
        config = load_yaml(pkg_config_path)

    for path in (user_config_file, local_config_file):
        overrides = load_yaml(path)
        for section in ('learn', 'mob', 'kprox'):
            if isinstance(overrides.get(section), dict):
                merged = dict(config.get(section) or {})
                merged.update(overrides.pop(section))
                config[section] = merged
        config.update(overrides)

    return config


def register(config):
    # Import all modules in the search path so user methods register themselves
    for path in config.get('search_path') or []:
        register_all_objects(path)


def learn_settings(config, method, **options):
    """Merge the learn section, the method section and command line options."""
    settings = dict(config.get('learn') or {})
    method = method or settings.get('method', 'mob')
    settings.update(config.get(method) or {})
    settings.update({key: value for key, value in options.items() if value is not None})
    settings['method'] = method
    return settings


def make_learn_params(settings, threads):
    if settings['method'] not in available_methods():
        raise ValueError('method must be one of {}'.format(', '.join(available_methods())))

    encode = EncodeParams(h_max=settings.get('h_max'), w_max=settings.get('w_max', 1), n_jobs=threads)
    return LearnParams(method=settings['method'], encode=encode, max_outer_iter=settings.get('max_iter', 100),
                       seed=settings.get('seed', 0), init=settings.get('init', 'samples'),
                       theta=settings.get('theta', 0.5), replace_unused=bool(settings.get('replace_unused')))


def threads_setting(config, threads):
    threads = threads if threads is not None else config.get('threads', 1)
    return int(threads)


def output_setting(config, output):
    return Path(output if output is not None else config['output_dir']).expanduser()


def command_options(fn):
    """Options every command shares; configures logging and turns failures into exit code 1."""
    @click.option('--verbosity', default=2, type=click.IntRange(0, 3),
                  help='Verbosity level to use. 0 is silence, 3 is maximum information')
    @click.option('--log-level', default='info', type=click.Choice(LOG_LEVELS),
                  help='Log level to use for printing to stdout')
    @wraps(fn)
    def wrapper(verbosity, log_level, **params):
        set_verbosity(verbosity, log_level)
        config = load_config()
        try:
            register(config)
            return fn(config, **params)
        except Exception as e:
            LOGGER.debug(traceback.format_exc())
            LOGGER.error('%s', e)
            sys.exit(1)
    return wrapper


def learn_options(fn):
    options = [
        click.option('--input', 'input_path', required=True, type=click.Path(exists=True, dir_okay=False),
                     help='Sample matrix as a PBM image, one sample per column'),
        click.option('--output', default=None, type=str, help='Output directory'),
        click.option('--method', default=None, type=str, help='Dictionary update method (mob or kprox)'),
        click.option('--theta', default=None, type=float, help='Bernoulli parameter for random dictionaries'),
        click.option('--init', default=None, type=click.Choice(INIT_METHODS), help='Dictionary initialisation'),
        click.option('--init-dict', default=None, type=click.Path(exists=True, dir_okay=False),
                     help='Start from the dictionary stored in this PBM image'),
        click.option('--seed', default=None, type=int, help='Random seed'),
        click.option('--h-max', default=None, type=int, help='Maximum coefficient toggles per sample'),
        click.option('--w-max', default=None, type=int, help='Residual weight at which coding stops'),
        click.option('--max-iter', default=None, type=int, help='Maximum outer iterations'),
        click.option('--threads', default=None, type=int, envvar='BMF_THREADS', help='Encoder threads'),
        click.option('--replace-unused/--keep-unused', default=None,
                     help='Replace atoms no sample uses with residual columns'),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _settings(config, params, *extra):
    options = {key: params[key] for key in ('theta', 'init', 'seed', 'h_max', 'w_max', 'max_iter',
                                            'replace_unused') + extra}
    return learn_settings(config, params['method'], **options)


@click.group()
@click.version_option(version=bindl.__version__)
def cli():
    pass


@cli.command(help='Learn a model with a fixed number of atoms')
@learn_options
@click.option('--atoms', '-p', default=None, type=int, help='Number of atoms p')
@command_options
def learn(config, input_path, atoms, init_dict, threads, output, **params):
    settings = _settings(config, params)
    learn_params = make_learn_params(settings, threads_setting(config, threads))

    X = load_samples(input_path)
    D0 = read_dictionary(init_dict, X.rows) if init_dict is not None else None
    if atoms is None and D0 is None:
        raise ValueError('--atoms is required unless --init-dict is given')
    p = D0.cols if atoms is None else atoms

    runner = Runner(output_setting(config, output), 'learn')
    model, report = runner.learn(X, p, learn_params, D0=D0)
    click.echo('h(E)={} bits_per_sample={:.3f} converged={}'.format(
        model.residual_weight, report.bits_per_sample, model.converged))


@cli.command(help='Select the number of atoms by forward selection')
@learn_options
@click.option('--p0', default=None, type=int, help='Initial number of atoms')
@click.option('--max-atoms', default=None, type=int, help='Stop growing at this many atoms')
@click.option('--tiles', default=None, type=int, help='Rank-one tiles tried per growth step')
@command_options
def select(config, input_path, init_dict, threads, output, **params):
    settings = _settings(config, params, 'p0', 'max_atoms', 'tiles')
    learn_params = make_learn_params(settings, threads_setting(config, threads))

    X = load_samples(input_path)
    D0 = read_dictionary(init_dict, X.rows) if init_dict is not None else None
    p0 = D0.cols if D0 is not None and params['p0'] is None else settings.get('p0', 1)
    select_params = SelectParams(p0=p0, learn=learn_params, max_atoms=settings.get('max_atoms'),
                                 tiles=settings.get('tiles', constants.DEFAULT_SELECT_TILES))

    runner = Runner(output_setting(config, output), 'select')
    result = runner.select(X, select_params, D0=D0)
    click.echo('p={} bits_per_sample={:.3f} baseline_bits_per_sample={:.3f}'.format(
        result.model.p, result.report.bits_per_sample, result.baseline.bits_per_sample))


@cli.command(help='Encode samples against a stored dictionary')
@click.argument('model_dir', type=click.Path(exists=True, file_okay=False))
@click.option('--input', 'input_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='Samples to encode as a PBM image')
@click.option('--output', default=None, type=str, help='Output directory for A.pbm and E.pbm')
@click.option('--h-max', default=None, type=int, help='Maximum coefficient toggles per sample')
@click.option('--w-max', default=None, type=int, help='Residual weight at which coding stops')
@click.option('--threads', default=None, type=int, envvar='BMF_THREADS', help='Encoder threads')
@click.option('--warm-start', default=False, is_flag=True, help='Start from the stored coefficients')
@command_options
def encode(config, model_dir, input_path, output, h_max, w_max, threads, warm_start):
    settings = learn_settings(config, None, h_max=h_max, w_max=w_max)
    params = EncodeParams(h_max=settings.get('h_max'), w_max=settings.get('w_max', 1),
                          n_jobs=threads_setting(config, threads))

    X = load_samples(input_path)
    runner = Runner(output_setting(config, output), 'encode')
    A, E, report = runner.encode(model_dir, X, params, warm_start=warm_start)
    click.echo('h(E)={} bits_per_sample={:.3f}'.format(E.weight(), report.bits_per_sample))


@cli.command(help='Render atoms, samples or residuals of a model as a PBM mosaic')
@click.argument('model_dir', type=click.Path(exists=True, file_okay=False))
@click.option('--tile', required=True, type=str, help='Tile size HxW with H*W = m')
@click.option('--grid-cols', default=8, type=int, help='Tiles per mosaic row')
@click.option('--source', default='atoms', type=click.Choice(MOSAIC_SOURCES), help='Columns to render')
@click.option('--count', default=None, type=int, help='Render only the first COUNT columns')
@click.option('--output', required=True, type=str, help='Output PBM file')
@command_options
def mosaic(config, model_dir, tile, grid_cols, source, count, output):
    image = mosaic_to_file(model_dir, output, parse_tile(tile), grid_cols, source=source, count=count)
    LOGGER.info('Wrote %s x %s mosaic to %s', image.rows, image.cols, output)


@cli.command(help='Generate samples from a random planted model')
@click.option('--rows', '-m', required=True, type=int, help='Sample length m')
@click.option('--cols', '-n', required=True, type=int, help='Number of samples n')
@click.option('--atoms', '-p', required=True, type=int, help='Number of planted atoms p')
@click.option('--coeff-weight', default=1, type=int, help='Atoms per sample')
@click.option('--noise', default=0.0, type=float, help='Bit flip probability')
@click.option('--atom-density', default=0.5, type=float, help='Probability of a set bit in a planted atom')
@click.option('--seed', default=0, type=int, help='Random seed')
@click.option('--output', default=None, type=str, help='Output directory for X.pbm, D.pbm and A.pbm')
@command_options
def synth(config, rows, cols, atoms, coeff_weight, noise, atom_density, seed, output):
    output = output_setting(config, output)
    X, _, _ = synth_to_dir(output, rows, cols, atoms, coeff_weight, noise, seed, atom_density=atom_density)
    LOGGER.info('Wrote %s planted samples to %s', X.cols, str(output))


@cli.command(help='Turn an image or a digit stack into a PBM sample matrix')
@click.option('--input', 'input_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='PBM/PGM image, or a .npy N x H x W digit stack with --digits')
@click.option('--output', required=True, type=str, help='Output PBM file')
@click.option('--tile', default=None, type=str, help='Block size HxW for image input')
@click.option('--threshold', default=128, type=int, help='Gray level at or above which a pixel is set')
@click.option('--digits', default=False, is_flag=True, help='Input is a digit stack')
@click.option('--size', default=17, type=int, help='Side of the resampled digits')
@command_options
def prepare(config, input_path, output, tile, threshold, digits, size):
    tile = parse_tile(tile) if tile is not None else None
    X = prepare_samples(input_path, tile=tile, threshold=threshold, digits=digits, size=size)
    save_pbm(X, output)
    LOGGER.info('Wrote %s samples of length %s to %s', X.cols, X.rows, output)
    click.echo('m={} n={} density={:.4f}'.format(X.rows, X.cols, X.weight() / max(1, X.rows * X.cols)))


if __name__ == "__main__":
    cli(auto_envvar_prefix='BINDL')
