"""Model order selection by forward growth of the dictionary.

Starting from an order-p0 model, each step fits rank-one tiles to the current
residual, appends one as a new atom with its coefficient row, re-learns from
that warm start and measures the total codelength. The search stops at the
first order whose candidate tiles all fail to shorten the description and
returns the model before it.
"""
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from bindl.core import constants
from bindl.core.bindl_logger import LOGGER
from bindl.core.bitmat import PackedBits, append_column, append_row, popcount, residual, weight
from bindl.core.codelength import baseline_codelength, model_codelength
from bindl.core.learner import LearnParams, initial_dictionary, learn
from bindl.methods.kprox.proximus import proximus_rank1, rank_one_residual

TRAJECTORY_COLUMNS = ('p', 'L_D', 'L_A', 'L_E', 'total', 'bits_per_sample', 'wall_time_seconds')


@dataclass(frozen=True)
class SelectParams:
    p0: int = 1
    learn: LearnParams = field(default_factory=LearnParams)
    max_atoms: Optional[int] = None
    tiles: int = constants.DEFAULT_SELECT_TILES

    def __post_init__(self):
        if self.p0 < 1:
            raise ValueError('p0 must be >= 1')
        if self.max_atoms is not None and self.max_atoms < self.p0:
            raise ValueError('max_atoms must be >= p0')
        if self.tiles < 1:
            raise ValueError('tiles must be >= 1')


@dataclass(frozen=True)
class SelectionStep:
    p: int
    report: object
    seconds: float

    def as_row(self):
        row = {'p': self.p}
        row.update(self.report.as_dict())
        row['wall_time_seconds'] = self.seconds
        return row


@dataclass
class SelectionResult:
    model: object
    report: object
    baseline: object
    trajectory: list


def rank_one_seed(E, column=None):
    """Residual column ``column`` (default: the heaviest) and the columns that overlap it in the majority."""
    if column is None:
        column = int(np.argmax(E.col_weights()))
    u0 = E.column(column)
    overlap = popcount(E.col_words & u0.words[None, :]).sum(axis=1, dtype=np.int64)
    return u0, PackedBits.from_bits(2 * overlap > weight(u0))


def seed_columns(E, count):
    """Indices of up to ``count`` distinct residual columns, heaviest first."""
    picked, seen = [], set()
    for j in np.argsort(-E.col_weights(), kind='stable'):
        key = E.col_words[j].tobytes()
        if key in seen:
            continue
        seen.add(key)
        picked.append(int(j))
        if len(picked) == count:
            break
    return picked


def _append_tile(D, A, E, d, a):
    return append_column(D, d), append_row(A, a.to_bits()), rank_one_residual(E, d, a)


def extension_candidates(D, A, E, count=1):
    """Grown models (D, A, E), one per distinct rank-one tile, shortest description first.

    Tile i is the Proximus fit of E seeded at the i-th heaviest distinct residual
    column. Equal codelengths keep the heavier seed first.
    """
    grown, seen = [], set()
    for column in seed_columns(E, count):
        u0, v0 = rank_one_seed(E, column)
        d, a = proximus_rank1(E, u0, v0)
        key = (d.words.tobytes(), a.words.tobytes())
        if key in seen:
            continue
        seen.add(key)
        grown.append(_append_tile(D, A, E, d, a))
    return sorted(grown, key=lambda model: model_codelength(*model).total)


def extend_model(D, A, E):
    """Append the rank-one tile seeded at the heaviest residual column; returns the grown (D, A, E)."""
    return extension_candidates(D, A, E)[0]


def forward_select(X, params=SelectParams(), D0=None, callbacks=()):
    """Grow the model one atom at a time until the total codelength stops dropping.

    Each growth step re-learns from up to ``params.tiles`` candidate tiles and
    keeps the first one that shortens the description. When none does, the
    shortest of them is the rejected last step of the trajectory.
    """
    baseline = baseline_codelength(X)
    start = time.perf_counter()

    D0 = initial_dictionary(X, params.p0, params.learn) if D0 is None else D0
    model = learn(X, D0, params.learn, callbacks=callbacks)
    report = model_codelength(model.D, model.A, model.E)
    trajectory = [SelectionStep(model.p, report, time.perf_counter() - start)]
    _announce(trajectory[-1], callbacks)

    while params.max_atoms is None or model.p < params.max_atoms:
        start = time.perf_counter()
        best, best_report = None, None
        candidates = extension_candidates(model.D, model.A, model.E, params.tiles)
        for attempt, (D, A, E) in enumerate(candidates[:params.tiles], start=1):
            if constants.DEBUG:
                assert E == residual(X, D, A), 'rank-one extension broke E = X ⊕ D⊗A'

            candidate = learn(X, D, params.learn, A0=A, callbacks=callbacks)
            candidate_report = model_codelength(candidate.D, candidate.A, candidate.E)
            if best is None or candidate_report.total < best_report.total:
                best, best_report = candidate, candidate_report
            if candidate_report.total < report.total:
                break
            LOGGER.debug('Tile %s at p=%s gave %s bits, no shorter than %s', attempt, candidate.p,
                         candidate_report.total, report.total)

        trajectory.append(SelectionStep(best.p, best_report, time.perf_counter() - start))
        _announce(trajectory[-1], callbacks)

        if best_report.total >= report.total:
            break
        model, report = best, best_report

    LOGGER.info('Selected p=%s at %s bits per sample (empty model: %s)', model.p,
                '{:.3f}'.format(report.bits_per_sample), '{:.3f}'.format(baseline.bits_per_sample))
    return SelectionResult(model=model, report=report, baseline=baseline, trajectory=trajectory)


def _announce(step, callbacks):
    LOGGER.info('p=%s: L=%s bits (D=%s A=%s E=%s)', step.p, step.report.total,
                step.report.L_D, step.report.L_A, step.report.L_E)
    for callback in callbacks:
        callback.on_select_step(step)
