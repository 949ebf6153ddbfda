# ----------------------------------------------------------------------------
# Copyright (c) 2019, q2-hieralign development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

from dataclasses import dataclass

import numpy as np

from .bscore import SegmentAlignment
from .dtw import (STEPS, WEIGHTS, pairwise_cost, concatenate_fragments,
                  _segment_path, _as_array)


# trace codes; steps use 1..len(steps)
UNREACHABLE = -1
START = 0


@dataclass(frozen=True)
class JumpConfig:
    jump_penalty: float = 0.0
    steps: tuple = STEPS
    weights: tuple = WEIGHTS

    def __post_init__(self):
        if not self.jump_penalty >= 0:
            raise ValueError('jump_penalty must be non-negative, found %r.'
                             % self.jump_penalty)
        if len(self.steps) != len(self.weights):
            raise ValueError('Every step needs exactly one weight.')

    def to_dict(self):
        return {'jump_penalty': self.jump_penalty}


@dataclass(frozen=True)
class JumpResult:
    D: np.ndarray
    trace: np.ndarray
    jump_source: np.ndarray
    first_rows: np.ndarray
    last_rows: np.ndarray
    steps: tuple

    @property
    def jump_code(self):
        return len(self.steps) + 1


def fragment_bounds(lengths):
    ends = np.cumsum(lengths)
    return ends - np.asarray(lengths), ends - 1


def jump_dtw(C, first_rows, last_rows, jcfg=None):
    '''Subsequence DTW with jumps from any line's last row to any line's
    first row, consuming one reference column.

    ``jump_source[j]`` is the row every jump landing in column ``j`` comes
    from.
    '''
    if jcfg is None:
        jcfg = JumpConfig()
    C = _as_array(C)
    first_rows = np.asarray(first_rows, dtype=int)
    last_rows = np.asarray(last_rows, dtype=int)
    n_rows, n_cols = C.shape
    steps, weights = jcfg.steps, jcfg.weights
    n_cand = len(steps) + 2
    jump = n_cand - 1

    D = np.full((n_rows, n_cols), np.inf)
    trace = np.full((n_rows, n_cols), UNREACHABLE, dtype=int)
    jump_source = np.full(n_cols, -1, dtype=int)
    rows = np.arange(n_rows)

    for j in range(n_cols):
        cand = np.full((n_cand, n_rows), np.inf)
        cand[START, 0] = C[0, j]
        for s, ((a, b), w) in enumerate(zip(steps, weights), start=1):
            if j < b or a >= n_rows:
                continue
            cand[s, a:] = D[:n_rows - a, j - b] + w * C[a:, j]
        if j > 0:
            src = last_rows[np.argmin(D[last_rows, j - 1])]
            origin = D[src, j - 1] + jcfg.jump_penalty
            if np.isfinite(origin):
                jump_source[j] = src
                cand[jump, first_rows] = origin + 1 * C[first_rows, j]
        best = np.argmin(cand, axis=0)
        D[:, j] = cand[best, rows]
        trace[:, j] = np.where(np.isfinite(D[:, j]), best, UNREACHABLE)

    return JumpResult(D, trace, jump_source, first_rows, last_rows,
                      tuple(steps))


def jump_backtrace(result, end_row):
    i, j = end_row, result.D.shape[1] - 1
    if result.trace[i, j] == UNREACHABLE:
        raise ValueError('Row %d of the last column is unreachable.' % i)
    path = [(i, j)]
    while True:
        code = result.trace[i, j]
        if code == START:
            break
        if code == result.jump_code:
            i, j = int(result.jump_source[j]), j - 1
        else:
            a, b = result.steps[code - 1]
            i, j = i - a, j - b
        path.append((i, j))
    path.reverse()
    return path


def jump_dtw_align(fragments, perf, jcfg=None):
    if jcfg is None:
        jcfg = JumpConfig()
    if len(fragments) == 0:
        raise ValueError('At least one sheet music line is required.')
    columns, row_lines = concatenate_fragments(fragments)
    first_rows, last_rows = fragment_bounds([len(f) for f in fragments])
    result = jump_dtw(pairwise_cost(columns, perf.columns),
                      first_rows, last_rows, jcfg)
    final = result.D[last_rows, -1]
    if not np.isfinite(final).any():
        raise ValueError(
            'No line of the sheet music can end at the last performance '
            'column.')
    end_row = int(last_rows[np.argmin(final)])
    path = jump_backtrace(result, end_row)
    line_ids = [f.line_id for f in fragments]
    return SegmentAlignment(_segment_path(path, row_lines, line_ids),
                            float(result.D[end_row, -1]), algo='jump',
                            config=jcfg.to_dict())
