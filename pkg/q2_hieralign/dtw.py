# ----------------------------------------------------------------------------
# Copyright (c) 2019, q2-hieralign development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

from dataclasses import dataclass

import numpy as np

from .bscore import SegmentAlignment, columns_to_matrix


# step (a, b) advances a query rows and b reference columns; the weight
# multiplies the cost of the arrival cell. Order is the tie-break order.
STEPS = ((1, 1), (1, 2), (2, 1))
WEIGHTS = (1, 1, 2)

NO_START = -1


@dataclass(frozen=True)
class CostMatrix:
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or 0 in values.shape:
            raise ValueError(
                'A cost matrix must be a nonempty 2-D array, found shape %r.'
                % (values.shape,))
        object.__setattr__(self, 'values', values)

    @property
    def rows(self):
        return self.values.shape[0]

    @property
    def cols(self):
        return self.values.shape[1]


@dataclass(frozen=True)
class SubseqResult:
    '''Cumulative cost matrix of a subsequence DTW run.

    ``step_trace[i, j]`` is the index into ``steps`` of the winning incoming
    step, or -1 for row 0 and unreachable cells. ``start_of[i, j]`` is the
    reference column where the optimal path ending at (i, j) starts.
    '''
    D: np.ndarray
    start_of: np.ndarray
    step_trace: np.ndarray
    steps: tuple = STEPS
    weights: tuple = WEIGHTS

    @property
    def last_row(self):
        return self.D[-1]


def pairwise_cost(query_columns, ref_columns):
    '''Negative cosine similarity between every pair of packed columns.

    Pairs involving an all-zero column cost 0.
    '''
    if len(query_columns) == 0 or len(ref_columns) == 0:
        raise ValueError('Query and reference must both be nonempty.')
    X = columns_to_matrix(query_columns).astype(float)
    Y = columns_to_matrix(ref_columns).astype(float)
    inner = X.T @ Y
    # binary columns: squared norms are bit counts, so the product is an
    # integer and its square root is exact for perfect squares
    denom = np.sqrt(np.outer(X.sum(axis=0), Y.sum(axis=0)))
    values = np.zeros_like(inner)
    nonzero = denom > 0
    values[nonzero] = -inner[nonzero] / denom[nonzero]
    return CostMatrix(values)


def _as_array(C):
    if isinstance(C, CostMatrix):
        return C.values
    return CostMatrix(C).values


def subsequence_dtw(C, steps=STEPS, weights=WEIGHTS):
    C = _as_array(C)
    if len(steps) != len(weights):
        raise ValueError('Every step needs exactly one weight.')
    n_rows, n_cols = C.shape
    D = np.full((n_rows, n_cols), np.inf)
    start_of = np.full((n_rows, n_cols), NO_START, dtype=int)
    step_trace = np.full((n_rows, n_cols), -1, dtype=int)
    D[0] = C[0]
    start_of[0] = np.arange(n_cols)
    cols = np.arange(n_cols)

    for i in range(1, n_rows):
        cand = np.full((len(steps), n_cols), np.inf)
        cand_start = np.full((len(steps), n_cols), NO_START, dtype=int)
        for s, ((a, b), w) in enumerate(zip(steps, weights)):
            if a > i or b >= n_cols:
                continue
            cand[s, b:] = D[i - a, :n_cols - b] + w * C[i, b:]
            cand_start[s, b:] = start_of[i - a, :n_cols - b]
        best = np.argmin(cand, axis=0)
        D[i] = cand[best, cols]
        reachable = np.isfinite(D[i])
        step_trace[i] = np.where(reachable, best, -1)
        start_of[i] = np.where(reachable, cand_start[best, cols], NO_START)

    return SubseqResult(D, start_of, step_trace, tuple(steps), tuple(weights))


def recover_start_positions(result):
    '''Start column of the optimal path ending at each last-row column.

    Unreachable end columns carry -1.
    '''
    return result.start_of[-1].copy()


def backtrace_path(result, end_col):
    '''Cells of the optimal path ending at the last row, ``end_col``.'''
    i, j = result.D.shape[0] - 1, end_col
    if not np.isfinite(result.D[i, j]):
        raise ValueError('Column %d of the last row is unreachable.' % j)
    path = [(i, j)]
    while i > 0:
        a, b = result.steps[result.step_trace[i, j]]
        i, j = i - a, j - b
        path.append((i, j))
    path.reverse()
    return path


def walk_start_positions(result):
    '''start_of recovered by walking every backtrace explicitly.'''
    starts = np.full(result.D.shape[1], NO_START, dtype=int)
    for j in np.flatnonzero(np.isfinite(result.last_row)):
        starts[j] = backtrace_path(result, j)[0][1]
    return starts


def _segment_path(path, row_lines, line_ids):
    '''Cut a warping path into per-line matches.

    A new match starts whenever the line changes or the query row fails to
    advance (a jump back into the same line).
    '''
    matches = []
    prev_row = None
    for i, j in path:
        line = row_lines[i]
        if prev_row is None or row_lines[prev_row] != line or i <= prev_row:
            matches.append([line_ids[line], j, j])
        else:
            matches[-1][2] = j
        prev_row = i
    return [tuple(m) for m in matches]


def concatenate_fragments(fragments):
    '''Concatenated columns plus the fragment index of every query row.'''
    columns = [c for f in fragments for c in f.columns]
    row_lines = np.repeat(np.arange(len(fragments)),
                          [len(f) for f in fragments])
    return columns, row_lines


def subsequence_align(fragments, perf):
    '''Subsequence DTW of the whole sheet, cut at line boundaries.'''
    if len(fragments) == 0:
        raise ValueError('At least one sheet music line is required.')
    columns, row_lines = concatenate_fragments(fragments)
    result = subsequence_dtw(pairwise_cost(columns, perf.columns))
    last_row = result.last_row
    if not np.isfinite(last_row).any():
        raise ValueError(
            'The sheet music (%d columns) cannot be aligned to a performance '
            'of %d columns.' % (len(columns), len(perf)))
    end = int(np.argmin(last_row))
    path = backtrace_path(result, end)
    line_ids = [f.line_id for f in fragments]
    return SegmentAlignment(_segment_path(path, row_lines, line_ids),
                            float(last_row[end]), algo='subseq', config={})
