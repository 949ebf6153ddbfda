# ----------------------------------------------------------------------------
# Copyright (c) 2019, q2-hieralign development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from .bscore import AlignConfig, SegmentAlignment
from .dtw import pairwise_cost, subsequence_dtw, recover_start_positions


EMPTY = -1

# back_kind values
ORIGIN = -1
SKIP = 0
MATCH = 1

# back_line value of a match that starts a path
FRESH = -1


@dataclass(frozen=True)
class PAvg:
    '''Mean best subsequence score over all lines that can be matched.'''
    value: float

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class SegmentMatrices:
    C_seg: np.ndarray
    T_seg: np.ndarray
    D_seg: np.ndarray
    R_lower: np.ndarray
    R_upper: np.ndarray
    back_kind: np.ndarray
    back_line: np.ndarray

    @property
    def shape(self):
        return self.D_seg.shape


def _line_scores(columns, perf_columns):
    result = subsequence_dtw(pairwise_cost(columns, perf_columns))
    return result.last_row.copy(), recover_start_positions(result)


def build_segment_matrices(fragments, perf, n_jobs=1):
    '''Stack the last row and start columns of every line's subsequence DTW.

    Returns ``(C_seg, T_seg, p_avg)``. Lines too long to fit the
    performance anywhere have an all-infinite row and do not count towards
    ``p_avg``.
    '''
    if len(fragments) == 0:
        raise ValueError('At least one sheet music line is required.')
    rows = Parallel(n_jobs=n_jobs, prefer='threads')(
        delayed(_line_scores)(f.columns, perf.columns) for f in fragments)
    C_seg = np.vstack([r[0] for r in rows])
    T_seg = np.vstack([r[1] for r in rows])
    best = [row.min() for row in C_seg if np.isfinite(row).any()]
    if not best:
        raise ValueError(
            'None of the %d sheet music lines fits into a performance of %d '
            'columns.' % (len(fragments), len(perf)))
    return C_seg, T_seg, PAvg(float(np.mean(best)))


def jump_penalty(cfg, p_avg):
    p_avg = float(p_avg)
    if cfg.gamma == 0 or p_avg == 0:
        return 0.0
    return -cfg.gamma * p_avg


def _rule_candidates(n, i, r_lo, r_hi, cfg, penalty):
    '''(allowed, weight, penalty) of every transition rule, in rule order.

    Arguments broadcast, so the same rules serve single transitions and
    whole DP columns.
    '''
    rules = [(n + 1 == i, 1.0, 0.0)]
    if cfg.jump_policy == 'none':
        return rules
    rules.append((n == i, cfg.alpha, 0.0))
    rules.append((n + 2 == i, cfg.alpha, 0.0))
    seen = r_lo != EMPTY
    if cfg.jump_policy == 'structured':
        backward = seen & (r_lo <= i) & (i <= r_hi)
        forward = (seen & (i == r_hi + 1) & (i != n) & (i != n + 1)
                   & (i != n + 2))
    else:
        backward = i <= n
        forward = i > n + 1
    rules.append((backward & cfg.allow_backward_jumps, 1.0, penalty))
    rules.append((forward & cfg.allow_forward_jumps, 1.0, penalty))
    return rules


def transition_weight(n, i, r_lo, r_hi, cfg, p_avg, cost=-1.0):
    '''Weight and penalty for matching line ``i`` after line ``n``.

    Of all rules that apply, the one giving the lowest ``w * cost + p`` is
    returned (earliest rule on ties); ``None`` means the move is
    disallowed.
    '''
    penalty = jump_penalty(cfg, p_avg)
    best = None
    for allowed, w, p in _rule_candidates(
            np.int64(n), np.int64(i), np.int64(r_lo), np.int64(r_hi),
            cfg, penalty):
        if allowed and (best is None or w * cost + p < best[0]):
            best = (w * cost + p, (w, p))
    return None if best is None else best[1]


def segment_dp(C_seg, T_seg, cfg, p_avg):
    C_seg = np.asarray(C_seg, dtype=float)
    T_seg = np.asarray(T_seg, dtype=int)
    if C_seg.ndim != 2 or C_seg.shape != T_seg.shape:
        raise ValueError(
            'C_seg and T_seg must be matrices of equal shape, found %r and '
            '%r.' % (C_seg.shape, T_seg.shape))
    n_lines, n_cols = C_seg.shape
    penalty = jump_penalty(cfg, p_avg)

    D = np.zeros((n_lines, n_cols))
    R_lower = np.full((n_lines, n_cols), EMPTY, dtype=int)
    R_upper = np.full((n_lines, n_cols), EMPTY, dtype=int)
    back_kind = np.full((n_lines, n_cols), ORIGIN, dtype=int)
    back_line = np.full((n_lines, n_cols), FRESH, dtype=int)

    lines = np.arange(n_lines)
    src_lines = lines[:, None]
    dst_lines = lines[None, :]

    for j in range(1, n_cols):
        # skip
        D[:, j] = D[:, j - 1]
        R_lower[:, j] = R_lower[:, j - 1]
        R_upper[:, j] = R_upper[:, j - 1]
        back_kind[:, j] = SKIP

        c = C_seg[:, j]
        k = T_seg[:, j]
        valid = np.isfinite(c) & (k >= 0) & (k <= j)
        if not valid.any():
            continue
        c = np.where(valid, c, 0.0)

        # a path with no earlier match costs 0 and has seen nothing
        value = 0.0 + (1.0 * c + 0.0)
        source = np.full(n_lines, FRESH)
        new_lo = lines.copy()
        new_hi = lines.copy()

        resumed = valid & (k > 0)
        if resumed.any():
            src_col = np.where(resumed, k - 1, 0)
            src_D = D[:, src_col]
            src_lo = R_lower[:, src_col]
            src_hi = R_upper[:, src_col]
            seen = src_lo != EMPTY
            per_source = np.full((n_lines, n_lines), np.inf)
            for allowed, w, p in _rule_candidates(
                    src_lines, dst_lines, src_lo, src_hi, cfg, penalty):
                cand = np.where(allowed & seen,
                                src_D + (w * c[None, :] + p), np.inf)
                per_source = np.minimum(per_source, cand)
            best_n = np.argmin(per_source, axis=0)
            best = per_source[best_n, lines]
            take = resumed & (best < value)
            value = np.where(take, best, value)
            source = np.where(take, best_n, source)
            new_lo = np.where(
                take, np.minimum(src_lo[best_n, lines], lines), new_lo)
            new_hi = np.where(
                take, np.maximum(src_hi[best_n, lines], lines), new_hi)

        better = valid & (value < D[:, j])
        D[better, j] = value[better]
        R_lower[better, j] = new_lo[better]
        R_upper[better, j] = new_hi[better]
        back_kind[better, j] = MATCH
        back_line[better, j] = source[better]

    return SegmentMatrices(C_seg, T_seg, D, R_lower, R_upper,
                           back_kind, back_line)


def backtrace_matches(matrices, end_line):
    '''(line index, ref_start, ref_end) matches on the path ending at
    ``end_line`` in the last column.'''
    i, j = end_line, matrices.shape[1] - 1
    matches = []
    while j > 0:
        kind = matrices.back_kind[i, j]
        if kind == SKIP:
            j -= 1
            continue
        k = int(matrices.T_seg[i, j])
        matches.append((i, k, j))
        n = matrices.back_line[i, j]
        if n == FRESH:
            break
        i, j = int(n), k - 1
    matches.reverse()
    return matches


def hierarchical_align(fragments, perf, cfg=None, n_jobs=1):
    if cfg is None:
        cfg = AlignConfig()
    C_seg, T_seg, p_avg = build_segment_matrices(fragments, perf, n_jobs)
    matrices = segment_dp(C_seg, T_seg, cfg, p_avg)
    last = matrices.D_seg[:, -1]
    end_line = int(np.argmin(last))
    line_ids = [f.line_id for f in fragments]
    matches = [(line_ids[i], k, j)
               for i, k, j in backtrace_matches(matrices, end_line)]
    config = dict(cfg.to_dict(), p_avg=p_avg.value)
    return SegmentAlignment(matches, float(last[end_line]), algo='hier',
                            config=config)


def replay_alignment(alignment, C_seg, T_seg, cfg, p_avg, fragments=None):
    '''Recompute the score and line ranges of a segment sequence.

    Returns ``(score, ranges)`` where ``ranges[m]`` is the (lowest, highest)
    line index seen after match ``m``. Raises ValueError if the sequence is
    not a legal path through the segment matrices.
    '''
    C_seg = np.asarray(C_seg, dtype=float)
    T_seg = np.asarray(T_seg, dtype=int)
    if fragments is None:
        index = {i: i for i in range(C_seg.shape[0])}
    else:
        index = {f.line_id: i for i, f in enumerate(fragments)}
    score = 0.0
    ranges = []
    prev = None
    prev_end = -1
    for m, (line_id, start, end) in enumerate(alignment.matches):
        if line_id not in index:
            raise ValueError('Match %d refers to unknown line %r.'
                             % (m, line_id))
        i = index[line_id]
        if end >= C_seg.shape[1] or T_seg[i, end] != start \
                or not np.isfinite(C_seg[i, end]):
            raise ValueError(
                'Match %d (line %r, columns %d-%d) is not a best subsequence '
                'match.' % (m, line_id, start, end))
        if start <= prev_end:
            raise ValueError('Match %d overlaps the previous match.' % m)
        c = C_seg[i, end]
        if prev is None:
            w, p = 1.0, 0.0
            lo, hi = i, i
        else:
            rule = transition_weight(prev, i, lo, hi, cfg, p_avg, cost=c)
            if rule is None:
                raise ValueError(
                    'Match %d moves from line index %d to %d, which is not '
                    'allowed.' % (m, prev, i))
            w, p = rule
            lo, hi = min(lo, i), max(hi, i)
        score = score + (w * c + p)
        ranges.append((lo, hi))
        prev, prev_end = i, end
    return score, ranges
