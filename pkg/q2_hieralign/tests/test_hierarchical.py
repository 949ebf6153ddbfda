# ----------------------------------------------------------------------------
# Copyright (c) 2019, q2-hieralign development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

from unittest import TestCase, main

import numpy as np
import numpy.testing as npt

from q2_hieralign.bscore import (
    pack_column, BootlegFragment, PerformanceSequence, AlignConfig,
    SegmentAlignment)
from q2_hieralign.hierarchical import (
    EMPTY, PAvg, build_segment_matrices, transition_weight, segment_dp,
    hierarchical_align, replay_alignment, backtrace_matches)


NO_JUMPS = AlignConfig(alpha=0.5, gamma=1.0, allow_backward_jumps=False,
                       allow_forward_jumps=False)
JUMPS = AlignConfig(alpha=0.5, gamma=1.0)


def one_hot(n):
    return [pack_column({b}) for b in range(n)]


def make_lines(n_lines, cols):
    columns = one_hot(n_lines * cols)
    return [BootlegFragment(n, columns[n * cols:(n + 1) * cols])
            for n in range(n_lines)]


def perform(fragments, order):
    return PerformanceSequence(
        [c for line in order for c in fragments[line].columns])


def allowed_moves(n, i, lo, hi, cfg, penalty):
    '''(w, p) of every move from line n to line i after lines lo..hi.'''
    moves = []
    if i == n + 1:
        moves.append((1.0, 0.0))
    if cfg.jump_policy == 'none':
        return moves
    if i == n or i == n + 2:
        moves.append((cfg.alpha, 0.0))
    if cfg.jump_policy == 'structured':
        backward = lo <= i <= hi
        forward = i == hi + 1 and i not in (n, n + 1, n + 2)
    else:
        backward = i <= n
        forward = i > n + 1
    if (backward and cfg.allow_backward_jumps) or \
            (forward and cfg.allow_forward_jumps):
        moves.append((1.0, penalty))
    return moves


def enumerate_sequences(C_seg, T_seg, cfg, p_avg):
    '''Best score and every optimal segment sequence, by exhaustive
    enumeration of legal segment sequences with exact line ranges.'''
    n_lines, n_cols = C_seg.shape
    penalty = -cfg.gamma * p_avg.value if cfg.gamma else 0.0
    segments = [(i, int(T_seg[i, j]), j)
                for j in range(1, n_cols) for i in range(n_lines)
                if np.isfinite(C_seg[i, j]) and 0 <= T_seg[i, j] <= j]
    best = [0.0, [()]]

    def extend(seq, score, prev, lo, hi, prev_end):
        for i, k, j in segments:
            if k <= prev_end:
                continue
            c = C_seg[i, j]
            if prev is None:
                w, p = 1.0, 0.0
            else:
                moves = allowed_moves(prev, i, lo, hi, cfg, penalty)
                if not moves:
                    continue
                w, p = min(moves, key=lambda m: m[0] * c + m[1])
            total = score + (w * c + p)
            new_seq = seq + ((i, k, j),)
            if total < best[0]:
                best[0], best[1] = total, [new_seq]
            elif total == best[0]:
                best[1].append(new_seq)
            new_lo = i if prev is None else min(lo, i)
            new_hi = i if prev is None else max(hi, i)
            extend(new_seq, total, i, new_lo, new_hi, j)

    extend((), 0.0, None, EMPTY, EMPTY, -1)
    return best[0], best[1]


def random_instance(rng, n_lines, n_cols):
    C_seg = rng.integers(-5, 2, size=(n_lines, n_cols)).astype(float)
    T_seg = np.zeros((n_lines, n_cols), dtype=int)
    for i in range(n_lines):
        for j in range(n_cols):
            k = j - int(rng.integers(2, 5))
            if k < 0:
                C_seg[i, j] = np.inf
                k = -1
            T_seg[i, j] = k
    return C_seg, T_seg


class TransitionWeightTests(TestCase):

    def test_next_line(self):
        for r_lo, r_hi in [(EMPTY, EMPTY), (0, 3), (3, 3)]:
            self.assertEqual(
                transition_weight(3, 4, r_lo, r_hi, JUMPS, PAvg(-9.0)),
                (1.0, 0.0))

    def test_same_line(self):
        self.assertEqual(transition_weight(3, 3, 0, 3, JUMPS, PAvg(-9.0)),
                         (0.5, 0.0))

    def test_skip_one_line(self):
        self.assertEqual(transition_weight(3, 5, 0, 3, JUMPS, PAvg(-9.0)),
                         (0.5, 0.0))

    def test_backward_jump(self):
        self.assertEqual(transition_weight(5, 1, 0, 5, JUMPS, PAvg(-9.0)),
                         (1.0, 9.0))

    def test_forward_jump_to_leading_edge(self):
        self.assertEqual(transition_weight(2, 7, 0, 6, JUMPS, PAvg(-9.0)),
                         (1.0, 9.0))

    def test_forward_jump_past_leading_edge(self):
        self.assertIsNone(transition_weight(2, 8, 0, 6, JUMPS, PAvg(-9.0)))

    def test_backward_jump_outside_seen_range(self):
        self.assertIsNone(transition_weight(5, 1, 2, 5, JUMPS, PAvg(-9.0)))

    def test_no_jump_from_empty_range(self):
        self.assertIsNone(
            transition_weight(5, 1, EMPTY, EMPTY, JUMPS, PAvg(-9.0)))

    def test_jumps_disabled(self):
        self.assertIsNone(
            transition_weight(5, 1, 0, 5, NO_JUMPS, PAvg(-9.0)))
        self.assertIsNone(
            transition_weight(2, 7, 0, 6, NO_JUMPS, PAvg(-9.0)))

    def test_cheapest_rule_wins(self):
        # i = n is both a slow-down (alpha) and a backward jump (penalty)
        self.assertEqual(transition_weight(2, 2, 0, 2, JUMPS, PAvg(-9.0),
                                           cost=-1.0), (0.5, 0.0))
        self.assertEqual(transition_weight(2, 2, 0, 2, JUMPS, PAvg(-1.0),
                                           cost=-30.0), (1.0, 1.0))

    def test_zero_gamma(self):
        cfg = AlignConfig(gamma=0.0)
        self.assertEqual(transition_weight(5, 1, 0, 5, cfg, PAvg(-9.0)),
                         (1.0, 0.0))

    def test_policy_none(self):
        cfg = AlignConfig(jump_policy='none')
        self.assertEqual(transition_weight(3, 4, 0, 3, cfg, PAvg(-9.0)),
                         (1.0, 0.0))
        self.assertIsNone(transition_weight(3, 3, 0, 3, cfg, PAvg(-9.0)))
        self.assertIsNone(transition_weight(3, 5, 0, 3, cfg, PAvg(-9.0)))

    def test_agrees_with_move_table(self):
        configs = [JUMPS, NO_JUMPS, AlignConfig(allow_forward_jumps=False),
                   AlignConfig(jump_policy='none'),
                   AlignConfig(jump_policy='arbitrary', alpha=0.25)]
        for cfg in configs:
            for n in range(6):
                for i in range(6):
                    for lo, hi in [(0, 5), (1, 3), (n, n), (0, n)]:
                        for cost in (-1.0, -20.0):
                            moves = allowed_moves(n, i, lo, hi, cfg, 9.0)
                            exp = (min(moves, key=lambda m: m[0] * cost
                                       + m[1]) if moves else None)
                            self.assertEqual(
                                transition_weight(n, i, lo, hi, cfg,
                                                  PAvg(-9.0), cost=cost),
                                exp, (cfg, n, i, lo, hi, cost))

    def test_policy_arbitrary(self):
        cfg = AlignConfig(jump_policy='arbitrary')
        self.assertEqual(transition_weight(1, 6, 0, 1, cfg, PAvg(-9.0)),
                         (1.0, 9.0))
        self.assertEqual(transition_weight(5, 0, 4, 5, cfg, PAvg(-9.0)),
                         (1.0, 9.0))
        cfg = AlignConfig(jump_policy='arbitrary',
                          allow_forward_jumps=False)
        self.assertIsNone(transition_weight(1, 6, 0, 1, cfg, PAvg(-9.0)))


class SegmentMatricesTests(TestCase):

    def test_rows_are_line_scores(self):
        columns = one_hot(14)
        fragments = [BootlegFragment(0, columns[:8]),
                     BootlegFragment(1, columns[8:])]
        C_seg, T_seg, p_avg = build_segment_matrices(
            fragments, PerformanceSequence(columns))
        self.assertEqual(C_seg.shape, (2, 14))
        self.assertEqual(C_seg[0].min(), -8.0)
        self.assertEqual(C_seg[1].min(), -6.0)
        self.assertEqual(T_seg[0, 7], 0)
        self.assertEqual(T_seg[1, 13], 8)
        self.assertEqual(p_avg, PAvg(-7.0))

    def test_identical_fragments(self):
        columns = one_hot(5)
        fragments = [BootlegFragment(n, columns[1:4]) for n in range(3)]
        C_seg, T_seg, _ = build_segment_matrices(
            fragments, PerformanceSequence(columns), n_jobs=2)
        npt.assert_array_equal(C_seg[0], C_seg[1])
        npt.assert_array_equal(C_seg[1], C_seg[2])
        npt.assert_array_equal(T_seg[0], T_seg[2])

    def test_no_lines(self):
        with self.assertRaisesRegex(ValueError, 'At least one'):
            build_segment_matrices([], PerformanceSequence(one_hot(3)))

    def test_no_line_fits(self):
        fragments = [BootlegFragment(0, one_hot(9))]
        with self.assertRaisesRegex(ValueError, 'fits'):
            build_segment_matrices(
                fragments, PerformanceSequence(one_hot(2)))


class SegmentDPTests(TestCase):

    def test_single_line_fresh_start(self):
        matrices = segment_dp([[-1.0, -2.0, -3.0]], [[0, 0, 0]], JUMPS,
                              PAvg(-3.0))
        npt.assert_array_equal(matrices.D_seg, [[0.0, -2.0, -3.0]])
        self.assertEqual(backtrace_matches(matrices, 0), [(0, 0, 2)])

    def test_first_column_is_zero(self):
        rng = np.random.default_rng(5)
        C_seg, T_seg = random_instance(rng, 3, 9)
        matrices = segment_dp(C_seg, T_seg, JUMPS, PAvg(-3.0))
        npt.assert_array_equal(matrices.D_seg[:, 0], 0.0)
        npt.assert_array_equal(matrices.R_lower[:, 0], EMPTY)

    def test_unfit_rows_never_match(self):
        C_seg = np.array([[np.inf, np.inf, np.inf], [0.0, -1.0, -1.0]])
        T_seg = np.array([[-1, -1, -1], [0, 0, 1]])
        matrices = segment_dp(C_seg, T_seg, JUMPS, PAvg(-1.0))
        npt.assert_array_equal(matrices.D_seg[0], 0.0)

    def test_shape_mismatch(self):
        with self.assertRaisesRegex(ValueError, 'equal shape'):
            segment_dp(np.zeros((2, 3)), np.zeros((2, 4)), JUMPS, PAvg(-1))

    def _check_invariants(self, matrices, n_lines):
        D = matrices.D_seg
        self.assertTrue((D[:, 1:] <= D[:, :-1]).all())
        seen = matrices.R_lower != EMPTY
        npt.assert_array_equal(seen, matrices.R_upper != EMPTY)
        lo, hi = matrices.R_lower[seen], matrices.R_upper[seen]
        self.assertTrue((lo <= hi).all())
        self.assertTrue(((lo >= 0) & (hi <= n_lines - 1)).all())

    def test_matches_enumeration_without_jumps(self):
        rng = np.random.default_rng(42)
        configs = [NO_JUMPS,
                   AlignConfig(alpha=1.0, allow_backward_jumps=False,
                               allow_forward_jumps=False),
                   AlignConfig(jump_policy='none')]
        for _ in range(200):
            n_lines = int(rng.integers(1, 5))
            n_cols = int(rng.integers(2, 13))
            C_seg, T_seg = random_instance(rng, n_lines, n_cols)
            p_avg = PAvg(-float(rng.integers(1, 5)))
            for cfg in configs:
                matrices = segment_dp(C_seg, T_seg, cfg, p_avg)
                self._check_invariants(matrices, n_lines)
                end = int(np.argmin(matrices.D_seg[:, -1]))
                score = matrices.D_seg[end, -1]
                best, optima = enumerate_sequences(C_seg, T_seg, cfg, p_avg)
                self.assertEqual(score, best)
                if len(optima) == 1:
                    self.assertEqual(
                        tuple(backtrace_matches(matrices, end)), optima[0])

    def test_never_beats_enumeration_with_jumps(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            n_lines = int(rng.integers(1, 5))
            n_cols = int(rng.integers(2, 13))
            C_seg, T_seg = random_instance(rng, n_lines, n_cols)
            p_avg = PAvg(-float(rng.integers(1, 5)))
            matrices = segment_dp(C_seg, T_seg, JUMPS, p_avg)
            self._check_invariants(matrices, n_lines)
            end = int(np.argmin(matrices.D_seg[:, -1]))
            score = matrices.D_seg[end, -1]
            best, _ = enumerate_sequences(C_seg, T_seg, JUMPS, p_avg)
            self.assertGreaterEqual(score, best)
            aln = SegmentAlignment(backtrace_matches(matrices, end), score)
            replayed, ranges = replay_alignment(aln, C_seg, T_seg, JUMPS,
                                                p_avg)
            self.assertEqual(replayed, score)
            for (i, k, j), (lo, hi) in zip(aln.matches, ranges):
                self.assertEqual(matrices.R_lower[i, j], lo)
                self.assertEqual(matrices.R_upper[i, j], hi)


class HierarchicalAlignTests(TestCase):

    def test_planted_repeat(self):
        fragments = make_lines(4, 8)
        perf = perform(fragments, [0, 1, 0, 1, 2, 3])
        aln = hierarchical_align(fragments, perf, JUMPS)
        self.assertEqual(aln.line_sequence, [0, 1, 0, 1, 2, 3])
        self.assertEqual(list(aln.matches),
                         [(line, 8 * n, 8 * n + 7)
                          for n, line in enumerate([0, 1, 0, 1, 2, 3])])
        # six lines of -8 plus one jump penalty of 8
        self.assertEqual(aln.score, -40.0)
        self.assertEqual(aln.algo, 'hier')
        self.assertEqual(aln.config['p_avg'], -8.0)

    def test_planted_repeat_is_optimal(self):
        fragments = make_lines(4, 4)
        perf = perform(fragments, [0, 1, 0, 1, 2, 3])
        C_seg, T_seg, p_avg = build_segment_matrices(fragments, perf)
        best, optima = enumerate_sequences(C_seg, T_seg, JUMPS, p_avg)
        aln = hierarchical_align(fragments, perf, JUMPS)
        self.assertEqual(aln.score, best)
        self.assertEqual(len(optima), 1)
        self.assertEqual(list(aln.matches), list(optima[0]))

    def test_in_order_performance(self):
        fragments = make_lines(5, 4)
        perf = perform(fragments, range(5))
        aln = hierarchical_align(fragments, perf, NO_JUMPS)
        self.assertEqual(aln.line_sequence, [0, 1, 2, 3, 4])
        self.assertEqual(aln.score, -20.0)

    def test_performance_starts_mid_piece(self):
        fragments = make_lines(8, 4)
        perf = perform(fragments, [2, 3, 4, 5])
        aln = hierarchical_align(fragments, perf, JUMPS)
        self.assertEqual(aln.line_sequence, [2, 3, 4, 5])
        self.assertEqual(aln.matches[0], (2, 0, 3))

    def test_line_ids_are_reported(self):
        fragments = [BootlegFragment(10 + f.line_id, f.columns)
                     for f in make_lines(3, 4)]
        aln = hierarchical_align(fragments, perform(fragments, range(3)))
        self.assertEqual(aln.line_sequence, [10, 11, 12])

    def test_without_jumps_moves_are_local(self):
        fragments = make_lines(6, 4)
        perf = perform(fragments, [0, 1, 2, 3, 1, 2, 3, 4, 5])
        aln = hierarchical_align(fragments, perf, NO_JUMPS)
        steps = np.diff(aln.line_sequence)
        self.assertTrue(np.isin(steps, [0, 1, 2]).all())

    def test_policy_none_only_advances(self):
        fragments = make_lines(4, 4)
        perf = perform(fragments, [0, 1, 0, 1, 2, 3])
        aln = hierarchical_align(fragments, perf,
                                 AlignConfig(jump_policy='none'))
        self.assertTrue((np.diff(aln.line_sequence) == 1).all())

    def test_policy_arbitrary_follows_repeat(self):
        fragments = make_lines(4, 4)
        perf = perform(fragments, [0, 1, 0, 1, 2, 3])
        aln = hierarchical_align(fragments, perf,
                                 AlignConfig(jump_policy='arbitrary'))
        self.assertEqual(aln.line_sequence, [0, 1, 0, 1, 2, 3])

    def test_replay_tracks_seen_range(self):
        fragments = make_lines(4, 4)
        perf = perform(fragments, [0, 1, 0, 1, 2, 3])
        aln = hierarchical_align(fragments, perf, JUMPS)
        C_seg, T_seg, p_avg = build_segment_matrices(fragments, perf)
        score, ranges = replay_alignment(aln, C_seg, T_seg, JUMPS, p_avg,
                                         fragments)
        self.assertEqual(score, aln.score)
        self.assertEqual(ranges, [(0, 0), (0, 1), (0, 1), (0, 1), (0, 2),
                                  (0, 3)])

    def test_replay_rejects_illegal_move(self):
        fragments = make_lines(4, 4)
        perf = perform(fragments, [0, 3])
        C_seg, T_seg, p_avg = build_segment_matrices(fragments, perf)
        aln = SegmentAlignment([(0, 0, 3), (3, 4, 7)], -8.0)
        with self.assertRaisesRegex(ValueError, 'not allowed'):
            replay_alignment(aln, C_seg, T_seg, JUMPS, p_avg)

    def test_scaling_keeps_line_sequence(self):
        fragments = make_lines(4, 4)
        perf = perform(fragments, [0, 1, 0, 1, 2, 3])
        C_seg, T_seg, p_avg = build_segment_matrices(fragments, perf)
        sequences = []
        for scale in (1.0, 3.0):
            matrices = segment_dp(C_seg * scale, T_seg, JUMPS,
                                  PAvg(p_avg.value * scale))
            end = int(np.argmin(matrices.D_seg[:, -1]))
            sequences.append([i for i, _, _ in
                              backtrace_matches(matrices, end)])
        self.assertEqual(sequences[0], sequences[1])


if __name__ == '__main__':
    main()
