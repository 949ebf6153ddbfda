# ----------------------------------------------------------------------------
# Copyright (c) 2019, q2-hieralign development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import os
from unittest import TestCase, main
from unittest.mock import patch
from warnings import filterwarnings

import numpy as np

from q2_hieralign.benchgen import (
    BenchmarkCorpus, SCHEMA_KINDS, sample_schema, simulate_corpus,
    synth_piece)
from q2_hieralign.utilities import (
    THREADS_VARIABLE, NO_SEED, RESULT_COLUMNS, run_alignment, run_benchmark,
    _resolve_n_jobs, _benchmark_queries, _query_seed)


filterwarnings("ignore", category=UserWarning)

ALIGN_PARAMS = {'alpha': 0.5, 'gamma': 1.0, 'jump_penalty': 0.0,
                'allow_backward_jumps': True, 'allow_forward_jumps': True,
                'jump_policy': 'structured'}

ALL_SCHEMAS = list(SCHEMA_KINDS)


def mean_accuracy(results, algo, schema, collar=0.0):
    rows = results[(results['piece'] == 'mean') & (results['algo'] == algo)
                   & (results['schema'] == schema)
                   & (results['collar'] == collar)]
    return float(rows['accuracy'].iloc[0])


class ResolveJobsTests(TestCase):

    def test_positive(self):
        with patch.dict(os.environ, {}, clear=True):
            self.assertEqual(_resolve_n_jobs(3), 3)

    def test_all_cores_is_positive(self):
        with patch.dict(os.environ, {}, clear=True):
            self.assertGreaterEqual(_resolve_n_jobs(-1), 1)

    def test_zero(self):
        with self.assertRaisesRegex(ValueError, 'nonzero'):
            _resolve_n_jobs(0)

    def test_environment_cap(self):
        with patch.dict(os.environ, {THREADS_VARIABLE: '2'}):
            self.assertEqual(_resolve_n_jobs(8), 2)
            self.assertEqual(_resolve_n_jobs(1), 1)

    def test_bad_environment_cap(self):
        with patch.dict(os.environ, {THREADS_VARIABLE: 'many'}):
            with self.assertRaisesRegex(ValueError, THREADS_VARIABLE):
                _resolve_n_jobs(1)


class RunAlignmentTests(TestCase):

    def setUp(self):
        self.piece = synth_piece(0, 4, 6, 0.1)

    def test_every_algorithm(self):
        for algo in ('subseq', 'jump', 'hier'):
            aln = run_alignment(self.piece.sheet, self.piece.performance,
                                algo, **ALIGN_PARAMS)
            self.assertEqual(aln.algo, algo)
            self.assertEqual(aln.line_sequence, [0, 1, 2, 3])

    def test_unknown_algorithm(self):
        with self.assertRaisesRegex(ValueError, 'Unknown alignment'):
            run_alignment(self.piece.sheet, self.piece.performance, 'dtw',
                          **ALIGN_PARAMS)


class QuerySeedTests(TestCase):

    def test_reproducible(self):
        self.assertEqual(_query_seed(3, 1), _query_seed(3, 1))
        self.assertIsInstance(_query_seed(0, NO_SEED), int)

    def test_distinct_per_piece_and_sample(self):
        seeds = {_query_seed(index, seed)
                 for index in range(20) for seed in range(5)}
        self.assertEqual(len(seeds), 100)


class RunBenchmarkTests(TestCase):

    def test_queries(self):
        corpus = simulate_corpus(2, 6, 2, 0.1, 0)
        queries = _benchmark_queries(corpus, ['none', 'repeat1'], 3)
        self.assertEqual(
            [(index, name, kind, seed)
             for index, name, _, kind, seed in queries],
            [(0, 'piece000', 'none', NO_SEED), (0, 'piece000', 'repeat1', 0),
             (0, 'piece000', 'repeat1', 1), (0, 'piece000', 'repeat1', 2),
             (1, 'piece001', 'none', NO_SEED), (1, 'piece001', 'repeat1', 0),
             (1, 'piece001', 'repeat1', 1), (1, 'piece001', 'repeat1', 2)])

    def test_row_counts(self):
        corpus = simulate_corpus(2, 6, 4, 0.1, 0)
        results, details = run_benchmark(
            corpus, ['subseq', 'hier'], ['none', 'repeat1'], 2, [0.0, 0.5],
            ALIGN_PARAMS)
        self.assertEqual(list(results.columns), RESULT_COLUMNS)
        per_query = results[results['piece'] != 'mean']
        self.assertEqual(len(per_query), 2 * (1 + 2) * 2 * 2)
        self.assertEqual((results['piece'] == 'mean').sum(), 2 * 2 * 2)
        self.assertTrue((per_query['status'] == 'ok').all())
        self.assertEqual(len(details), 6)
        self.assertEqual([d['jumps'] for d in details
                          if d['schema'] == 'none'], [[], []])

    def test_pieces_get_their_own_schemas(self):
        corpus = simulate_corpus(6, 8, 2, 0.1, 0)
        _, details = run_benchmark(corpus, ['subseq'], ['repeat2'], 2,
                                   [0.0], ALIGN_PARAMS)
        for seed in range(2):
            jumps = {tuple(d['jumps']) for d in details if d['seed'] == seed}
            self.assertGreater(len(jumps), 1)

    def test_parallel_matches_serial(self):
        corpus = simulate_corpus(3, 6, 4, 0.1, 5)
        args = (corpus, ['jump', 'hier'], ['repeat1', 'dsalfine'], 2,
                [0.0, 1.0], ALIGN_PARAMS, 0.1)
        serial, _ = run_benchmark(*args, n_jobs=1)
        parallel, _ = run_benchmark(*args, n_jobs=3)
        self.assertTrue(serial.equals(parallel))

    def test_invalid_query_is_recorded(self):
        corpus = BenchmarkCorpus({'big': synth_piece(0, 8, 4, 0.1),
                                  'small': synth_piece(1, 4, 4, 0.1)})
        with self.assertWarnsRegex(UserWarning, 'could not be built'):
            results, details = run_benchmark(
                corpus, ['subseq', 'hier'], ['repeat3'], 2, [0.0, 0.5],
                ALIGN_PARAMS)
        small = results[results['piece'] == 'small']
        self.assertEqual(len(small), 2 * 2 * 2)
        self.assertTrue((small['status'] == 'failed').all())
        self.assertTrue(small['accuracy'].isna().all())
        self.assertTrue(
            small['message'].str.contains('at least 5 lines').all())
        big = results[results['piece'] == 'big']
        self.assertEqual(len(big), 2 * 2 * 2)
        self.assertTrue((big['status'] == 'ok').all())
        aggregate = results[results['piece'] == 'mean']
        self.assertEqual(len(aggregate), 2 * 2)
        for algo in ('subseq', 'hier'):
            for collar in (0.0, 0.5):
                scored = big[(big['algo'] == algo)
                             & (big['collar'] == collar)]
                self.assertAlmostEqual(
                    mean_accuracy(results, algo, 'repeat3', collar),
                    float(np.mean(scored['accuracy'])))
        self.assertEqual([d['preds'] for d in details
                          if d['name'] == 'small'], [[], []])

    def test_planted_jumps_are_recovered(self):
        corpus = simulate_corpus(20, 8, 8, 0.1, 0)
        results, _ = run_benchmark(corpus, ['hier'], ALL_SCHEMAS, 5, [0.0],
                                   ALIGN_PARAMS, n_jobs=4)
        for schema in ('none', 'repeat1', 'repeat2', 'repeat3'):
            self.assertGreaterEqual(
                mean_accuracy(results, 'hier', schema), 0.99, schema)

        # a one-line D.S. repeat nets zero against the jump penalty, so at
        # most that line may be lost
        queries = results[(results['schema'] == 'dsalfine')
                          & (results['piece'] != 'mean')]
        self.assertEqual(len(queries), 20 * 5)
        for _, row in queries.iterrows():
            index = int(row['piece'][len('piece'):])
            first, fine, sign = sample_schema(
                8, 'dsalfine',
                _query_seed(index, int(row['seed']))).boundaries
            if fine - first >= 2:
                self.assertGreaterEqual(row['accuracy'], 0.99,
                                        (row['piece'], row['seed']))
            else:
                self.assertGreaterEqual(row['accuracy'],
                                        1 - 1 / (sign + 1) - 1e-9,
                                        (row['piece'], row['seed']))

    def test_hier_follows_repeats_under_corruption(self):
        corpus = simulate_corpus(20, 8, 8, 0.1, 100)
        results, _ = run_benchmark(corpus, ['subseq', 'hier'], ALL_SCHEMAS,
                                   5, [0.5], ALIGN_PARAMS, corruption=0.1,
                                   n_jobs=4)
        for schema in ('repeat1', 'repeat2', 'repeat3', 'dsalfine'):
            self.assertGreater(mean_accuracy(results, 'hier', schema, 0.5),
                               mean_accuracy(results, 'subseq', schema, 0.5),
                               schema)
        self.assertLessEqual(
            mean_accuracy(results, 'subseq', 'none', 0.5)
            - mean_accuracy(results, 'hier', 'none', 0.5), 0.05)

    def test_aggregate_is_mean_of_queries(self):
        corpus = simulate_corpus(2, 6, 4, 0.1, 3)
        results, _ = run_benchmark(corpus, ['subseq'], ['repeat1'], 2,
                                   [0.0], ALIGN_PARAMS)
        queries = results[results['piece'] != 'mean']
        self.assertAlmostEqual(mean_accuracy(results, 'subseq', 'repeat1'),
                               float(np.mean(queries['accuracy'])))


if __name__ == '__main__':
    main()
