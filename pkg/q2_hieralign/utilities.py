# ----------------------------------------------------------------------------
# Copyright (c) 2019, q2-hieralign development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import os
import json
import time
import warnings
from os.path import join

import q2templates
import pandas as pd
import numpy as np
import pkg_resources
from joblib import Parallel, delayed, cpu_count

from ._version import __version__
from .bscore import AlignConfig
from .dtw import subsequence_align
from .hierarchical import hierarchical_align
from .jumpdtw import JumpConfig, jump_dtw_align
from .benchgen import (JumpSchema, sample_schema, splice_piece, splice_times,
                       corrupt_performance)
from .metrics import (alignment_to_timeline, accuracy_with_collar,
                      dumps_reports)
from .visuals import render_strips


TEMPLATES = pkg_resources.resource_filename('q2_hieralign', 'assets')

THREADS_VARIABLE = 'HIERALIGN_THREADS'

ALGORITHMS = ('subseq', 'jump', 'hier')

RESULT_COLUMNS = ['piece', 'schema', 'seed', 'algo', 'collar', 'accuracy',
                  'status', 'message']

# seed recorded for the unsampled 'none' schema and for aggregate rows
NO_SEED = -1


def _resolve_n_jobs(n_jobs):
    '''Effective worker count, capped by $HIERALIGN_THREADS.'''
    if n_jobs == 0:
        raise ValueError('n_jobs must be nonzero.')
    workers = n_jobs if n_jobs > 0 else max(cpu_count() + 1 + n_jobs, 1)
    cap = os.environ.get(THREADS_VARIABLE)
    if cap:
        try:
            cap = int(cap)
        except ValueError:
            cap = 0
        if cap < 1:
            raise ValueError('%s must be a positive integer, found %r.'
                             % (THREADS_VARIABLE,
                                os.environ[THREADS_VARIABLE]))
        workers = min(workers, cap)
    return workers


def _run_manifest(command, inputs, config, seeds, started):
    return {'command': command,
            'inputs': inputs,
            'config': config,
            'seeds': list(seeds),
            'version': __version__,
            'wall_clock_seconds': round(time.time() - started, 3)}


def _write_json(path, obj):
    with open(path, 'w') as fh:
        fh.write(json.dumps(obj, indent=2) + '\n')


def run_alignment(sheet, performance, algo, alpha, gamma, jump_penalty,
                  allow_backward_jumps, allow_forward_jumps, jump_policy,
                  n_jobs=1):
    if algo == 'subseq':
        return subsequence_align(sheet, performance)
    if algo == 'jump':
        return jump_dtw_align(sheet, performance, JumpConfig(jump_penalty))
    if algo == 'hier':
        cfg = AlignConfig(alpha=alpha, gamma=gamma,
                          allow_backward_jumps=allow_backward_jumps,
                          allow_forward_jumps=allow_forward_jumps,
                          jump_policy=jump_policy)
        return hierarchical_align(sheet, performance, cfg, n_jobs)
    raise ValueError('Unknown alignment algorithm %r. Choose from %s.'
                     % (algo, ', '.join(ALGORITHMS)))


def _benchmark_queries(corpus, schemas, seeds):
    queries = []
    for index, (name, piece) in enumerate(corpus):
        for kind in schemas:
            if kind == 'none':
                queries.append((index, name, piece, kind, NO_SEED))
            else:
                queries.extend((index, name, piece, kind, s)
                               for s in range(seeds))
    return queries


def _query_seed(index, seed):
    '''Random seed of sample ``seed`` for the ``index``-th corpus piece.'''
    state = np.random.SeedSequence([index, seed + 1]).generate_state(1)
    return int(state[0])


def _query_schema(piece, kind, seed):
    n_lines = len(piece.truth)
    if kind == 'none':
        return JumpSchema('none', (), n_lines, None)
    return sample_schema(n_lines, kind, seed)


def _failed_rows(name, kind, seed, algos, collars, message):
    return [(name, kind, seed, algo, c, np.nan, 'failed', message)
            for algo in algos for c in collars]


def _run_query(index, name, piece, kind, seed, algos, collars, align_params,
               corruption):
    '''Splice one piece, align it with every algorithm and score it.'''
    detail = {'name': name, 'schema': kind, 'seed': seed, 'rows': [],
              'preds': [], 'truth': piece.truth, 'reports': {}, 'jumps': []}
    query_seed = _query_seed(index, seed)
    try:
        schema = _query_schema(piece, kind, query_seed)
        query = splice_piece(piece, schema)
        performance = query.performance
        if corruption > 0:
            performance = corrupt_performance(performance, corruption,
                                              query_seed)
    except ValueError as e:
        warnings.warn('%s (%s, seed %d) could not be built: %s'
                      % (name, kind, seed, e), UserWarning)
        detail['rows'] = _failed_rows(name, kind, seed, algos, collars,
                                      str(e))
        return detail
    rows, preds, reports = [], [], {}
    for algo in algos:
        try:
            aln = run_alignment(query.sheet, performance, algo,
                                **align_params)
            pred = alignment_to_timeline(aln, query.timemap)
            scored = [accuracy_with_collar(pred, query.truth, c)
                      for c in collars]
        except ValueError as e:
            warnings.warn('%s (%s, seed %d) failed with %s: %s'
                          % (name, kind, seed, algo, e), UserWarning)
            rows.extend(_failed_rows(name, kind, seed, [algo], collars,
                                     str(e)))
            continue
        preds.append((algo, pred))
        reports[algo] = json.loads(dumps_reports(scored))
        rows.extend((name, kind, seed, algo, r.collar, r.accuracy,
                     'ok' if r.error is None else 'undefined',
                     r.error or '')
                    for r in scored)
    detail.update(rows=rows, preds=preds, truth=query.truth,
                  reports=reports, jumps=splice_times(piece.truth, schema))
    return detail


def _aggregate(results):
    scored = results[results['status'] == 'ok']
    means = scored.groupby(['algo', 'schema', 'collar'])['accuracy'].mean()
    means = means.reset_index()
    means['piece'] = 'mean'
    means['seed'] = NO_SEED
    means['status'] = 'aggregate'
    means['message'] = ''
    return means[RESULT_COLUMNS]


def run_benchmark(corpus, algos, schemas, seeds, collars, align_params,
                  corruption=0.0, n_jobs=1):
    '''Run every (piece, schema, seed) query of a corpus.

    Returns the sorted results table, aggregate rows last, and the
    per-query details used for reports and strips.
    '''
    queries = _benchmark_queries(corpus, schemas, seeds)
    details = Parallel(n_jobs=_resolve_n_jobs(n_jobs), prefer='threads')(
        delayed(_run_query)(index, name, piece, kind, seed, algos, collars,
                            align_params, corruption)
        for index, name, piece, kind, seed in queries)
    results = pd.DataFrame([row for d in details for row in d['rows']],
                           columns=RESULT_COLUMNS)
    results = results.sort_values(
        ['piece', 'schema', 'seed', 'algo', 'collar']).reset_index(drop=True)
    aggregate = _aggregate(results).sort_values(['algo', 'schema', 'collar'])
    results = pd.concat([results, aggregate], ignore_index=True)
    details = sorted(details, key=lambda d: (d['name'], d['schema'],
                                             d['seed']))
    return results, details


def _summarize_benchmark(results, collar):
    aggregate = results[(results['piece'] == 'mean')
                        & (results['collar'] == collar)]
    for _, row in aggregate.iterrows():
        print('Mean accuracy {0} on {1} (collar {2}s): {3:.4f}'.format(
            row['algo'], row['schema'], collar, row['accuracy']))


def _write_strips(path, preds, truth, jumps=None):
    with open(path, 'w') as fh:
        fh.write(render_strips(preds, truth, jumps))


def _visualize(output_dir, title, tables=None, images=None, summary=None,
               downloads=None):
    tables = {name: q2templates.df_to_html(df, index=False)
              for name, df in (tables or {}).items()}
    index = join(TEMPLATES, 'index.html')
    q2templates.render(index, output_dir, context={
        'title': title,
        'summary': summary,
        'tables': tables,
        'images': images or [],
        'downloads': downloads or []})
