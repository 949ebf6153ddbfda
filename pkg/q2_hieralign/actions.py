# ----------------------------------------------------------------------------
# Copyright (c) 2019, q2-hieralign development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import os
import time
import warnings
from os.path import join

import pandas as pd

from . import bscore as bs
from . import benchgen
from .metrics import (alignment_to_timeline, accuracy_with_collar,
                      score_following_timeline, dumps_reports)
from .visuals import benchmark_svg
from .utilities import (run_alignment, run_benchmark, _resolve_n_jobs,
                        _run_manifest, _write_json, _write_strips,
                        _summarize_benchmark, _visualize)


defaults = {
    'algo': 'hier',
    'alpha': 0.5,
    'gamma': 1.0,
    'jump_penalty': 0.0,
    'allow_backward_jumps': True,
    'allow_forward_jumps': True,
    'jump_policy': 'structured',
    'schema': 'repeat1',
    'schemas': ['none', 'repeat1', 'repeat2', 'repeat3', 'dsalfine'],
    'algos': ['subseq', 'jump', 'hier'],
    'seed': 0,
    'seeds': 5,
    'collar': 0.5,
    'collars': [0.0, 0.5, 1.0],
    'corruption': 0.0,
    'n_pieces': 20,
    'n_lines': 8,
    'columns_per_line': 8,
    'fill_density': 0.1,
    'n_jobs': 1
}


def align(sheet: bs.SheetMusic,
          performance: bs.PerformanceSequence,
          timemap: bs.TimeMap,
          algo: str = defaults['algo'],
          alpha: float = defaults['alpha'],
          gamma: float = defaults['gamma'],
          jump_penalty: float = defaults['jump_penalty'],
          allow_backward_jumps: bool = defaults['allow_backward_jumps'],
          allow_forward_jumps: bool = defaults['allow_forward_jumps'],
          jump_policy: str = defaults['jump_policy'],
          n_jobs: int = defaults['n_jobs']) -> (bs.SegmentAlignment,
                                                bs.LineTimeline):
    if len(timemap) != len(performance):
        raise ValueError(
            'The time map has %d timestamps but the performance has %d '
            'columns.' % (len(timemap), len(performance)))
    alignment = run_alignment(
        sheet, performance, algo, alpha=alpha, gamma=gamma,
        jump_penalty=jump_penalty,
        allow_backward_jumps=allow_backward_jumps,
        allow_forward_jumps=allow_forward_jumps, jump_policy=jump_policy,
        n_jobs=_resolve_n_jobs(n_jobs))
    timeline = alignment_to_timeline(alignment, timemap)
    if len(timeline) == 0:
        warnings.warn('No sheet music line could be matched to the '
                      'performance; the timeline is empty.', UserWarning)
        return alignment, timeline
    return alignment, score_following_timeline(timeline, sheet)


def synthesize(piece: benchgen.ScorePiece,
               schema: str = defaults['schema'],
               seed: int = defaults['seed'],
               corruption: float = defaults['corruption']) -> (
                   benchgen.ScorePiece, benchgen.JumpSchema):
    n_lines = len(piece.truth)
    if schema == 'none':
        jump_schema = benchgen.JumpSchema('none', (), n_lines, seed)
    else:
        jump_schema = benchgen.sample_schema(n_lines, schema, seed)
    spliced = benchgen.splice_piece(piece, jump_schema)
    if corruption > 0:
        spliced = benchgen.ScorePiece(
            spliced.sheet,
            benchgen.corrupt_performance(spliced.performance, corruption,
                                         seed),
            spliced.timemap, spliced.truth)
    return spliced, jump_schema


def simulate_corpus(n_pieces: int = defaults['n_pieces'],
                    n_lines: int = defaults['n_lines'],
                    columns_per_line: int = defaults['columns_per_line'],
                    fill_density: float = defaults['fill_density'],
                    seed: int = defaults['seed']) -> benchgen.BenchmarkCorpus:
    return benchgen.simulate_corpus(n_pieces, n_lines, columns_per_line,
                                    fill_density, seed)


def _check_extents(pred, truth):
    if len(pred) == 0:
        warnings.warn('The predicted timeline is empty; every scored '
                      'instant counts as an error.', UserWarning)
    elif pred.start != truth.start or pred.end != truth.end:
        warnings.warn(
            'Predicted timeline spans [%g, %g] s but the ground truth spans '
            '[%g, %g] s; uncovered time counts as an error.'
            % (pred.start, pred.end, truth.start, truth.end), UserWarning)


def _collar_table(reports):
    return pd.DataFrame(
        [(r.collar, r.accuracy, r.scored_duration, len(r.error_intervals))
         for r in reports],
        columns=['Collar (s)', 'Accuracy', 'Scored duration (s)',
                 'Error intervals'])


def evaluate(output_dir: str, predicted: bs.LineTimeline,
             truth: bs.LineTimeline, collars: list = None) -> None:
    started = time.time()
    if collars is None:
        collars = defaults['collars']
    _check_extents(predicted, truth)
    reports = [accuracy_with_collar(predicted, truth, c) for c in collars]
    with open(join(output_dir, 'eval_report.json'), 'w') as fh:
        fh.write(dumps_reports(reports))
    _write_strips(join(output_dir, 'strips.svg'),
                  [('prediction', predicted)], truth)
    _write_json(join(output_dir, 'manifest.json'), _run_manifest(
        'evaluate', {'predicted': 'LineTimeline', 'truth': 'LineTimeline'},
        {'collars': list(collars)}, [], started))
    _visualize(output_dir, 'Alignment accuracy',
               tables={'Accuracy by scoring collar': _collar_table(reports)},
               images=['strips.svg'],
               downloads=['eval_report.json', 'manifest.json'])


def visualize(output_dir: str, truth: bs.LineTimeline,
              predictions: bs.LineTimeline, labels: list = None,
              jump_times: list = None) -> None:
    started = time.time()
    if labels is None:
        labels = ['prediction %d' % (n + 1) for n in range(len(predictions))]
    if len(labels) != len(predictions):
        raise ValueError('Got %d labels for %d predictions.'
                         % (len(labels), len(predictions)))
    for pred in predictions:
        _check_extents(pred, truth)
    _write_strips(join(output_dir, 'strips.svg'),
                  list(zip(labels, predictions)), truth, jump_times)
    _write_json(join(output_dir, 'manifest.json'), _run_manifest(
        'visualize', {'truth': 'LineTimeline',
                      'predictions': list(labels)},
        {'jump_times': list(jump_times or [])}, [], started))
    _visualize(output_dir, 'Alignment error strips', images=['strips.svg'],
               downloads=['manifest.json'])


def benchmark(output_dir: str,
              corpus: benchgen.BenchmarkCorpus,
              algos: list = None,
              schemas: list = None,
              seeds: int = defaults['seeds'],
              collars: list = None,
              alpha: float = defaults['alpha'],
              gamma: float = defaults['gamma'],
              jump_penalty: float = defaults['jump_penalty'],
              corruption: float = defaults['corruption'],
              n_jobs: int = defaults['n_jobs']) -> None:
    started = time.time()
    algos = list(algos or defaults['algos'])
    schemas = list(schemas or defaults['schemas'])
    collars = list(collars or defaults['collars'])
    align_params = {
        'alpha': alpha, 'gamma': gamma, 'jump_penalty': jump_penalty,
        'allow_backward_jumps': defaults['allow_backward_jumps'],
        'allow_forward_jumps': defaults['allow_forward_jumps'],
        'jump_policy': defaults['jump_policy']}
    results, details = run_benchmark(corpus, algos, schemas, seeds, collars,
                                     align_params, corruption, n_jobs)
    results.to_csv(join(output_dir, 'benchmark.csv'), index=False)

    queries_dir = join(output_dir, 'queries')
    os.makedirs(queries_dir, exist_ok=True)
    for d in details:
        stem = '%s_%s_%d' % (d['name'], d['schema'], d['seed'])
        _write_json(join(queries_dir, stem + '.json'), d['reports'])
        if d['preds']:
            _write_strips(join(queries_dir, stem + '.svg'), d['preds'],
                          d['truth'], d['jumps'])

    default_collar = (defaults['collar'] if defaults['collar'] in collars
                      else collars[0])
    with open(join(output_dir, 'benchmark.svg'), 'w') as fh:
        fh.write(benchmark_svg(results, default_collar, algos, schemas))
    _summarize_benchmark(results, default_collar)

    _write_json(join(output_dir, 'manifest.json'), _run_manifest(
        'benchmark', {'corpus': sorted(corpus.pieces)},
        dict(align_params, algos=algos, schemas=schemas, collars=collars,
             corruption=corruption), list(range(seeds)), started))
    aggregate = results[results['piece'] == 'mean'].drop(
        columns=['piece', 'seed', 'status', 'message'])
    _visualize(output_dir, 'Alignment benchmark',
               tables={'Mean accuracy': aggregate},
               images=['benchmark.svg'],
               downloads=['benchmark.csv', 'manifest.json'])
