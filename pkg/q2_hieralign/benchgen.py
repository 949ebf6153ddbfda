# ----------------------------------------------------------------------------
# Copyright (c) 2019, q2-hieralign development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import json
import os
from dataclasses import dataclass

import numpy as np

from .bscore import (
    BootlegFragment, SheetMusic, PerformanceSequence, TimeMap, LineTimeline,
    PackedColumn, N_POSITIONS, load_bscore, save_bscore, load_timemap,
    save_timemap, load_timeline, save_timeline, _dumps)


# number of sampled boundaries per schema
SCHEMA_KINDS = {'none': 0, 'repeat1': 2, 'repeat2': 3, 'repeat3': 4,
                'dsalfine': 3}

SECONDS_PER_COLUMN = 0.5
LINES_PER_PAGE = 6

PIECE_FILES = {'sheet': 'sheet.bscore.json',
               'performance': 'perf.bscore.json',
               'timemap': 'timemap.json',
               'truth': 'gt.json'}


def play_order(kind, boundaries, n_lines):
    '''Half-open line-index intervals played, in performance order.'''
    p = list(boundaries)
    if kind == 'none':
        return [(0, n_lines)]
    if kind == 'dsalfine':
        return [(0, p[2]), (p[0], p[1])]
    k = len(p)
    order = [(0, p[1])]
    order.extend((p[m - 1], p[m + 1]) for m in range(1, k - 1))
    order.append((p[k - 2], n_lines))
    return order


@dataclass(frozen=True)
class JumpSchema:
    kind: str
    boundaries: tuple
    n_lines: int
    seed: int = None

    def __post_init__(self):
        if self.kind not in SCHEMA_KINDS:
            raise ValueError('Unknown jump schema %r. Choose from %s.'
                             % (self.kind, ', '.join(SCHEMA_KINDS)))
        boundaries = tuple(int(b) for b in self.boundaries)
        object.__setattr__(self, 'boundaries', boundaries)
        if len(boundaries) != self.k:
            raise ValueError('Schema %s needs %d boundaries, found %d.'
                             % (self.kind, self.k, len(boundaries)))
        if list(boundaries) != sorted(set(boundaries)):
            raise ValueError('Boundaries must be sorted and distinct: %r.'
                             % (boundaries,))
        if boundaries and not (0 < boundaries[0]
                               and boundaries[-1] < self.n_lines):
            raise ValueError(
                'Boundaries %r must lie strictly between 0 and %d.'
                % (boundaries, self.n_lines))

    @property
    def k(self):
        return SCHEMA_KINDS[self.kind]

    @property
    def play_order(self):
        return play_order(self.kind, self.boundaries, self.n_lines)

    @property
    def line_sequence(self):
        return [line for start, end in self.play_order
                for line in range(start, end)]


def sample_schema(n_lines, kind, seed):
    '''Sample interior boundaries uniformly without replacement.

    Uses numpy's PCG64 generator seeded with ``seed``.
    '''
    if kind not in SCHEMA_KINDS:
        raise ValueError('Unknown jump schema %r. Choose from %s.'
                         % (kind, ', '.join(SCHEMA_KINDS)))
    k = SCHEMA_KINDS[kind]
    if n_lines < k + 1:
        raise ValueError(
            'Schema %s needs at least %d lines, the piece has %d.'
            % (kind, k + 1, n_lines))
    rng = np.random.default_rng(seed)
    boundaries = np.sort(rng.choice(np.arange(1, n_lines), size=k,
                                    replace=False)) if k else []
    return JumpSchema(kind, tuple(int(b) for b in boundaries), n_lines, seed)


def parse_schema(obj):
    try:
        return JumpSchema(obj['kind'], obj['boundaries'], obj['n_lines'],
                          obj.get('seed'))
    except (KeyError, TypeError):
        raise ValueError('A schema file must define "kind", "boundaries" '
                         'and "n_lines".')


def dumps_schema(schema):
    return _dumps({'kind': schema.kind,
                   'boundaries': list(schema.boundaries),
                   'n_lines': schema.n_lines, 'seed': schema.seed})


def load_schema(path):
    with open(path) as fh:
        return parse_schema(json.load(fh))


def save_schema(path, schema):
    with open(path, 'w') as fh:
        fh.write(dumps_schema(schema))


def line_column_spans(gt, timemap):
    '''[first, last) performance columns of every ground-truth segment.

    The ground truth must be free of repeats and its segments must tile the
    performance columns contiguously.
    '''
    if len(gt) == 0:
        raise ValueError('The ground truth timeline is empty.')
    lines = gt.line_sequence
    if len(set(lines)) != len(lines):
        raise ValueError('Ground truth already repeats lines: %r.' % lines)
    times = np.asarray(timemap.times)
    spans = []
    expected = 0
    for n, (start, end, line) in enumerate(gt.segments):
        first = int(np.searchsorted(times, start, side='left'))
        last = int(np.searchsorted(times, end, side='left'))
        if first != expected:
            raise ValueError(
                'Ground truth segment %d (line %d) starts at column %d, '
                'expected column %d.' % (n, line, first, expected))
        if last <= first:
            raise ValueError(
                'Ground truth segment %d (line %d) covers no columns.'
                % (n, line))
        spans.append((line, first, last))
        expected = last
    if expected != len(times):
        raise ValueError(
            'Ground truth covers %d of %d performance columns.'
            % (expected, len(times)))
    return spans


def _interval_windows(gt, schema):
    if schema.n_lines != len(gt):
        raise ValueError(
            'Schema was sampled for %d lines, the ground truth has %d.'
            % (schema.n_lines, len(gt)))
    offset = gt.start
    windows = []
    for a, b in schema.play_order:
        t0, t1 = gt.segments[a][0], gt.segments[b - 1][1]
        windows.append((a, b, offset - t0))
        offset += t1 - t0
    return windows, offset


def splice_times(gt, schema):
    '''Output times at which the spliced performance jumps.'''
    windows, _ = _interval_windows(gt, schema)
    return [gt.segments[a][0] + shift for a, _, shift in windows[1:]]


def splice_performance(perf, timemap, gt, schema):
    if len(timemap) != len(perf):
        raise ValueError(
            'Time map has %d entries for a performance of %d columns.'
            % (len(timemap), len(perf)))
    spans = line_column_spans(gt, timemap)
    if schema.kind == 'none':
        _interval_windows(gt, schema)
        return perf, timemap, gt
    windows, end = _interval_windows(gt, schema)
    columns, times, segments = [], [], []
    for a, b, shift in windows:
        first, last = spans[a][1], spans[b - 1][2]
        columns.extend(perf.columns[first:last])
        times.extend(t + shift for t in timemap.times[first:last])
        segments.extend((s + shift, e + shift, line)
                        for s, e, line in gt.segments[a:b])
    return (PerformanceSequence(columns), TimeMap(times, duration=end),
            LineTimeline(segments))


@dataclass(frozen=True)
class ScorePiece:
    sheet: SheetMusic
    performance: PerformanceSequence
    timemap: TimeMap
    truth: LineTimeline

    def __post_init__(self):
        if not isinstance(self.sheet, SheetMusic):
            raise ValueError('The sheet music file holds a performance.')
        if not isinstance(self.performance, PerformanceSequence):
            raise ValueError('The performance file holds sheet music.')
        if len(self.timemap) != len(self.performance):
            raise ValueError(
                'Time map has %d entries for a performance of %d columns.'
                % (len(self.timemap), len(self.performance)))

    def __iter__(self):
        return iter((self.sheet, self.performance, self.timemap,
                     self.truth))


@dataclass(frozen=True)
class BenchmarkCorpus:
    pieces: dict

    def __post_init__(self):
        if len(self.pieces) == 0:
            raise ValueError('A benchmark corpus needs at least one piece.')

    def __len__(self):
        return len(self.pieces)

    def __iter__(self):
        return iter(sorted(self.pieces.items()))


def splice_piece(piece, schema):
    perf, timemap, truth = splice_performance(
        piece.performance, piece.timemap, piece.truth, schema)
    return ScorePiece(piece.sheet, perf, timemap, truth)


def _random_column(rng, density):
    while True:
        bits = np.flatnonzero(rng.random(N_POSITIONS) < density)
        if len(bits):
            return PackedColumn(int(sum(1 << int(b) for b in bits)))


def synth_piece(seed, n_lines, cols_per_line, fill_density):
    '''Random piece whose performance plays every line once, in order.'''
    if n_lines < 1 or cols_per_line < 1:
        raise ValueError('A piece needs at least one line and one column '
                         'per line.')
    if not 0 < fill_density <= 1:
        raise ValueError('fill_density must be in (0, 1], found %r.'
                         % fill_density)
    rng = np.random.default_rng(seed)
    needed = n_lines * cols_per_line
    seen = set()
    columns = []
    attempts = 0
    while len(columns) < needed:
        column = _random_column(rng, fill_density)
        attempts += 1
        if column.bits in seen:
            if attempts > 100 * needed:
                raise ValueError(
                    'Could not draw %d distinct columns at density %r.'
                    % (needed, fill_density))
            continue
        seen.add(column.bits)
        columns.append(column)

    fragments = []
    for line in range(n_lines):
        top = 150 + (line % LINES_PER_PAGE) * 400
        fragments.append(BootlegFragment(
            line_id=line,
            columns=columns[line * cols_per_line:(line + 1) * cols_per_line],
            page=line // LINES_PER_PAGE, pixel_range=(top, top + 300)))
    n_cols = len(columns)
    line_seconds = cols_per_line * SECONDS_PER_COLUMN
    return ScorePiece(
        SheetMusic(fragments), PerformanceSequence(columns),
        TimeMap(np.arange(n_cols) * SECONDS_PER_COLUMN,
                duration=n_cols * SECONDS_PER_COLUMN),
        LineTimeline([(line * line_seconds, (line + 1) * line_seconds, line)
                      for line in range(n_lines)]))


def corrupt_performance(perf, fraction, seed, density=0.1):
    '''Replace ``fraction`` of the performance columns with random ones.'''
    if not 0 <= fraction <= 1:
        raise ValueError('Corruption fraction must be in [0, 1], found %r.'
                         % fraction)
    rng = np.random.default_rng(seed)
    n_cols = len(perf)
    replaced = rng.choice(n_cols, size=int(round(fraction * n_cols)),
                          replace=False)
    columns = list(perf.columns)
    for j in np.sort(replaced):
        columns[j] = _random_column(rng, density)
    return PerformanceSequence(columns)


def simulate_corpus(n_pieces, n_lines, cols_per_line, fill_density, seed):
    return BenchmarkCorpus({
        'piece%03d' % n: synth_piece(seed + n, n_lines, cols_per_line,
                                     fill_density)
        for n in range(n_pieces)})


def load_piece(path):
    files = {key: os.path.join(path, name)
             for key, name in PIECE_FILES.items()}
    return ScorePiece(load_bscore(files['sheet']),
                      load_bscore(files['performance']),
                      load_timemap(files['timemap']),
                      load_timeline(files['truth']))


def save_piece(path, piece):
    os.makedirs(path, exist_ok=True)
    save_bscore(os.path.join(path, PIECE_FILES['sheet']), piece.sheet)
    save_bscore(os.path.join(path, PIECE_FILES['performance']),
                piece.performance)
    save_timemap(os.path.join(path, PIECE_FILES['timemap']), piece.timemap)
    save_timeline(os.path.join(path, PIECE_FILES['truth']), piece.truth)


def load_corpus(path):
    names = sorted(d for d in os.listdir(path)
                   if os.path.isdir(os.path.join(path, d)))
    return BenchmarkCorpus({name: load_piece(os.path.join(path, name))
                            for name in names})


def save_corpus(path, corpus):
    for name, piece in corpus:
        save_piece(os.path.join(path, name), piece)
