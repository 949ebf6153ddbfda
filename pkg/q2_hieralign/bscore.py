# ----------------------------------------------------------------------------
# Copyright (c) 2019, q2-hieralign development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import json
import re
from dataclasses import dataclass, field

import numpy as np


N_POSITIONS = 62
MAX_BITS = 1 << N_POSITIONS

_HEX = re.compile(r'[0-9a-fA-F]{1,16}')


@dataclass(frozen=True)
class PackedColumn:
    '''One column of a bootleg score.

    Bit b (0 <= b <= 61) is set iff a notehead occupies staff-line position b.
    Bit 0 is the lowest staff-line position.
    '''
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < MAX_BITS:
            raise ValueError(
                'Packed column value %#x does not fit in %d staff-line '
                'positions.' % (self.bits, N_POSITIONS))

    def positions(self):
        return unpack_column(self)

    def to_hex(self):
        return format(self.bits, 'x')


@dataclass(frozen=True)
class BootlegFragment:
    '''A single line of sheet music.'''
    line_id: int
    columns: tuple
    page: int = 0
    pixel_range: tuple = (0, 0)

    def __post_init__(self):
        object.__setattr__(self, 'columns', tuple(self.columns))
        object.__setattr__(self, 'pixel_range', tuple(self.pixel_range))
        if len(self.columns) == 0:
            raise ValueError(
                'Fragment for line %d has no columns.' % self.line_id)
        if len(self.pixel_range) != 2:
            raise ValueError(
                'pixel_range of line %d must be a (top, bottom) pair, found '
                '%r.' % (self.line_id, self.pixel_range))

    def __len__(self):
        return len(self.columns)


@dataclass(frozen=True)
class SheetMusic:
    '''All line fragments of a sheet music PDF, in PDF order.'''
    fragments: tuple

    def __post_init__(self):
        object.__setattr__(self, 'fragments', tuple(self.fragments))
        if len(self.fragments) == 0:
            raise ValueError('Sheet music must contain at least one line.')

    def __len__(self):
        return len(self.fragments)

    def __getitem__(self, index):
        return self.fragments[index]

    def __iter__(self):
        return iter(self.fragments)

    @property
    def line_ids(self):
        return [f.line_id for f in self.fragments]


@dataclass(frozen=True)
class PerformanceSequence:
    '''Bootleg score computed from a transcribed performance.'''
    columns: tuple

    def __post_init__(self):
        object.__setattr__(self, 'columns', tuple(self.columns))
        if len(self.columns) == 0:
            raise ValueError(
                'A performance must contain at least one column.')

    def __len__(self):
        return len(self.columns)


@dataclass(frozen=True)
class TimeMap:
    '''Timestamp (seconds) of every performance column.

    ``duration`` optionally records the length of the recording; when absent
    the final timestamp marks the end.
    '''
    times: tuple
    duration: float = None

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        object.__setattr__(self, 'times', times)
        if len(times) == 0:
            raise ValueError('A time map must contain at least one time.')
        if times[0] < 0:
            raise ValueError('Time map starts at a negative time (%r).'
                             % times[0])
        steps = np.diff(times)
        if (steps < 0).any():
            bad = int(np.argmax(steps < 0)) + 1
            raise ValueError(
                'Time map decreases at column %d (%r after %r).'
                % (bad, times[bad], times[bad - 1]))
        if self.duration is not None:
            object.__setattr__(self, 'duration', float(self.duration))
            if self.duration < times[-1]:
                raise ValueError(
                    'Recording duration %r ends before the last column '
                    '(%r).' % (self.duration, times[-1]))

    def __len__(self):
        return len(self.times)

    @property
    def end_time(self):
        return self.times[-1] if self.duration is None else self.duration

    def boundary(self, column):
        '''Start time of ``column``; ``len(self)`` maps to the end time.'''
        if column == len(self.times):
            return self.end_time
        return self.times[column]


@dataclass(frozen=True)
class LineTimeline:
    '''Piecewise-constant map from time to the line being shown.

    ``provenance`` optionally holds a (page, top, bottom) triple for every
    segment.
    '''
    segments: tuple
    provenance: tuple = None

    def __post_init__(self):
        segments = tuple((float(s), float(e), int(line))
                         for s, e, line in self.segments)
        object.__setattr__(self, 'segments', segments)
        for n, (start, end, line) in enumerate(segments):
            if not start < end:
                raise ValueError(
                    'Timeline segment %d is empty or reversed (%r, %r).'
                    % (n, start, end))
            if n > 0 and start < segments[n - 1][1]:
                raise ValueError(
                    'Timeline segment %d starts at %r, before the previous '
                    'segment ends (%r).' % (n, start, segments[n - 1][1]))
        if self.provenance is not None:
            provenance = tuple(tuple(int(v) for v in p)
                               for p in self.provenance)
            if len(provenance) != len(segments):
                raise ValueError(
                    'Expected provenance for %d segments, found %d.'
                    % (len(segments), len(provenance)))
            object.__setattr__(self, 'provenance', provenance)

    def __len__(self):
        return len(self.segments)

    @property
    def start(self):
        return self.segments[0][0]

    @property
    def end(self):
        return self.segments[-1][1]

    @property
    def line_sequence(self):
        return [line for _, _, line in self.segments]


@dataclass(frozen=True)
class SegmentAlignment:
    '''Ordered (line_id, ref_start, ref_end) matches; ref_end is inclusive.'''
    matches: tuple
    score: float
    algo: str = 'hier'
    config: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        matches = tuple((int(line), int(s), int(e))
                        for line, s, e in self.matches)
        object.__setattr__(self, 'matches', matches)
        for n, (_, start, end) in enumerate(matches):
            if start < 0 or end < start:
                raise ValueError(
                    'Match %d has an invalid reference span [%d, %d].'
                    % (n, start, end))
            if n > 0 and start <= matches[n - 1][2]:
                raise ValueError(
                    'Match %d overlaps the previous match (starts at %d, '
                    'previous ends at %d).' % (n, start, matches[n - 1][2]))

    def __len__(self):
        return len(self.matches)

    @property
    def line_sequence(self):
        return [line for line, _, _ in self.matches]


@dataclass(frozen=True)
class AlignConfig:
    alpha: float = 0.5
    gamma: float = 1.0
    allow_backward_jumps: bool = True
    allow_forward_jumps: bool = True
    jump_policy: str = 'structured'

    def __post_init__(self):
        # a fresh start dominates stay/skip moves out of unseen cells
        # only while alpha <= 1
        if not 0 < self.alpha <= 1:
            raise ValueError(
                'alpha must be in (0, 1], found %r.' % self.alpha)
        if not self.gamma >= 0:
            raise ValueError(
                'gamma must be non-negative, found %r.' % self.gamma)
        if self.jump_policy not in JUMP_POLICIES:
            raise ValueError(
                'Unknown jump policy %r. Choose from %s.'
                % (self.jump_policy, ', '.join(JUMP_POLICIES)))

    def to_dict(self):
        return {'alpha': self.alpha, 'gamma': self.gamma,
                'allow_backward_jumps': self.allow_backward_jumps,
                'allow_forward_jumps': self.allow_forward_jumps,
                'jump_policy': self.jump_policy}


JUMP_POLICIES = ('structured', 'none', 'arbitrary')


def pack_column(positions):
    bits = 0
    for b in positions:
        if not 0 <= b < N_POSITIONS:
            raise ValueError(
                'Staff-line position %r is outside [0, %d].'
                % (b, N_POSITIONS - 1))
        bits |= 1 << int(b)
    return PackedColumn(bits)


def unpack_column(column):
    bits = column.bits
    return frozenset(b for b in range(N_POSITIONS) if bits >> b & 1)


def columns_to_matrix(columns):
    '''62 x N binary matrix of a sequence of packed columns.'''
    bits = np.array([c.bits for c in columns], dtype=np.uint64)
    shifts = np.arange(N_POSITIONS, dtype=np.uint64)[:, None]
    return ((bits[None, :] >> shifts) & np.uint64(1)).astype(np.uint8)


def matrix_to_columns(matrix):
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != N_POSITIONS:
        raise ValueError('Expected a %d x N matrix, found shape %r.'
                         % (N_POSITIONS, matrix.shape))
    return tuple(pack_column(np.flatnonzero(col)) for col in matrix.T)


# JSON codecs. Each parse_* accepts the decoded JSON object and raises
# ValueError naming the offending record; each dumps_* returns the canonical
# text so that save(load(f)) is byte-identical for canonical files.

def _parse_column(value, fragment_index, column_index):
    if not isinstance(value, str) or _HEX.fullmatch(value) is None:
        raise ValueError(
            'Malformed hex column %r in fragment %d, column %d.'
            % (value, fragment_index, column_index))
    bits = int(value, 16)
    if bits >= MAX_BITS:
        raise ValueError(
            'Column value %s in fragment %d, column %d sets a bit above '
            'position %d.' % (value, fragment_index, column_index,
                              N_POSITIONS - 1))
    return PackedColumn(bits)


def _parse_fragment(record, index):
    try:
        line_id = record['line_id']
        columns = record['columns']
    except (KeyError, TypeError):
        raise ValueError(
            'Fragment %d must define "line_id" and "columns".' % index)
    if not isinstance(columns, list) or len(columns) == 0:
        raise ValueError('Fragment %d (line %r) has no columns.'
                         % (index, line_id))
    pixel_range = record.get('pixel_range', [0, 0])
    if not isinstance(pixel_range, list) or len(pixel_range) != 2:
        raise ValueError('Fragment %d has a malformed pixel_range %r.'
                         % (index, pixel_range))
    return BootlegFragment(
        line_id=int(line_id),
        columns=[_parse_column(c, index, n) for n, c in enumerate(columns)],
        page=int(record.get('page', 0)),
        pixel_range=tuple(int(v) for v in pixel_range))


def parse_bscore(obj, max_fragments=None):
    '''Decode a bootleg score file into SheetMusic or a PerformanceSequence.

    When ``max_fragments`` is set, only that many fragments are decoded
    (used for quick format sniffing); a SheetMusic of the decoded prefix is
    returned.
    '''
    if not isinstance(obj, dict):
        raise ValueError('A bootleg score file must be a JSON object.')
    kind = obj.get('kind')
    if kind not in ('sheet', 'performance'):
        raise ValueError(
            'Bootleg score "kind" must be "sheet" or "performance", found '
            '%r.' % (kind,))
    records = obj.get('fragments')
    if not isinstance(records, list) or len(records) == 0:
        raise ValueError('A bootleg score file needs at least one fragment.')
    if kind == 'performance':
        if len(records) != 1:
            raise ValueError(
                'A performance file holds exactly one fragment, found %d.'
                % len(records))
        fragment = _parse_fragment(records[0], 0)
        if fragment.line_id != -1:
            raise ValueError(
                'The performance fragment must have line_id -1, found %d.'
                % fragment.line_id)
        return PerformanceSequence(fragment.columns)
    if max_fragments is not None:
        records = records[:max_fragments]
    return SheetMusic([_parse_fragment(r, n) for n, r in enumerate(records)])


def _fragment_record(fragment):
    return {'line_id': fragment.line_id, 'page': fragment.page,
            'pixel_range': list(fragment.pixel_range),
            'columns': [c.to_hex() for c in fragment.columns]}


def bscore_to_dict(score):
    if isinstance(score, PerformanceSequence):
        return {'kind': 'performance', 'fragments': [
            {'line_id': -1, 'page': 0, 'pixel_range': [0, 0],
             'columns': [c.to_hex() for c in score.columns]}]}
    return {'kind': 'sheet',
            'fragments': [_fragment_record(f) for f in score]}


def _dumps(obj):
    return json.dumps(obj, indent=2) + '\n'


def dumps_bscore(score):
    return _dumps(bscore_to_dict(score))


def load_bscore(path):
    with open(path) as fh:
        return parse_bscore(json.load(fh))


def save_bscore(path, score):
    with open(path, 'w') as fh:
        fh.write(dumps_bscore(score))


def parse_timemap(obj):
    if not isinstance(obj, dict) or not isinstance(obj.get('times'), list):
        raise ValueError('A time map file must define a "times" list.')
    for n, t in enumerate(obj['times']):
        if isinstance(t, bool) or not isinstance(t, (int, float)):
            raise ValueError('Time %d is not a number: %r.' % (n, t))
    return TimeMap(obj['times'], obj.get('duration'))


def timemap_to_dict(timemap):
    obj = {'times': list(timemap.times)}
    if timemap.duration is not None:
        obj['duration'] = timemap.duration
    return obj


def dumps_timemap(timemap):
    return _dumps(timemap_to_dict(timemap))


def load_timemap(path):
    with open(path) as fh:
        return parse_timemap(json.load(fh))


def save_timemap(path, timemap):
    with open(path, 'w') as fh:
        fh.write(dumps_timemap(timemap))


def parse_timeline(obj):
    if not isinstance(obj, dict) or not isinstance(obj.get('segments'),
                                                   list):
        raise ValueError('A timeline file must define a "segments" list.')
    for n, seg in enumerate(obj['segments']):
        if not isinstance(seg, list) or len(seg) != 3:
            raise ValueError(
                'Timeline segment %d must be [t_start, t_end, line_id], '
                'found %r.' % (n, seg))
    return LineTimeline(obj['segments'], obj.get('provenance'))


def timeline_to_dict(timeline):
    obj = {'segments': [list(s) for s in timeline.segments]}
    if timeline.provenance is not None:
        obj['provenance'] = [list(p) for p in timeline.provenance]
    return obj


def dumps_timeline(timeline):
    return _dumps(timeline_to_dict(timeline))


def load_timeline(path):
    with open(path) as fh:
        return parse_timeline(json.load(fh))


def save_timeline(path, timeline):
    with open(path, 'w') as fh:
        fh.write(dumps_timeline(timeline))


def parse_alignment(obj):
    if not isinstance(obj, dict) or not isinstance(obj.get('matches'), list):
        raise ValueError('An alignment file must define a "matches" list.')
    for n, match in enumerate(obj['matches']):
        if not isinstance(match, list) or len(match) != 3:
            raise ValueError(
                'Match %d must be [line_id, ref_start, ref_end], found %r.'
                % (n, match))
    if 'score' not in obj:
        raise ValueError('An alignment file must define a "score".')
    return SegmentAlignment(obj['matches'], float(obj['score']),
                            obj.get('algo', 'hier'), obj.get('config', {}))


def alignment_to_dict(alignment):
    return {'algo': alignment.algo, 'score': alignment.score,
            'matches': [list(m) for m in alignment.matches],
            'config': dict(alignment.config)}


def dumps_alignment(alignment):
    return _dumps(alignment_to_dict(alignment))


def load_alignment(path):
    with open(path) as fh:
        return parse_alignment(json.load(fh))


def save_alignment(path, alignment):
    with open(path, 'w') as fh:
        fh.write(dumps_alignment(alignment))
