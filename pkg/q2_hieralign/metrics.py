# ----------------------------------------------------------------------------
# Copyright (c) 2019, q2-hieralign development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .bscore import LineTimeline


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    collar: float
    scored_duration: float
    error_intervals: list = field(default_factory=list)
    error: str = None

    def to_dict(self):
        obj = {'accuracy': None if np.isnan(self.accuracy)
               else self.accuracy,
               'collar': self.collar,
               'scored_duration': self.scored_duration,
               'error_intervals': [list(e) for e in self.error_intervals]}
        if self.error is not None:
            obj['error'] = self.error
        return obj


def dumps_reports(reports):
    return json.dumps([r.to_dict() for r in reports], indent=2) + '\n'


def alignment_to_timeline(alignment, timemap):
    '''Show each matched line from its first column until the next match.

    Columns before the first match belong to the first matched line; the
    last line is shown until the end of the recording.
    '''
    matches = alignment.matches
    if len(matches) == 0:
        return LineTimeline([])
    n_cols = len(timemap)
    for n, (_, start, end) in enumerate(matches):
        if end >= n_cols:
            raise ValueError(
                'Match %d ends at column %d, beyond the %d columns of the '
                'time map.' % (n, end, n_cols))
    starts = [timemap.times[0]]
    starts.extend(timemap.times[start] for _, start, _ in matches[1:])
    ends = starts[1:] + [timemap.end_time]
    segments = []
    for (line, _, _), t0, t1 in zip(matches, starts, ends):
        if t1 <= t0:
            continue
        if segments and segments[-1][2] == line:
            segments[-1][1] = t1
        else:
            segments.append([t0, t1, line])
    return LineTimeline(segments)


def score_following_timeline(timeline, sheet):
    '''Attach the page and pixel rows of every displayed line.'''
    where = {f.line_id: (f.page,) + tuple(f.pixel_range) for f in sheet}
    missing = sorted(set(timeline.line_sequence) - set(where))
    if missing:
        raise ValueError('Timeline shows lines %r that are not in the sheet '
                         'music.' % missing)
    return LineTimeline(timeline.segments,
                        [where[line] for line in timeline.line_sequence])


def transition_times(gt):
    '''Interior ground-truth instants where the shown line changes.

    Both edges of a gap between segments count as transitions.
    '''
    times = []
    for (_, end, line), (start, _, nxt) in zip(gt.segments,
                                               gt.segments[1:]):
        if end != start:
            times.extend((end, start))
        elif line != nxt:
            times.append(end)
    return times


def _labels_at(timeline, points):
    '''Line shown at each point, or -1 where the timeline is undefined.'''
    if len(timeline) == 0:
        return np.full(len(points), -1)
    seg = np.asarray([s[:2] for s in timeline.segments])
    lines = np.asarray(timeline.line_sequence)
    idx = np.searchsorted(seg[:, 0], points, side='right') - 1
    inside = (idx >= 0) & (points < seg[np.clip(idx, 0, None), 1])
    return np.where(inside, lines[np.clip(idx, 0, None)], -1)


def _merge_intervals(starts, ends):
    merged = []
    for s, e in zip(starts, ends):
        if merged and merged[-1][1] == s:
            merged[-1][1] = e
        else:
            merged.append([s, e])
    return [tuple(m) for m in merged]


def accuracy_with_collar(pred, gt, collar):
    if collar < 0:
        raise ValueError('The scoring collar must be non-negative, found %r.'
                         % collar)
    if len(gt) == 0:
        raise ValueError('The ground truth timeline is empty.')
    transitions = np.asarray(transition_times(gt), dtype=float)
    edges = [t for s in gt.segments + pred.segments for t in s[:2]]
    if collar > 0:
        edges.extend(transitions - collar)
        edges.extend(transitions + collar)
    edges = np.unique(edges)
    left, right = edges[:-1], edges[1:]
    mid = (left + right) / 2
    width = right - left

    truth = _labels_at(gt, mid)
    scored = truth != -1
    if collar > 0 and len(transitions):
        near = np.abs(mid[:, None] - transitions[None, :]) < collar
        scored &= ~near.any(axis=1)
    wrong = scored & (_labels_at(pred, mid) != truth)

    scored_duration = float(width[scored].sum())
    errors = _merge_intervals(left[wrong].tolist(), right[wrong].tolist())
    if scored_duration == 0:
        message = ('Collar %r excludes the whole ground truth; accuracy is '
                   'undefined.' % collar)
        warnings.warn(message, UserWarning)
        return EvalReport(float('nan'), collar, 0.0, errors, error=message)
    accuracy = 1 - float(width[wrong].sum()) / scored_duration
    return EvalReport(accuracy, collar, scored_duration, errors)
