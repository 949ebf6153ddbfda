# ----------------------------------------------------------------------------
# Copyright (c) 2019, q2-hieralign development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import json

import qiime2.plugin.model as model
from qiime2.plugin import ValidationError

from . import bscore as bs
from . import benchgen


def _load_json(fmt):
    with fmt.open() as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as e:
            raise ValidationError(e)


def _parse_or_die(parser, obj, *args):
    try:
        return parser(obj, *args)
    except ValueError as e:
        raise ValidationError(str(e))


class BScoreFormat(model.TextFileFormat):
    def _validate(self, n_records=None):
        _parse_or_die(bs.parse_bscore, _load_json(self), n_records)

    def _validate_(self, level):
        record_count_map = {'min': 5, 'max': None}
        self._validate(record_count_map[level])


BScoreDirectoryFormat = model.SingleFileDirectoryFormat(
    'BScoreDirectoryFormat', 'bscore.json', BScoreFormat)


class TimeMapFormat(model.TextFileFormat):
    def _validate_(self, level):
        _parse_or_die(bs.parse_timemap, _load_json(self))


TimeMapDirectoryFormat = model.SingleFileDirectoryFormat(
    'TimeMapDirectoryFormat', 'timemap.json', TimeMapFormat)


class LineTimelineFormat(model.TextFileFormat):
    def _validate_(self, level):
        _parse_or_die(bs.parse_timeline, _load_json(self))


LineTimelineDirectoryFormat = model.SingleFileDirectoryFormat(
    'LineTimelineDirectoryFormat', 'timeline.json', LineTimelineFormat)


class SegmentAlignmentFormat(model.TextFileFormat):
    def _validate_(self, level):
        _parse_or_die(bs.parse_alignment, _load_json(self))


SegmentAlignmentDirectoryFormat = model.SingleFileDirectoryFormat(
    'SegmentAlignmentDirectoryFormat', 'alignment.json',
    SegmentAlignmentFormat)


class JumpSchemaFormat(model.TextFileFormat):
    def _validate_(self, level):
        _parse_or_die(benchgen.parse_schema, _load_json(self))


JumpSchemaDirectoryFormat = model.SingleFileDirectoryFormat(
    'JumpSchemaDirectoryFormat', 'schema.json', JumpSchemaFormat)


class ScorePieceDirFmt(model.DirectoryFormat):
    sheet = model.File(benchgen.PIECE_FILES['sheet'], format=BScoreFormat)
    performance = model.File(benchgen.PIECE_FILES['performance'],
                             format=BScoreFormat)
    timemap = model.File(benchgen.PIECE_FILES['timemap'],
                         format=TimeMapFormat)
    truth = model.File(benchgen.PIECE_FILES['truth'],
                       format=LineTimelineFormat)

    def _validate_(self, level):
        try:
            benchgen.load_piece(str(self))
        except ValueError as e:
            raise ValidationError(str(e))


class BenchmarkCorpusDirFmt(model.DirectoryFormat):
    sheets = model.FileCollection(
        r'.+/sheet\.bscore\.json', format=BScoreFormat)
    performances = model.FileCollection(
        r'.+/perf\.bscore\.json', format=BScoreFormat)
    timemaps = model.FileCollection(
        r'.+/timemap\.json', format=TimeMapFormat)
    truths = model.FileCollection(r'.+/gt\.json', format=LineTimelineFormat)

    @sheets.set_path_maker
    def sheets_path_maker(self, piece):
        return '%s/%s' % (piece, benchgen.PIECE_FILES['sheet'])

    @performances.set_path_maker
    def performances_path_maker(self, piece):
        return '%s/%s' % (piece, benchgen.PIECE_FILES['performance'])

    @timemaps.set_path_maker
    def timemaps_path_maker(self, piece):
        return '%s/%s' % (piece, benchgen.PIECE_FILES['timemap'])

    @truths.set_path_maker
    def truths_path_maker(self, piece):
        return '%s/%s' % (piece, benchgen.PIECE_FILES['truth'])

    def _validate_(self, level):
        if level == 'min':
            return
        try:
            benchgen.load_corpus(str(self))
        except (ValueError, OSError) as e:
            raise ValidationError(str(e))
