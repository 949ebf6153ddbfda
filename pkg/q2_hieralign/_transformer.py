# ----------------------------------------------------------------------------
# Copyright (c) 2019, q2-hieralign development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import json

from .plugin_setup import plugin
from . import bscore as bs
from . import benchgen
from ._format import (BScoreFormat, TimeMapFormat, LineTimelineFormat,
                      SegmentAlignmentFormat, JumpSchemaFormat,
                      ScorePieceDirFmt, BenchmarkCorpusDirFmt)


def _read(ff, parser):
    with ff.open() as fh:
        return parser(json.load(fh))


def _write(fmt_class, text):
    ff = fmt_class()
    with ff.open() as fh:
        fh.write(text)
    return ff


@plugin.register_transformer
def _1(ff: BScoreFormat) -> bs.SheetMusic:
    score = _read(ff, bs.parse_bscore)
    if not isinstance(score, bs.SheetMusic):
        raise ValueError('Expected sheet music, found a performance.')
    return score


@plugin.register_transformer
def _2(data: bs.SheetMusic) -> BScoreFormat:
    return _write(BScoreFormat, bs.dumps_bscore(data))


@plugin.register_transformer
def _3(ff: BScoreFormat) -> bs.PerformanceSequence:
    score = _read(ff, bs.parse_bscore)
    if not isinstance(score, bs.PerformanceSequence):
        raise ValueError('Expected a performance, found sheet music.')
    return score


@plugin.register_transformer
def _4(data: bs.PerformanceSequence) -> BScoreFormat:
    return _write(BScoreFormat, bs.dumps_bscore(data))


@plugin.register_transformer
def _5(ff: TimeMapFormat) -> bs.TimeMap:
    return _read(ff, bs.parse_timemap)


@plugin.register_transformer
def _6(data: bs.TimeMap) -> TimeMapFormat:
    return _write(TimeMapFormat, bs.dumps_timemap(data))


@plugin.register_transformer
def _7(ff: LineTimelineFormat) -> bs.LineTimeline:
    return _read(ff, bs.parse_timeline)


@plugin.register_transformer
def _8(data: bs.LineTimeline) -> LineTimelineFormat:
    return _write(LineTimelineFormat, bs.dumps_timeline(data))


@plugin.register_transformer
def _9(ff: SegmentAlignmentFormat) -> bs.SegmentAlignment:
    return _read(ff, bs.parse_alignment)


@plugin.register_transformer
def _a(data: bs.SegmentAlignment) -> SegmentAlignmentFormat:
    return _write(SegmentAlignmentFormat, bs.dumps_alignment(data))


@plugin.register_transformer
def _b(ff: JumpSchemaFormat) -> benchgen.JumpSchema:
    return _read(ff, benchgen.parse_schema)


@plugin.register_transformer
def _c(data: benchgen.JumpSchema) -> JumpSchemaFormat:
    return _write(JumpSchemaFormat, benchgen.dumps_schema(data))


@plugin.register_transformer
def _d(dirfmt: ScorePieceDirFmt) -> benchgen.ScorePiece:
    return benchgen.load_piece(str(dirfmt))


@plugin.register_transformer
def _e(data: benchgen.ScorePiece) -> ScorePieceDirFmt:
    dirfmt = ScorePieceDirFmt()
    benchgen.save_piece(str(dirfmt), data)
    return dirfmt


@plugin.register_transformer
def _f(dirfmt: BenchmarkCorpusDirFmt) -> benchgen.BenchmarkCorpus:
    return benchgen.load_corpus(str(dirfmt))


@plugin.register_transformer
def _10(data: benchgen.BenchmarkCorpus) -> BenchmarkCorpusDirFmt:
    dirfmt = BenchmarkCorpusDirFmt()
    benchgen.save_corpus(str(dirfmt), data)
    return dirfmt
