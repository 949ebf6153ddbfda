# ----------------------------------------------------------------------------
# Copyright (c) 2019, q2-hieralign development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

from qiime2.plugin import SemanticType


BootlegScore = SemanticType('BootlegScore', field_names='type')
Sheet = SemanticType('Sheet', variant_of=BootlegScore.field['type'])
Performance = SemanticType(
    'Performance', variant_of=BootlegScore.field['type'])
TimeMap = SemanticType('TimeMap')
LineTimeline = SemanticType('LineTimeline')
SegmentAlignment = SemanticType('SegmentAlignment')
JumpSchema = SemanticType('JumpSchema')
ScorePiece = SemanticType('ScorePiece')
BenchmarkCorpus = SemanticType('BenchmarkCorpus')
