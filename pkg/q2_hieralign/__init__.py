# ----------------------------------------------------------------------------
# Copyright (c) 2019, q2-hieralign development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

from ._version import __version__
from .bscore import (
    PackedColumn, BootlegFragment, SheetMusic, PerformanceSequence, TimeMap,
    LineTimeline, SegmentAlignment, AlignConfig, pack_column, unpack_column,
    load_bscore, save_bscore)
from .dtw import pairwise_cost, subsequence_dtw, subsequence_align
from .hierarchical import hierarchical_align
from .jumpdtw import JumpConfig, jump_dtw_align
from .benchgen import sample_schema, splice_performance, synth_piece
from .metrics import alignment_to_timeline, accuracy_with_collar
from .visuals import render_strips


__all__ = ['__version__', 'PackedColumn', 'BootlegFragment', 'SheetMusic',
           'PerformanceSequence', 'TimeMap', 'LineTimeline',
           'SegmentAlignment', 'AlignConfig', 'pack_column', 'unpack_column',
           'load_bscore', 'save_bscore', 'pairwise_cost', 'subsequence_dtw',
           'subsequence_align', 'hierarchical_align', 'JumpConfig',
           'jump_dtw_align', 'sample_schema', 'splice_performance',
           'synth_piece', 'alignment_to_timeline', 'accuracy_with_collar',
           'render_strips']
