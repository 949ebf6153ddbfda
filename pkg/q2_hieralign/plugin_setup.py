# ----------------------------------------------------------------------------
# Copyright (c) 2019, q2-hieralign development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import importlib

from qiime2.plugin import (
    Int, Str, Float, Range, Bool, Plugin, Choices, List)

from .actions import (
    align, synthesize, simulate_corpus, evaluate, visualize, benchmark)
from .benchgen import SCHEMA_KINDS
from .bscore import JUMP_POLICIES
from .utilities import ALGORITHMS
from ._format import (BScoreFormat, BScoreDirectoryFormat, TimeMapFormat,
                      TimeMapDirectoryFormat, LineTimelineFormat,
                      LineTimelineDirectoryFormat, SegmentAlignmentFormat,
                      SegmentAlignmentDirectoryFormat, JumpSchemaFormat,
                      JumpSchemaDirectoryFormat, ScorePieceDirFmt,
                      BenchmarkCorpusDirFmt)
from ._type import (BootlegScore, Sheet, Performance, TimeMap, LineTimeline,
                    SegmentAlignment, JumpSchema, ScorePiece,
                    BenchmarkCorpus)
from ._version import __version__


plugin = Plugin(
    name='hieralign',
    version=__version__,
    website='https://qiime2.org',
    package='q2_hieralign',
    description=(
        'This QIIME 2 plugin aligns performances of a piece of music to its '
        'sheet music line by line, following repeats and jumps, and '
        'benchmarks alignment algorithms on synthetic performances with '
        'sampled jump structures.'),
    short_description=(
        'Plugin for structure-aware alignment of performances to sheet '
        'music.')
)

algorithms = Str % Choices(list(ALGORITHMS))
schema_kinds = Str % Choices(list(SCHEMA_KINDS))

parameters = {
    'hier': {
        'alpha': Float % Range(0, 1, inclusive_start=False,
                               inclusive_end=True),
        'gamma': Float % Range(0, None),
        'allow_backward_jumps': Bool,
        'allow_forward_jumps': Bool,
        'jump_policy': Str % Choices(list(JUMP_POLICIES))},
    'jump': {
        'jump_penalty': Float % Range(0, None)},
    'base': {
        'n_jobs': Int},
    'synth': {
        'seed': Int % Range(0, None),
        'corruption': Float % Range(0.0, 1.0, inclusive_end=True)}
}

parameter_descriptions = {
    'hier': {
        'alpha': ('Multiplicative weight of staying on a line (slowing '
                  'down) or skipping one line (speeding up).'),
        'gamma': ('Scale of the jump penalty. The penalty is gamma times '
                  'the magnitude of the average best line score, so '
                  'gamma = 1 offsets roughly one line of matching music.'),
        'allow_backward_jumps': ('Allow jumps back to lines that have '
                                 'already been seen.'),
        'allow_forward_jumps': ('Allow jumps to one line past the furthest '
                                'line seen so far.'),
        'jump_policy': ('"structured" allows backward jumps within the seen '
                        'range and forward jumps to the leading edge; '
                        '"none" only allows moving to the next line; '
                        '"arbitrary" allows jumps to any line.')},
    'jump': {
        'jump_penalty': ('Additive cost of every long-range transition '
                         'between line boundaries (Jump DTW baseline).')},
    'base': {
        'n_jobs': ('Number of jobs to run in parallel. -1 uses all cores. '
                   'Capped by the HIERALIGN_THREADS environment variable.')},
    'synth': {
        'seed': 'Seed used by the random number generator.',
        'corruption': ('Fraction of performance columns replaced with '
                       'random columns, simulating feature extraction '
                       'errors.')}
}


plugin.methods.register_function(
    function=align,
    inputs={'sheet': BootlegScore[Sheet],
            'performance': BootlegScore[Performance],
            'timemap': TimeMap},
    parameters={
        'algo': algorithms,
        **parameters['hier'],
        **parameters['jump'],
        **parameters['base']},
    outputs=[('alignment', SegmentAlignment),
             ('timeline', LineTimeline)],
    input_descriptions={
        'sheet': 'Bootleg score of every line of the sheet music.',
        'performance': 'Bootleg score of the performance.',
        'timemap': 'Time (seconds) of every performance column.'},
    parameter_descriptions={
        'algo': ('Alignment algorithm: subsequence DTW of the whole sheet '
                 '(subseq), Jump DTW with jumps at every line boundary '
                 '(jump) or hierarchical DTW (hier).'),
        **parameter_descriptions['hier'],
        **parameter_descriptions['jump'],
        **parameter_descriptions['base']},
    output_descriptions={
        'alignment': 'Matched lines and their performance column spans.',
        'timeline': ('Line shown at every instant of the performance, with '
                     'the page and pixel rows of each line.')},
    name='Align a performance to sheet music.',
    description=('Align the bootleg score of a performance to the bootleg '
                 'scores of the sheet music lines and derive which line is '
                 'being played at every instant.')
)


plugin.methods.register_function(
    function=synthesize,
    inputs={'piece': ScorePiece},
    parameters={
        'schema': schema_kinds,
        **parameters['synth']},
    outputs=[('spliced', ScorePiece), ('jump_schema', JumpSchema)],
    input_descriptions={
        'piece': 'A piece whose performance plays every line once.'},
    parameter_descriptions={
        'schema': ('Jump structure to sample: none, 1-3 repeats or D.S. al '
                   'fine.'),
        **parameter_descriptions['synth']},
    output_descriptions={
        'spliced': ('The piece with its performance, time map and ground '
                    'truth spliced according to the sampled schema.'),
        'jump_schema': 'The sampled line boundaries and play order.'},
    name='Splice jumps into a performance.',
    description=('Sample line boundaries for a jump schema and splice the '
                 'performance columns, time map and ground truth so the '
                 'performance contains the corresponding repeats.')
)


plugin.methods.register_function(
    function=simulate_corpus,
    inputs={},
    parameters={
        'n_pieces': Int % Range(1, None),
        'n_lines': Int % Range(1, None),
        'columns_per_line': Int % Range(1, None),
        'fill_density': Float % Range(0.0, 1.0, inclusive_start=False,
                                      inclusive_end=True),
        'seed': Int % Range(0, None)},
    outputs=[('corpus', BenchmarkCorpus)],
    input_descriptions={},
    parameter_descriptions={
        'n_pieces': 'Number of pieces to generate.',
        'n_lines': 'Number of sheet music lines per piece.',
        'columns_per_line': 'Number of bootleg score columns per line.',
        'fill_density': ('Probability that a staff-line position holds a '
                         'notehead.'),
        'seed': parameter_descriptions['synth']['seed']},
    output_descriptions={'corpus': 'Random pieces without jumps.'},
    name='Simulate a benchmark corpus.',
    description=('Generate random pieces whose lines have pairwise distinct '
                 'columns and whose performances play every line once.')
)


plugin.visualizers.register_function(
    function=evaluate,
    inputs={'predicted': LineTimeline, 'truth': LineTimeline},
    parameters={'collars': List[Float % Range(0, None)]},
    input_descriptions={
        'predicted': 'Predicted line timeline.',
        'truth': 'Ground-truth line timeline.'},
    parameter_descriptions={
        'collars': ('Scoring collars (seconds). Time within a collar of a '
                    'ground-truth line transition is not scored.')},
    name='Score a line timeline.',
    description=('Compute the fraction of time the correct line is shown, '
                 'ignoring a collar around every ground-truth transition, '
                 'and draw an error strip.')
)


plugin.visualizers.register_function(
    function=visualize,
    inputs={'truth': LineTimeline, 'predictions': List[LineTimeline]},
    parameters={'labels': List[Str], 'jump_times': List[Float]},
    input_descriptions={
        'truth': 'Ground-truth line timeline.',
        'predictions': 'Predicted line timelines, one strip each.'},
    parameter_descriptions={
        'labels': 'Strip label of each prediction, in the same order.',
        'jump_times': 'Times (seconds) of jumps to mark in blue.'},
    name='Draw alignment error strips.',
    description=('Draw one strip per prediction with the times it shows '
                 'the wrong line in red, ground-truth transitions in black '
                 'and jumps in blue.')
)


plugin.visualizers.register_function(
    function=benchmark,
    inputs={'corpus': BenchmarkCorpus},
    parameters={
        'algos': List[algorithms],
        'schemas': List[schema_kinds],
        'seeds': Int % Range(1, None),
        'collars': List[Float % Range(0, None)],
        'alpha': parameters['hier']['alpha'],
        'gamma': parameters['hier']['gamma'],
        **parameters['jump'],
        'corruption': parameters['synth']['corruption'],
        **parameters['base']},
    input_descriptions={'corpus': 'Pieces without jumps to benchmark on.'},
    parameter_descriptions={
        'algos': 'Alignment algorithms to compare.',
        'schemas': 'Jump schemas to splice into every piece.',
        'seeds': ('Number of sampled schemas per piece and jump schema. '
                  'Schema "none" is run once.'),
        'collars': 'Scoring collars (seconds) to report.',
        'alpha': parameter_descriptions['hier']['alpha'],
        'gamma': parameter_descriptions['hier']['gamma'],
        **parameter_descriptions['jump'],
        'corruption': parameter_descriptions['synth']['corruption'],
        **parameter_descriptions['base']},
    name='Benchmark alignment algorithms.',
    description=('Splice sampled jump schemas into every piece of a corpus, '
                 'align each query with every algorithm and report accuracy '
                 'per scoring collar.')
)


# Registrations
plugin.register_semantic_types(
    BootlegScore, Sheet, Performance, TimeMap, LineTimeline,
    SegmentAlignment, JumpSchema, ScorePiece, BenchmarkCorpus)
plugin.register_semantic_type_to_format(
    BootlegScore[Sheet], artifact_format=BScoreDirectoryFormat)
plugin.register_semantic_type_to_format(
    BootlegScore[Performance], artifact_format=BScoreDirectoryFormat)
plugin.register_semantic_type_to_format(
    TimeMap, artifact_format=TimeMapDirectoryFormat)
plugin.register_semantic_type_to_format(
    LineTimeline, artifact_format=LineTimelineDirectoryFormat)
plugin.register_semantic_type_to_format(
    SegmentAlignment, artifact_format=SegmentAlignmentDirectoryFormat)
plugin.register_semantic_type_to_format(
    JumpSchema, artifact_format=JumpSchemaDirectoryFormat)
plugin.register_semantic_type_to_format(
    ScorePiece, artifact_format=ScorePieceDirFmt)
plugin.register_semantic_type_to_format(
    BenchmarkCorpus, artifact_format=BenchmarkCorpusDirFmt)
plugin.register_formats(
    BScoreFormat, BScoreDirectoryFormat, TimeMapFormat,
    TimeMapDirectoryFormat, LineTimelineFormat, LineTimelineDirectoryFormat,
    SegmentAlignmentFormat, SegmentAlignmentDirectoryFormat,
    JumpSchemaFormat, JumpSchemaDirectoryFormat, ScorePieceDirFmt,
    BenchmarkCorpusDirFmt)
importlib.import_module('q2_hieralign._transformer')
