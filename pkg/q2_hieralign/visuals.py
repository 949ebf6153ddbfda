# ----------------------------------------------------------------------------
# Copyright (c) 2019, q2-hieralign development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import io

import numpy as np
import pandas as pd
import seaborn as sns
import matplotlib
import matplotlib.pyplot as plt

from .metrics import accuracy_with_collar, transition_times


GRAY = '#c0c0c0'
RED = '#d62728'
BLACK = '#000000'
BLUE = '#1f77b4'

TRUTH_LABEL = 'ground truth'

# fixed salt keeps svg element ids identical across runs
_SVG_RC = {'svg.hashsalt': 'q2-hieralign', 'svg.fonttype': 'none'}


def _figure_to_svg(fig):
    buf = io.StringIO()
    fig.savefig(buf, format='svg', bbox_inches='tight',
                metadata={'Date': None})
    plt.close(fig)
    return buf.getvalue()


def strip_layout(preds, gt):
    '''Rows of an error-strip figure, top to bottom, with their errors.'''
    rows = [(TRUTH_LABEL, [])]
    for name, pred in preds:
        rows.append((name, accuracy_with_collar(pred, gt, 0.0)
                     .error_intervals))
    return rows


def render_strips(preds, gt, jumps=None):
    '''Error strips of every system against the ground truth, as SVG.

    preds: list of (name, LineTimeline)
    jumps: optional jump instants (seconds), drawn in blue.
    '''
    rows = strip_layout(preds, gt)
    t0, t1 = gt.start, gt.end
    with matplotlib.rc_context(_SVG_RC):
        fig, ax = plt.subplots(figsize=(10, 0.3 + 0.45 * len(rows)))
        for y, (_, errors) in enumerate(reversed(rows)):
            ax.broken_barh([(t0, t1 - t0)], (y + 0.1, 0.8),
                           facecolors=GRAY)
            if errors:
                ax.broken_barh([(s, e - s) for s, e in errors],
                               (y + 0.1, 0.8), facecolors=RED)
        top = len(rows)
        for t in transition_times(gt):
            ax.vlines(t, 0, top, colors=BLACK, linewidth=0.8)
        for t in jumps or []:
            ax.vlines(t, 0, top, colors=BLUE, linewidth=1.5)
        ax.set_xlim(t0, t1)
        ax.set_ylim(0, top)
        ax.set_yticks(np.arange(top) + 0.5)
        ax.set_yticklabels([name for name, _ in reversed(rows)])
        ax.set_xlabel('Time (s)')
        for side in ('top', 'right', 'left'):
            ax.spines[side].set_visible(False)
        return _figure_to_svg(fig)


def _collar_means(results, default_collar):
    means = results.groupby(['schema', 'algo', 'collar'])['accuracy'].mean()
    means = means.reset_index()
    default = means[means['collar'] == default_collar]
    others = means[means['collar'] != default_collar]
    return default, others


def plot_benchmark(results, default_collar=0.5, algos=None, schemas=None):
    '''Bar plot of mean accuracy per schema and algorithm.

    Bars use ``default_collar``; the other collars are drawn as short gray
    ticks on top of each bar.
    '''
    results = results[results['piece'] != 'mean']
    results = results.dropna(subset=['accuracy'])
    if algos is None:
        algos = sorted(results['algo'].unique())
    if schemas is None:
        schemas = sorted(results['schema'].unique())
    default, others = _collar_means(results, default_collar)
    palette = sns.color_palette('colorblind', len(algos))
    width = 0.8 / max(len(algos), 1)

    with matplotlib.rc_context(_SVG_RC), sns.axes_style('whitegrid'):
        fig, ax = plt.subplots(figsize=(1.5 + 1.2 * len(schemas), 4))
        for a, algo in enumerate(algos):
            x = np.arange(len(schemas)) - 0.4 + width * (a + 0.5)
            heights = pd.Series(np.nan, index=schemas)
            bars = default[default['algo'] == algo].set_index('schema')
            heights.update(bars['accuracy'])
            ax.bar(x, heights.fillna(0).values, width, color=palette[a],
                   label=algo)
            for n, schema in enumerate(schemas):
                ticks = others[(others['algo'] == algo)
                               & (others['schema'] == schema)]
                ax.hlines(ticks['accuracy'].values, x[n] - width / 3,
                          x[n] + width / 3, colors=GRAY, linewidth=2)
        ax.set_xticks(np.arange(len(schemas)))
        ax.set_xticklabels(schemas)
        ax.set_ylim(0, 1.05)
        ax.set_ylabel('Accuracy (collar %gs)' % default_collar)
        ax.legend(loc='lower right', frameon=True)
    return fig


def benchmark_svg(results, default_collar=0.5, algos=None, schemas=None):
    with matplotlib.rc_context(_SVG_RC):
        return _figure_to_svg(
            plot_benchmark(results, default_collar, algos, schemas))
