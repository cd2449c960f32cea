import logging
import os
from typing import Dict, Mapping, Sequence, Union

import matplotlib

matplotlib.use('Agg')
# Stable element ids in the SVG output
matplotlib.rcParams['svg.hashsalt'] = 'dpgraph'
import matplotlib.pyplot as plt  # noqa: E402

from benchmark.data.error_record import ErrorRecord  # noqa: E402
from benchmark.utils.metrics import aggregate_metrics, linear_reference, sqrt_log_reference  # noqa: E402
from benchmark.utils.results_io import records_to_frame  # noqa: E402
from dpgraph.exceptions import ResultsIOError  # noqa: E402

logger = logging.getLogger(__name__)

Panels = Union[Sequence[ErrorRecord], Mapping[str, Sequence[ErrorRecord]]]


def _as_panels(records: Panels) -> Dict[str, Sequence[ErrorRecord]]:
    if isinstance(records, Mapping):
        return dict(records)
    return {'': records}


def series_points(records: Sequence[ErrorRecord]):
    """
    Plot data per (mechanism, epsilon) series: sizes, mean max error, and the
    two reference curves anchored at the first point.

    Returns:
        list: (label, ns, errors, linear_ref, sqrt_log_ref) tuples in sorted series order
    """
    summary = aggregate_metrics(records_to_frame(records))
    series = []
    for (mechanism, epsilon), group in summary.groupby(['mechanism', 'epsilon'], sort=True):
        group = group.sort_values('n')
        ns = group['n'].to_numpy(dtype=float)
        errors = group['mean_max_error'].to_numpy(dtype=float)
        label = f"{mechanism}, eps={epsilon:g}"
        series.append((label, ns, errors,
                       linear_reference(ns, ns[0], errors[0]),
                       sqrt_log_reference(ns, ns[0], errors[0])))
    return series


def emit_plot(records: Panels, path: str) -> str:
    """
    Static SVG of mean max error against n, one panel per weight range.

    Each series is drawn solid, with a dashed linear reference and a dotted
    sqrt(n) ln^2 n reference both starting at the series' first point. A
    gnuplot-readable ``.dat`` file with the same numbers is written next to
    the SVG.

    Args:
        records (list or dict): Records, or panel title -> records
        path (str): SVG output path

    Returns:
        str: The SVG path

    Raises:
        ResultsIOError: If there is nothing to plot or the files cannot be written
    """
    panels = _as_panels(records)
    if not panels or any(len(r) == 0 for r in panels.values()):
        raise ResultsIOError(path, "cannot plot an empty set of records")

    fig, axes = plt.subplots(1, len(panels), figsize=(6 * len(panels), 4.5), squeeze=False)
    data_blocks = []
    for ax, (title, panel_records) in zip(axes[0], panels.items()):
        for label, ns, errors, linear_ref, sqrt_ref in series_points(panel_records):
            line, = ax.plot(ns, errors, '-', marker='o', label=label)
            ax.plot(ns, linear_ref, '--', color=line.get_color(), linewidth=1)
            ax.plot(ns, sqrt_ref, ':', color=line.get_color(), linewidth=1)
            data_blocks.append((title, label, ns, errors, linear_ref, sqrt_ref))
        ax.set_xlabel('n')
        ax.set_ylabel('max absolute error')
        if title:
            ax.set_title(title)
        ax.legend(fontsize='small')
        ax.grid(True, alpha=0.3)

    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        fig.tight_layout()
        # Fixed metadata keeps repeated runs byte-identical
        fig.savefig(path, format='svg', metadata={'Date': None})
        data_path = write_gnuplot_data(data_blocks, os.path.splitext(path)[0] + '.dat')
    except OSError as e:
        raise ResultsIOError(path, f"cannot write plot: {str(e)}") from e
    finally:
        plt.close(fig)

    logger.info(f"Wrote plot to {path} and data to {data_path}")
    return path


def write_gnuplot_data(blocks, path: str) -> str:
    """One block per series (blank-line separated): n, mean max error, linear ref, sqrt-log ref"""
    with open(path, 'w') as f:
        for title, label, ns, errors, linear_ref, sqrt_ref in blocks:
            heading = f"{title} | {label}" if title else label
            f.write(f"# {heading}\n")
            f.write("# n mean_max_error linear_ref sqrt_log_ref\n")
            for row in zip(ns, errors, linear_ref, sqrt_ref):
                f.write(' '.join(f"{value:.17g}" for value in row) + '\n')
            f.write('\n\n')
    return path
