"""Two-column, blank-line separated series files for generic plotting tools."""

from pathlib import Path

import numpy as np

from .sweep import BuildupResult, SweepResult


def _series(result):
    if isinstance(result, SweepResult):
        out = [
            (f"P_orient_{k + 1}", result.fields, row)
            for k, row in enumerate(result.per_orientation)
        ]
        out.append(("P_mean", result.fields, result.mean))
        return out
    if isinstance(result, BuildupResult):
        return [("tau_s_vs_A_kHz", result.hyperfine_magnitudes, result.timescales)]
    raise TypeError(f"cannot render {type(result).__name__} as plot data")


def format_plot_data(result, header=""):
    """Render ``result`` as text; numbers carry 9 digits after the leading one."""
    blocks = []
    for label, x, y in _series(result):
        lines = [f"# {label}"]
        lines += [f"{xi:.9e} {yi:.9e}" for xi, yi in zip(x, y)]
        blocks.append("\n".join(lines))
    return header + "\n\n".join(blocks) + "\n"


def emit_plot_data(result, path, header=""):
    path = Path(path)
    try:
        path.write_text(format_plot_data(result, header))
    except OSError as exc:
        raise OSError(f"cannot write plot data to {path}: {exc}") from exc
    return path


def read_plot_data(path):
    """Parse a plot-data file back into ``[(label, ndarray (n, 2)), ...]``."""
    series = []
    label, rows = None, []

    def flush():
        if rows:
            series.append((label, np.array(rows, dtype=float)))

    for line in Path(path).read_text().splitlines():
        s = line.strip()
        if not s:
            flush()
            label, rows = None, []
        elif s.startswith("#"):
            if not rows:
                label = s[1:].strip()
        else:
            rows.append([float(v) for v in s.split()])
    flush()
    return series
