"""Result persistence: bit-stable CSV tables and static line charts."""

import io
import math
from collections import OrderedDict
from pathlib import Path

import numpy as np

from .experiment import CSV_COLUMNS

FORMATS = ("csv", "svg", "png")


def format_value(value):
    """Locale-independent text for one CSV cell (6 significant digits)."""
    if value is None:
        return "nan"
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "nan"
        return "%.6g" % value
    return str(value)


def rows_to_csv(rows):
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for row in rows:
        buf.write(",".join(format_value(getattr(row, c)) for c in CSV_COLUMNS) + "\n")
    return buf.getvalue()


def _by_experiment(rows):
    groups = OrderedDict()
    for row in rows:
        groups.setdefault(row.experiment, []).append(row)
    return groups


def _x_axis(rows):
    if len({r.B for r in rows}) > 1 and len({r.n for r in rows}) == 1:
        return "B"
    return "n"


def _series(rows, x_attr):
    """One series per method, or per (method, d) when several dimensions are present."""
    several_d = len({r.d for r in rows}) > 1
    series = OrderedDict()
    for r in rows:
        label = f"{r.method} (d={r.d})" if several_d else r.method
        series.setdefault(label, []).append(r)
    return [(label, sorted(pts, key=lambda r: getattr(r, x_attr))) for label, pts in series.items()]


_LABELS = {"lmmd": "L-MMD", "lmmda": "L-MMDa", "rp": "Random projection", "hz": "Henze-Zirkler",
           "ed": "Energy distance"}


def _pretty(label):
    head, _, tail = label.partition(" ")
    return (_LABELS.get(head, head) + (" " + tail if tail else "")).strip()


def plot_rows(rows, path, fmt="svg"):
    """Draw one experiment's rows as a line chart and save it to ``path``."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    x_attr = _x_axis(rows)
    measure = rows[0].measure
    timing = measure == "time"
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    try:
        for label, pts in _series(rows, x_attr):
            x = np.array([getattr(r, x_attr) for r in pts], dtype=float)
            if timing:
                y = np.array([np.nan if r.mean_elapsed_ms is None else r.mean_elapsed_ms / 1000 for r in pts])
                ok = np.isfinite(y) & (y > 0)
                if ok.sum() >= 2:
                    slope = np.polyfit(np.log(x[ok]), np.log(y[ok]), 1)[0]
                    label = f"{label} (slope {slope:.2f})"
            else:
                y = np.array([r.rejection_rate for r in pts])
            ax.plot(x, y, marker="o", label=_pretty(label))
        if timing:
            ax.set_xscale("log")
            ax.set_yscale("log")
            ax.set_ylabel("seconds")
        else:
            ax.set_ylabel("Type-II error" if measure == "type2" else "Type-I error")
            ax.set_ylim(-0.02, 1.02 if measure == "type2" else max(0.2, max(r.rejection_rate for r in rows) + 0.02))
            if measure == "type1":
                ax.axhline(rows[0].alpha, color="black", linestyle="--", linewidth=1, label=f"alpha = {rows[0].alpha:g}")
        ax.set_xlabel(x_attr)
        ax.set_title(rows[0].experiment)
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize="small")
        fig.tight_layout()
        kwargs = {"format": fmt}
        if fmt == "svg":
            kwargs["metadata"] = {"Date": None}
        elif fmt == "png":
            kwargs["metadata"] = {"Software": None}
        with matplotlib.rc_context({"svg.hashsalt": "kernorm", "svg.fonttype": "none"}):
            fig.savefig(path, **kwargs)
    finally:
        plt.close(fig)
    return Path(path)


def emit_report(rows, out_dir, formats=("csv", "svg")):
    """Write one CSV (and optionally one chart) per experiment; returns the written paths.

    Raises
    ------
    ValueError
        If ``rows`` is empty or a format is unknown.
    OSError
        If ``out_dir`` cannot be created or written.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to report")
    formats = tuple(formats)
    unknown = set(formats) - set(FORMATS)
    if unknown:
        raise ValueError(f"unknown report formats {sorted(unknown)}; choose from {FORMATS}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, group in _by_experiment(rows).items():
        if "csv" in formats:
            path = out / f"{name}.csv"
            with path.open("w", newline="", encoding="ascii") as fh:
                fh.write(rows_to_csv(group))
            paths.append(path)
        for fmt in ("svg", "png"):
            if fmt in formats:
                paths.append(plot_rows(group, out / f"{name}.{fmt}", fmt))
    return paths
