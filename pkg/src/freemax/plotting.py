"""Static SVG rendering of CDF comparisons."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ContractError


def emit_plot(series, path, title: str = "", step: bool = False) -> Path:
    """Plot ``(label, x, y)`` series on a shared axis, with a difference panel.

    The lower panel shows each series minus the first one, so two identical
    series give a flat line at 0.
    """
    series = list(series)
    if not series:
        raise ContractError("nothing to plot")
    for label, x, y in series:
        if np.size(x) == 0 or np.shape(x) != np.shape(y):
            raise ContractError(f"series {label!r} is empty or has mismatched x and y")
    import matplotlib

    matplotlib.use("Agg")
    from matplotlib.figure import Figure

    fig = Figure(figsize=(6.4, 5.6))
    top, bottom = fig.subplots(2, 1, sharex=True, gridspec_kw={"height_ratios": [3, 1]})
    draw = "steps-post" if step else "default"
    base_label, base_x, base_y = series[0]
    base_x = np.asarray(base_x, dtype=float)
    base_y = np.asarray(base_y, dtype=float)
    for label, x, y in series:
        top.plot(x, y, label=label, drawstyle=draw, lw=1.2)
    top.set_ylabel("CDF")
    top.legend(loc="lower right", fontsize="small")
    if title:
        top.set_title(title)
    if len(series) == 1:
        bottom.plot(base_x, np.zeros_like(base_y), color="0.5", lw=1.0)
    for label, x, y in series[1:]:
        other = np.interp(base_x, np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        bottom.plot(base_x, other - base_y, lw=1.0, label=f"{label} - {base_label}")
    bottom.axhline(0.0, color="0.7", lw=0.6)
    bottom.set_ylabel("difference")
    bottom.set_xlabel("x")
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg")
    return path


def plot_report(report, path) -> Path:
    """SVG of a verification report's two sides."""
    title = f"{report.theorem_id} t={report.t_or_n:g} [{report.path}] sup={report.sup_norm:.2e}"
    return emit_plot([("rhs", report.grid, report.rhs), ("lhs", report.grid, report.lhs)], path, title)
