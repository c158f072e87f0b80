"""Deterministic CSV/manifest emission and matplotlib figure rendering."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .grids import DataTable, PatternGrid

# Pin the ids matplotlib embeds in SVG output so documents are reproducible.
matplotlib.rcParams["svg.hashsalt"] = "kd"


def format_number(value) -> str:
    """Decimal text with up to 17 significant digits; round-trips exactly."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def format_value(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(format_value(v) for v in value)
    if isinstance(value, str):
        return value
    return format_number(value)


def emit_csv(data: PatternGrid | DataTable, path: Path) -> Path:
    """Write a table (or flattened grid) as CSV, axis-major ascending rows."""
    table = data.to_table() if isinstance(data, PatternGrid) else data
    lines = [",".join(table.columns)]
    for row in table.rows:
        lines.append(",".join(format_number(v) for v in row))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_manifest(path: Path, entries: list[tuple[str, object]], notes: list[str]) -> Path:
    """Write the run manifest.

    The ``key = value`` lines form a valid config that reproduces the run;
    informational notes (tail masses, oracle residuals, fit results) are
    emitted as comments so the manifest stays re-parseable.
    """
    lines = ["# kd run manifest; rerun with: kd run --config <this file> --out <dir>"]
    for key, value in entries:
        lines.append(f"{key} = {format_value(value)}")
    if notes:
        lines.append("#")
        lines.append("# run record:")
        for note in notes:
            lines.append(f"# {note}")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _new_axes(xlabel: str, ylabel: str, title: str):
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    return fig, ax


def _save(fig, path: Path) -> Path:
    path = Path(path)
    fig.savefig(path, format=path.suffix.lstrip(".") or "svg", metadata={"Date": None})
    plt.close(fig)
    return path


def render_curves(path: Path, curves: list[tuple[str, np.ndarray, np.ndarray]],
                  xlabel: str, ylabel: str, title: str, logy: bool = False) -> Path:
    """One polyline per (label, x, y) curve, with a legend."""
    fig, ax = _new_axes(xlabel, ylabel, title)
    for label, x, y in curves:
        ax.plot(x, y, label=label, linewidth=1.4)
    if logy:
        ax.set_yscale("log")
    if curves:
        ax.legend(fontsize=8)
    return _save(fig, path)


def render_heatmap(path: Path, x: np.ndarray, y: np.ndarray, values: np.ndarray,
                   xlabel: str, ylabel: str, title: str) -> Path:
    fig, ax = _new_axes(xlabel, ylabel, title)
    mesh = ax.pcolormesh(x, y, values.T, shading="auto", cmap="viridis")
    fig.colorbar(mesh, ax=ax)
    return _save(fig, path)


def render_channels(path: Path, finals_left: np.ndarray, finals_right: np.ndarray,
                    probabilities: np.ndarray, title: str) -> Path:
    fig, ax = _new_axes("final momentum (left)", "final momentum (right)", title)
    size = 400.0 * probabilities / max(probabilities.max(), 1e-300)
    ax.scatter(finals_left, finals_right, s=np.clip(size, 4.0, None), alpha=0.8)
    return _save(fig, path)
