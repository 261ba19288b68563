"""CSV and figure output.

CSV files start with a comment line carrying the configuration digest,
then a header row; floats are written with 9 significant digits so equal
inputs give byte-identical files.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams["svg.hashsalt"] = "hgpdc"


def fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    return f"{float(v):.9g}"


def write_csv(path: Path, comment: str, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def plot_lines(
    path: Path,
    series: Sequence[tuple],
    xlabel: str,
    ylabel: str,
    *,
    logy: bool = False,
    title: str | None = None,
    markers: Sequence[tuple[float, float, str]] = (),
) -> Path:
    """Line plot of (x, y, label) series; ``markers`` are labelled points."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for x, y, label in series:
        ax.plot(x, y, lw=1.2, label=label)
    for x, y, label in markers:
        ax.plot([x], [y], "o", ms=6, label=label)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if any(lbl for *_, lbl in series) or markers:
        ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, metadata={"Date": None} if path.suffix == ".svg" else None)
    plt.close(fig)
    return path


def scatter_branches(path: Path, x, y, branch, xlabel: str, ylabel: str, *, markers=()) -> Path:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for name in sorted(set(branch)):
        sel = [i for i, b in enumerate(branch) if b == name]
        ax.plot([x[i] for i in sel], [y[i] for i in sel], ".", ms=3, label=name)
    for mx, my, label in markers:
        ax.plot([mx], [my], "o", ms=7, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(alpha=0.3)
    if len(branch) or markers:
        ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, metadata={"Date": None} if path.suffix == ".svg" else None)
    plt.close(fig)
    return path
