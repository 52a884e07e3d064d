"""Static figures written next to the CSV outputs."""

from __future__ import annotations

import statistics
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .metrics import UNDEFINED  # noqa: E402

_STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.frameon": False,
    "svg.hashsalt": "rpluw",
}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def _num(v):
    return None if v in (None, "", UNDEFINED) else float(v)


def _median_curves(rows, x_key, y_key):
    """protocol -> sorted [(x, median y)] over the rows that define y."""
    groups = defaultdict(list)
    for r in rows:
        y = _num(r[y_key])
        if y is not None:
            groups[(r["protocol"], float(r[x_key]))].append(y)
    curves = defaultdict(list)
    for (proto, x), ys in sorted(groups.items()):
        curves[proto].append((x, statistics.median(ys)))
    return curves


def _curve_figure(curves, xlabel, ylabel, title, path):
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for proto, pts in sorted(curves.items()):
            xs, ys = zip(*pts)
            ax.plot(xs, ys, marker="o", label=proto)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        if curves:
            ax.legend()
        return _save(fig, path)


def sweep_figures(rows: list[dict], csv_path: str | Path) -> list[Path]:
    """PDR against node count and delay against offered load, one line per protocol."""
    csv_path = Path(csv_path)
    stem = csv_path.with_suffix("")
    out = [
        _curve_figure(_median_curves(rows, "node_count", "pdr"), "nodes", "median PDR",
                      "Delivery ratio vs network size", Path(f"{stem}_pdr_vs_nodes.png")),
        _curve_figure(_median_curves(rows, "lambda", "avg_delay_s"), "traffic rate (pkt/s per node)",
                      "median end-to-end delay (s)", "Delay vs offered load", Path(f"{stem}_delay_vs_load.png")),
        _curve_figure(_median_curves(rows, "node_count", "total_energy_j"), "nodes", "median energy (J)",
                      "Network energy vs size", Path(f"{stem}_energy_vs_nodes.png")),
    ]
    return out


def run_figure(rows: list[dict], csv_path: str | Path) -> Path:
    """Per-seed PDR and delay for a batch of iterations."""
    csv_path = Path(csv_path)
    seeds = [int(r["seed"]) for r in rows]
    pdr = [_num(r["pdr"]) for r in rows]
    delay = [_num(r["avg_delay_s"]) for r in rows]
    with plt.rc_context(_STYLE):
        fig, (a1, a2) = plt.subplots(2, 1, sharex=True, figsize=(6.0, 5.0))
        a1.bar(seeds, [p if p is not None else 0.0 for p in pdr], color="tab:blue")
        a1.set_ylabel("PDR")
        a2.bar(seeds, [d if d is not None else 0.0 for d in delay], color="tab:orange")
        a2.set_ylabel("avg delay (s)")
        a2.set_xlabel("seed")
        a1.set_title(f"{rows[0]['scenario_id']} / {rows[0]['protocol']}" if rows else "")
        return _save(fig, Path(f"{csv_path.with_suffix('')}_per_seed.png"))


def channel_figure(header: list[str], rows: list[list[float]], path: str | Path) -> Path:
    """Last column against the first column that actually varies."""
    xi = next((i for i in range(len(header) - 1) if len({r[i] for r in rows}) > 1), 0)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.plot([r[xi] for r in rows], [r[-1] for r in rows], marker=".")
        ax.set_xlabel(header[xi])
        ax.set_ylabel(header[-1])
        return _save(fig, Path(path))
