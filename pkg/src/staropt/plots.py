"""Figure rendering for run directories.

Every run command leaves plain CSV tables behind; this module turns the
ones it recognizes into PNG files next to them.  Rendering is optional
sugar: nothing here feeds back into the search code.
"""
from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def _read_csv(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _as_float(value: str) -> float | None:
    if value is None or value == "":
        return None
    return float(value)


def plot_history(rows: list[dict], path: Path, title: str = "search progress") -> None:
    generations = [int(r["generation"]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    if rows and "best" in rows[0]:
        ax.plot(generations, [float(r["best"]) for r in rows], label="best")
        ax.plot(generations, [float(r["mean"]) for r in rows], label="population mean")
        ax.set_ylabel("star discrepancy")
    else:
        pairs = [(g, _as_float(r["best_value"])) for g, r in zip(generations, rows)]
        known = [(g, v) for g, v in pairs if v is not None]
        if known:
            ax.plot(*zip(*known), label="leading feasible value")
        ax.set_ylabel("star discrepancy at leading n")
    ax.set_xlabel("generation")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_pareto(rows: list[dict], path: Path, title: str = "nondominated points") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ordered = sorted(rows, key=lambda r: float(r["discrepancy"]))
    xs = [float(r["discrepancy"]) for r in ordered]
    ys = [int(r["n"]) for r in ordered]
    ax.step(xs, ys, where="post", color="0.6", zorder=1)
    ax.scatter(xs, ys, zorder=2, label="archive entry")
    flagged = [
        (float(r["discrepancy"]), int(r["n"]))
        for r in ordered
        if r.get("meets_epsilon", "True") == "False"
    ]
    if flagged:
        ax.scatter(
            *zip(*flagged), marker="x", color="tab:red", zorder=3, label="re-check failed"
        )
    ax.set_xlabel("star discrepancy")
    ax.set_ylabel("number of points")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_baseline(rows: list[dict], path: Path, title: str = "discrepancy vs size") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    dimensions = sorted({int(r["dimension"]) for r in rows})
    for d in dimensions:
        series = sorted(
            (int(r["count"]), float(r["value"])) for r in rows if int(r["dimension"]) == d
        )
        ax.plot(*zip(*series), marker="o", label=f"d={d}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("number of points")
    ax.set_ylabel("star discrepancy")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_run_report(run_dir: str | Path, out_dir: str | Path | None = None) -> list[Path]:
    """Render PNGs for every known CSV in run_dir; returns written paths."""
    run_dir = Path(run_dir)
    out_dir = run_dir if out_dir is None else Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    history = run_dir / "history.csv"
    if history.exists():
        rows = _read_csv(history)
        if rows:
            target = out_dir / "history.png"
            plot_history(rows, target)
            written.append(target)
    pareto = run_dir / "pareto.csv"
    if pareto.exists():
        rows = _read_csv(pareto)
        if rows:
            target = out_dir / "pareto.png"
            plot_pareto(rows, target)
            written.append(target)
    baseline = run_dir / "baseline.csv"
    if baseline.exists():
        rows = _read_csv(baseline)
        if rows:
            target = out_dir / "baseline.png"
            plot_baseline(rows, target)
            written.append(target)
    return written
