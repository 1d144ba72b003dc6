"""Render a simulation report to files: canonical JSON, a per-game CSV,
and histogram figures."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .sim import SimReport  # noqa: E402


def write_report(report: SimReport, out_dir) -> list[Path]:
    """Write report.json, games.csv, and two PNG histograms; returns the
    paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    json_path = out / "report.json"
    json_path.write_text(report.to_json() + "\n", encoding="utf-8")
    written.append(json_path)

    csv_path = out / "games.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["game_id", "seed", "events", "mutation_score",
                         "attacker_points", "defender_points"])
        for r in report.records:
            writer.writerow([r.game_id, r.seed, r.events,
                             f"{r.mutation_score:.6f}",
                             r.attacker_points, r.defender_points])
    written.append(csv_path)

    written.append(_histogram(
        out / "mutation_scores.png", report.mutation_scores,
        "Final mutation score", "games", bins=20, value_range=(0.0, 1.0)))
    written.append(_histogram(
        out / "game_lengths.png", [r.events for r in report.records],
        "Game length (events)", "games", bins=20))
    return written


def _histogram(path: Path, values, xlabel: str, ylabel: str,
               bins: int = 20, value_range=None) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    if values:
        ax.hist(values, bins=bins, range=value_range, edgecolor="black")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path
