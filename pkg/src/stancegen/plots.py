"""Figure rendering for the report path (written next to the CSV/JSON
outputs; every command works without figures)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .metrics import MetricReport, ZipfCurve


def save_zipf_figure(curves: dict[str, ZipfCurve], path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, curve in curves.items():
        ranks = range(1, len(curve.frequencies) + 1)
        ax.plot(ranks, curve.cdf, label=name)
    ax.set_xscale("log")
    ax.set_xlabel("token rank")
    ax.set_ylabel("cumulative frequency share")
    ax.set_title("Zipf CDF of generated tokens")
    ax.set_ylim(0, 1.02)
    if curves:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_metrics_figure(reports: dict[str, MetricReport], path) -> None:
    columns = MetricReport.COLUMNS
    fig, ax = plt.subplots(figsize=(7, 4))
    width = 0.8 / max(1, len(reports))
    for i, (name, report) in enumerate(reports.items()):
        xs = [j + i * width for j in range(len(columns))]
        ax.bar(xs, report.row(), width=width, label=name)
    ax.set_xticks([j + 0.4 - width / 2 for j in range(len(columns))])
    ax.set_xticklabels(columns, fontsize=8)
    ax.set_ylabel("score")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
