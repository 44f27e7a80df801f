"""Figures for verification reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _bars(ax, items, title):
    labels = [k for k, _ in items]
    values = [v for _, v in items]
    ax.barh(range(len(values)), values, color="#4c72b0")
    ax.set_yticks(range(len(values)))
    ax.set_yticklabels(labels, fontsize=7)
    ax.invert_yaxis()
    ax.set_title(title, fontsize=9)
    ax.set_xscale("symlog")


def report_figure(report: dict, path) -> Path:
    """One figure per suite: case/failure totals and the breakdown of stats
    (profiles, verdicts, violated laws)."""
    path = Path(path)
    stats = report.get("stats", {})
    groups = {}
    for key, value in stats.items():
        head, _, rest = key.partition(":")
        if rest:
            groups.setdefault(head, []).append((rest, value))
    panels = [("totals", [("cases", report["cases_run"]), ("failures", report["failure_count"])])]
    panels += sorted(groups.items())
    fig, axes = plt.subplots(len(panels), 1, figsize=(7, 1.2 + 1.6 * len(panels)), squeeze=False)
    for ax, (name, items) in zip(axes[:, 0], panels):
        _bars(ax, items, name)
    status = "passed" if report["passed"] else "failed"
    fig.suptitle(f"{report['suite']} ({status})", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def summary_figure(reports: list, path) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, 0.4 * len(reports) + 1.5))
    names = [r["suite"] for r in reports]
    cases = [r["cases_run"] for r in reports]
    fails = [r["failure_count"] for r in reports]
    ys = range(len(reports))
    ax.barh([y - 0.2 for y in ys], cases, height=0.4, label="cases", color="#4c72b0")
    ax.barh([y + 0.2 for y in ys], fails, height=0.4, label="failures", color="#c44e52")
    ax.set_yticks(list(ys))
    ax.set_yticklabels(names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xscale("symlog")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
