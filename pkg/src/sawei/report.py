"""Report emission: delimited summaries plus matplotlib figures.

Everything numeric is written as CSV; figures (SVG) are a rendering of the
same data. Figure output is reproducible: timestamps are stripped and the
SVG hash salt is pinned.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import MissingManifest  # noqa: E402
from .harness import load_aggregate_curves, ranks_per_step  # noqa: E402

plt.rcParams["svg.hashsalt"] = "sawei-report"

_SAVEFIG_KW = {"metadata": {"Date": None}, "format": "svg"}


def _read_traces(out_dir: Path, manifest: dict) -> dict:
    """trace rows grouped by (task, schedule) -> list of per-seed row dicts."""
    grouped: dict[tuple[str, str], list[list[dict]]] = {}
    for run in sorted(manifest["runs"], key=lambda r: (r["task"], r["schedule"], r["seed"])):
        with open(out_dir / run["trace"], newline="") as fh:
            rows = [r for r in csv.DictReader(fh) if r["phase"] == "bo"]
        grouped.setdefault((run["task"], run["schedule"]), []).append(rows)
    return grouped


def _mean_column(rows_per_seed, column) -> np.ndarray | None:
    series = []
    for rows in rows_per_seed:
        vals = [r[column] for r in rows]
        if any(v == "" for v in vals):
            return None
        series.append([float(v) for v in vals])
    return np.mean(series, axis=0)


def _save(fig, path: Path) -> None:
    fig.savefig(path, **_SAVEFIG_KW)
    plt.close(fig)


def emit_report(out_dir, plots: bool = True) -> list[Path]:
    """Render rank, regret, alpha, and UBR summaries from a finished
    experiment directory. Returns the written paths."""
    out_dir = Path(out_dir)
    manifest_path = out_dir / "manifest.json"
    if not manifest_path.exists():
        raise MissingManifest(f"{manifest_path} not found")
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    if not manifest.get("schedules"):
        raise MissingManifest("manifest lists no schedules")

    report_dir = out_dir / "report"
    report_dir.mkdir(exist_ok=True)
    written: list[Path] = []

    curves = load_aggregate_curves(out_dir)
    report = ranks_per_step(curves)
    tasks = sorted(curves)

    # Ranks per step.
    path = report_dir / "ranks_per_step.csv"
    with open(path, "w") as fh:
        fh.write("step," + ",".join(report.schedules) + "\n")
        for j in range(report.steps):
            fh.write(str(j) + "," + ",".join(
                repr(float(report.per_step_mean_ranks[s][j])) for s in report.schedules
            ) + "\n")
    written.append(path)

    # Final regret and final rank table.
    path = report_dir / "final_regret_summary.csv"
    with open(path, "w") as fh:
        fh.write("task,schedule,iqm_final_regret,final_rank_iqm\n")
        for task in tasks:
            for s in report.schedules:
                fh.write(f"{task},{s},{curves[task][s][-1]!r},"
                         f"{report.final_table[s]!r}\n")
    written.append(path)

    traces = _read_traces(out_dir, manifest)

    # Alpha-drift diagnostic: mean alpha of the second half vs the first.
    path = report_dir / "alpha_drift.csv"
    with open(path, "w") as fh:
        fh.write("task,schedule,mean_alpha_first_half,mean_alpha_second_half,drift\n")
        for (task, sched), rows_per_seed in sorted(traces.items()):
            alpha = _mean_column(rows_per_seed, "alpha")
            if alpha is None:
                continue
            half = len(alpha) // 2
            first, second = float(np.mean(alpha[:half])), float(np.mean(alpha[half:]))
            fh.write(f"{task},{sched},{first!r},{second!r},{second - first!r}\n")
    written.append(path)

    # UBR switch diagnostic: switch iteration of hard EI->PI schedules.
    switch_rows = []
    bo_budget = manifest["bo_budget"]
    for (task, sched), rows_per_seed in sorted(traces.items()):
        if not sched.startswith("ei-pi"):
            continue
        fraction = float(sched.removeprefix("ei-pi"))
        switch_at = int(np.floor(fraction * bo_budget))
        ubr = _mean_column(rows_per_seed, "ubr_smoothed")
        before = float(ubr[switch_at - 1]) if switch_at >= 1 else float("nan")
        after = float(ubr[min(switch_at, len(ubr) - 1)])
        switch_rows.append((task, sched, switch_at, before, after))
    path = report_dir / "ubr_switch_diagnostic.csv"
    with open(path, "w") as fh:
        fh.write("task,schedule,switch_iteration,ubr_before,ubr_after\n")
        for task, sched, it, before, after in switch_rows:
            fh.write(f"{task},{sched},{it},{before!r},{after!r}\n")
    written.append(path)

    if not plots:
        return written

    fig, ax = plt.subplots(figsize=(7, 4))
    for s in report.schedules:
        ax.plot(range(report.steps), report.per_step_mean_ranks[s], label=s)
    ax.set_xlabel("optimization step")
    ax.set_ylabel("mean rank across tasks")
    ax.legend(fontsize=7)
    fig.tight_layout()
    _save(fig, report_dir / "ranks_per_step.svg")
    written.append(report_dir / "ranks_per_step.svg")

    for task in tasks:
        fig, (ax_a, ax_u) = plt.subplots(1, 2, figsize=(10, 3.5))
        for (t, sched), rows_per_seed in sorted(traces.items()):
            if t != task:
                continue
            alpha = _mean_column(rows_per_seed, "alpha")
            if alpha is not None:
                ax_a.plot(range(len(alpha)), alpha, label=sched)
            ubr = _mean_column(rows_per_seed, "ubr_smoothed")
            if ubr is not None:
                ax_u.plot(range(len(ubr)), ubr, label=sched)
        for t2, sched, it, _, _ in switch_rows:
            if t2 == task:
                ax_u.axvline(it, linestyle=":", linewidth=0.8, color="gray")
        ax_a.set_ylabel("weight")
        ax_a.set_xlabel("step")
        ax_u.set_ylabel("smoothed regret bound")
        ax_u.set_xlabel("step")
        ax_u.set_yscale("log")
        ax_a.legend(fontsize=6)
        fig.tight_layout()
        _save(fig, report_dir / f"alpha_ubr_{task}.svg")
        written.append(report_dir / f"alpha_ubr_{task}.svg")

    return written
