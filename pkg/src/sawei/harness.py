"""Experiment runner: task x schedule x seed grids, IQM/rank statistics,
ablation sweeps, and on-disk artifacts consumed by the report step."""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product
from pathlib import Path

import numpy as np

from . import benchmarks
from .control import SchedulePolicy
from .errors import GridMismatch, SaweiError
from .loop import RunConfig, run_bo

SEED_OFFSET_ENV = "SAWEI_SEED_OFFSET"

DEFAULT_ABLATION_GRID = {
    "delta_alpha": [0.05, 0.1, 0.25],
    "attitude_mode": ["last", "inc_change", "last_adjust"],
    "epsilon": [0.05, 0.1, 0.5, 1.0],
}


def iqm(values) -> float:
    """Interquartile mean: sort, drop floor(k/4) per side, average the rest."""
    v = np.sort(np.asarray(values, dtype=float))
    drop = len(v) // 4
    return float(np.mean(v[drop: len(v) - drop]))


@dataclass(frozen=True)
class TaskSpec:
    """Either a synthetic (function, dimension, instance) or a tabular file."""

    function: str | None = None
    dimension: int | None = None
    instance: int = 1
    tabular: str | None = None

    def build(self):
        if self.tabular is not None:
            return benchmarks.load_tabular(self.tabular)
        return benchmarks.make_synthetic(self.function, self.dimension, self.instance)

    @property
    def label(self) -> str:
        if self.tabular is not None:
            return Path(self.tabular).stem
        return f"{self.function}_{self.dimension}d_i{self.instance}"

    @staticmethod
    def from_dict(d: dict) -> "TaskSpec":
        return TaskSpec(
            function=d.get("function"),
            dimension=d.get("dimension"),
            instance=d.get("instance", 1),
            tabular=d.get("tabular"),
        )


def schedule_from_dict(d: dict) -> SchedulePolicy:
    return SchedulePolicy(
        variant=d["variant"],
        alpha=d.get("alpha"),
        alpha_from=d.get("alpha_from"),
        alpha_to=d.get("alpha_to"),
        n_steps=d.get("n_steps", 5),
        fraction=d.get("fraction"),
    )


@dataclass(frozen=True)
class ExperimentConfig:
    tasks: tuple[TaskSpec, ...]
    schedules: tuple[SchedulePolicy, ...]
    seeds: tuple[int, ...]
    run: RunConfig = field(default_factory=RunConfig)

    def __post_init__(self):
        if not (self.tasks and self.schedules and self.seeds):
            raise ValueError("tasks, schedules, and seeds must be nonempty")

    @staticmethod
    def from_dict(d: dict) -> "ExperimentConfig":
        run_kwargs = dict(d.get("run", {}))
        return ExperimentConfig(
            tasks=tuple(TaskSpec.from_dict(t) for t in d["tasks"]),
            schedules=tuple(schedule_from_dict(s) for s in d["schedules"]),
            seeds=tuple(int(s) for s in d["seeds"]),
            run=RunConfig(**run_kwargs),
        )

    @staticmethod
    def from_file(path) -> "ExperimentConfig":
        with open(path) as fh:
            return ExperimentConfig.from_dict(json.load(fh))


def seed_offset() -> int:
    return int(os.environ.get(SEED_OFFSET_ENV, "0"))


def trace_name(task_label: str, sched_label: str, seed: int) -> str:
    return f"{task_label}__{sched_label}__s{seed}.csv"


def _execute_run(args):
    task, policy, seed, run_cfg, out_dir = args
    try:
        return "ok", _execute_run_inner(task, policy, seed, run_cfg, out_dir)
    except SaweiError as exc:
        return "fail", {
            "task": task.label, "schedule": policy.label(),
            "seed": seed, "error": str(exc),
        }


def _execute_run_inner(task, policy, seed, run_cfg, out_dir):
    objective = task.build()
    cfg = replace(run_cfg, schedule=policy, seed=seed)
    trace = run_bo(objective, cfg)
    path = Path(out_dir) / "traces" / trace_name(task.label, policy.label(), seed)
    trace.to_csv(path)
    trace.summary_to_json(path.with_suffix(".json"))
    bo_rows = [r for r in trace.rows if r.phase == "bo"]
    return {
        "task": task.label,
        "schedule": policy.label(),
        "seed": seed,
        "trace": str(path.relative_to(out_dir)),
        "final_regret": trace.rows[-1].regret,
        "final_log10_regret": trace.rows[-1].log10_regret,
        "adjust_events": trace.adjust_events,
        "regret_curve": [r.regret for r in bo_rows],
        "log10_regret_curve": [r.log10_regret for r in bo_rows],
    }


def run_experiment(cfg: ExperimentConfig, out_dir, workers: int = 1) -> dict:
    """Run the full grid, writing one trace CSV per run, per-(task, schedule)
    aggregate curves, and a manifest. Deterministic per config and seed set."""
    out_dir = Path(out_dir)
    (out_dir / "traces").mkdir(parents=True, exist_ok=True)
    (out_dir / "aggregates").mkdir(exist_ok=True)

    offset = seed_offset()
    seeds = [s + offset for s in cfg.seeds]
    jobs = [(task, policy, seed, cfg.run, out_dir)
            for task, policy, seed in product(cfg.tasks, cfg.schedules, seeds)]

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_execute_run, jobs))
    else:
        outcomes = [_execute_run(job) for job in jobs]
    results = [payload for status, payload in outcomes if status == "ok"]
    failures = [payload for status, payload in outcomes if status == "fail"]

    aggregates = {}
    for res in results:
        aggregates.setdefault((res["task"], res["schedule"]), []).append(res)
    aggregate_files = []
    for (task, sched), runs in sorted(aggregates.items()):
        runs = sorted(runs, key=lambda r: r["seed"])
        curves = np.array([r["regret_curve"] for r in runs])
        agg = {
            "task": task,
            "schedule": sched,
            "seeds": [r["seed"] for r in runs],
            "iqm_regret_curve": [iqm(curves[:, j]) for j in range(curves.shape[1])],
            "iqm_final_regret": iqm([r["final_regret"] for r in runs]),
            "final_log10_regrets": [r["final_log10_regret"] for r in runs],
        }
        name = f"aggregates/{task}__{sched}.json"
        _write_json(out_dir / name, agg)
        aggregate_files.append(name)

    manifest = {
        "tasks": [t.label for t in cfg.tasks],
        "schedules": [s.label() for s in cfg.schedules],
        "seeds": seeds,
        "bo_budget": cfg.run.bo_budget,
        "init_size": cfg.run.init_size,
        "runs": sorted(
            ({k: r[k] for k in ("task", "schedule", "seed", "trace",
                                "final_regret", "final_log10_regret", "adjust_events")}
             for r in results),
            key=lambda r: (r["task"], r["schedule"], r["seed"]),
        ),
        "aggregates": aggregate_files,
        "failures": failures,
    }
    _write_json(out_dir / "manifest.json", manifest)
    return manifest


def _write_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass
class RankReport:
    schedules: list[str]
    steps: int
    per_step_mean_ranks: dict[str, np.ndarray]
    final_table: dict[str, float]


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ascending ranks with ties sharing the mean rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i: j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def ranks_per_step(curves: dict[str, dict[str, np.ndarray]]) -> RankReport:
    """curves: task -> schedule -> per-step IQM regret. Ranks schedules per
    (task, step), averages over tasks, and aggregates final-step ranks per
    schedule with the IQM over tasks."""
    tasks = sorted(curves)
    schedules = sorted(curves[tasks[0]])
    lengths = {len(np.asarray(curves[t][s])) for t in tasks for s in curves[t]}
    if len(lengths) != 1 or any(sorted(curves[t]) != schedules for t in tasks):
        raise GridMismatch("all tasks must share schedules and step grids")
    steps = lengths.pop()

    per_task_ranks = {}  # task -> (steps, n_sched)
    for task in tasks:
        mat = np.array([np.asarray(curves[task][s], dtype=float) for s in schedules])
        per_task_ranks[task] = np.array(
            [_average_ranks(mat[:, j]) for j in range(steps)]
        )

    mean_ranks = np.mean([per_task_ranks[t] for t in tasks], axis=0)  # (steps, n)
    final_table = {
        s: iqm([per_task_ranks[t][-1, i] for t in tasks])
        for i, s in enumerate(schedules)
    }
    return RankReport(
        schedules=schedules,
        steps=steps,
        per_step_mean_ranks={s: mean_ranks[:, i] for i, s in enumerate(schedules)},
        final_table=final_table,
    )


def load_aggregate_curves(out_dir) -> dict[str, dict[str, np.ndarray]]:
    out_dir = Path(out_dir)
    with open(out_dir / "manifest.json") as fh:
        manifest = json.load(fh)
    curves: dict[str, dict[str, np.ndarray]] = {}
    for name in manifest["aggregates"]:
        with open(out_dir / name) as fh:
            agg = json.load(fh)
        curves.setdefault(agg["task"], {})[agg["schedule"]] = np.asarray(
            agg["iqm_regret_curve"]
        )
    return curves


def ablation_sweep(cfg: ExperimentConfig, grid: dict | None, out_dir,
                   workers: int = 1) -> dict:
    """Run the controller schedule over every (delta_alpha, attitude_mode,
    epsilon) combination and summarize min-max-normalized final log regret
    per task across combos."""
    grid = dict(DEFAULT_ABLATION_GRID if grid is None else grid)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sawei = SchedulePolicy("sawei")

    combos = list(product(grid["delta_alpha"], grid["attitude_mode"], grid["epsilon"]))
    combo_results = []
    for delta_alpha, mode, eps in combos:
        label = f"da{delta_alpha:g}_{mode}_eps{eps:g}"
        sub_cfg = ExperimentConfig(
            tasks=cfg.tasks,
            schedules=(sawei,),
            seeds=cfg.seeds,
            run=replace(cfg.run, delta_alpha=delta_alpha, attitude_mode=mode,
                        epsilon=eps),
        )
        manifest = run_experiment(sub_cfg, out_dir / label, workers=workers)
        per_task = {}
        for name in manifest["aggregates"]:
            with open(out_dir / label / name) as fh:
                agg = json.load(fh)
            per_task[agg["task"]] = iqm(agg["final_log10_regrets"])
        combo_results.append({
            "label": label,
            "delta_alpha": delta_alpha,
            "attitude_mode": mode,
            "epsilon": eps,
            "final_log10_regret": per_task,
        })

    tasks = sorted(combo_results[0]["final_log10_regret"])
    for task in tasks:
        vals = np.array([c["final_log10_regret"][task] for c in combo_results])
        span = vals.max() - vals.min()
        normed = np.zeros_like(vals) if span == 0 else (vals - vals.min()) / span
        for c, v in zip(combo_results, normed):
            c.setdefault("normalized_regret", {})[task] = float(v)
    for c in combo_results:
        c["mean_normalized_regret"] = float(
            np.mean([c["normalized_regret"][t] for t in tasks])
        )

    summary = {"grid": grid, "combos": combo_results, "tasks": tasks}
    _write_json(out_dir / "ablation_summary.json", summary)
    with open(out_dir / "ablation_summary.csv", "w") as fh:
        fh.write("label,delta_alpha,attitude_mode,epsilon,"
                 + ",".join(f"norm_regret_{t}" for t in tasks)
                 + ",mean_normalized_regret\n")
        for c in combo_results:
            cells = [c["label"], repr(float(c["delta_alpha"])), c["attitude_mode"],
                     repr(float(c["epsilon"]))]
            cells += [repr(c["normalized_regret"][t]) for t in tasks]
            cells.append(repr(c["mean_normalized_regret"]))
            fh.write(",".join(cells) + "\n")
    return summary
