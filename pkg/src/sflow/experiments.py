"""Config-driven experiment runner and canned experiment presets.

A config is a plain JSON-serializable dict:

    {
      "label": "cold start scaling",
      "workload": {"shape": "parallel", "n": 64, "p": 10.0,
                   "period_minutes": 30, "run_count": 1},
      "systems": ["faas", "baseline"],
      "seeds": [0, 1, 2],
      "platform": {...PlatformModel overrides...},
      "baseline": {...BaselineModel overrides...},
      "scheduler": {...SchedulerConfig overrides...},
      "exclude_first_run": false
    }

Systems: "faas" runs every task on the function platform, "caas" moves
nonzero-duration tasks to containers, "baseline" runs the polling
comparator.  run_config simulates every (system, seed) pair, pools the
run metrics per system, and can write per-run traces plus a summary.csv.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path
from typing import Any, Optional

from .cloud import BaselineModel, PlatformModel
from .metrics import SUMMARY_COLUMNS, SummaryRow, compute_metrics, summarize
from .model import DagDefinition, ExecutorKind, TaskSpec
from .scheduler import SchedulerConfig
from .sim import TraceLog, rows_to_csv, run_baseline, run_event_driven
from .workloads import (
    analyze,
    gen_chain,
    gen_forest,
    gen_layered,
    gen_parallel,
    load_dag_file,
)

SYSTEMS = ("faas", "caas", "baseline")


def build_workload(spec: dict[str, Any]) -> list[DagDefinition]:
    shape = spec.get("shape", "parallel")
    n = int(spec.get("n", 16))
    p = float(spec.get("p", 10.0))
    period = float(spec.get("period_minutes", 5.0))
    run_count = spec.get("run_count")
    run_count = int(run_count) if run_count is not None else None
    executor = ExecutorKind(spec.get("executor", "function"))
    if shape == "chain":
        return [gen_chain(n, p, period, run_count, executor)]
    if shape == "parallel":
        return [gen_parallel(n, p, period, run_count, executor)]
    if shape == "layered":
        width = int(spec.get("width", n))
        return [gen_layered(n, width, p, period, run_count, executor)]
    if shape == "forest":
        k = int(spec.get("k", 2))
        return gen_forest(k, n, p, period, run_count, executor)
    if shape == "file":
        dag = load_dag_file(spec["path"])
        return [dag]
    raise ValueError(f"unknown workload shape {spec.get('shape')!r}")


def retarget_executor(dags: list[DagDefinition], system: str) -> list[DagDefinition]:
    """Rewrite executor hints for the chosen system.

    caas moves every nonzero-duration task to the container platform;
    zero-duration coordination roots stay on functions.
    """
    if system not in ("faas", "caas"):
        return dags
    kind = ExecutorKind.CONTAINER if system == "caas" else ExecutorKind.FUNCTION
    out = []
    for dag in dags:
        tasks = tuple(
            TaskSpec(t.task_id, t.duration_s,
                     kind if t.duration_s > 0 else ExecutorKind.FUNCTION, t.deps)
            for t in dag.tasks)
        out.append(DagDefinition(dag.dag_id, dag.period_minutes, dag.run_count, tasks))
    return out


def run_config(config: dict[str, Any],
               out_dir: Optional[Path | str] = None) -> dict[str, Any]:
    """Run every (system, seed) pair of a config; optionally write artifacts."""
    dags = build_workload(config.get("workload", {}))
    systems = config.get("systems", ["faas", "baseline"])
    seeds = [int(s) for s in config.get("seeds", [0])]
    platform = PlatformModel(**config.get("platform", {}))
    baseline = BaselineModel(**config.get("baseline", {}))
    sched = SchedulerConfig(**config.get("scheduler", {}))
    exclude_first = bool(config.get("exclude_first_run", False))
    limits = {
        "max_events": int(config.get("max_events", 5_000_000)),
        "max_time": float(config.get("max_time", float("inf"))),
    }
    stats = analyze(dags[0]) if len(dags) == 1 else None

    unknown = [s for s in systems if s not in SYSTEMS]
    if unknown:
        raise ValueError(f"unknown systems {unknown}; choose from {SYSTEMS}")

    out = Path(out_dir) if out_dir is not None else None
    traces: dict[tuple[str, int], TraceLog] = {}
    summary: list[SummaryRow] = []
    for system in systems:
        workload = retarget_executor(dags, system)
        pooled = []
        for seed in seeds:
            if system == "baseline":
                trace = run_baseline(workload, baseline, seed, config_echo=config, **limits)
            else:
                trace = run_event_driven(workload, platform, sched, seed,
                                         system=system, config_echo=config, **limits)
            traces[(system, seed)] = trace
            pooled.extend(compute_metrics(trace, exclude_first_run=exclude_first))
            if out is not None:
                trace.write(out / system / f"seed-{seed}")
        summary.extend(summarize(pooled, system, stats))

    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "summary.csv").write_text(summary_csv(summary))
        (out / "config.json").write_text(
            json.dumps(config, sort_keys=True, indent=2) + "\n")
    return {"summary": summary, "traces": traces, "stats": stats, "dags": dags}


def summary_csv(rows: list[SummaryRow]) -> str:
    return rows_to_csv([asdict(r) for r in rows], SUMMARY_COLUMNS)


def read_summary_csv(path: Path | str) -> list[dict[str, Any]]:
    import csv

    with open(path, newline="") as handle:
        return [dict(row) for row in csv.DictReader(handle)]


def compare_summaries(left: list[dict[str, Any]], right: list[dict[str, Any]],
                      system: Optional[str] = None) -> list[dict[str, Any]]:
    """Join two summaries and emit left/right ratio columns.

    Rows are joined on metric name; when a side contains several systems
    (and no system filter is given) the join key includes the system.
    """
    if system is not None:
        left = [r for r in left if r["system"] == system]
        right = [r for r in right if r["system"] == system]
    multi = (len({r["system"] for r in left}) > 1
             or len({r["system"] for r in right}) > 1)

    def key(row: dict[str, Any]):
        return (row["system"], row["metric"]) if multi else row["metric"]

    right_by_key = {key(r): r for r in right}
    out = []
    for row in left:
        other = right_by_key.get(key(row))
        if other is None:
            continue
        l_median, r_median = float(row["median"]), float(other["median"])
        l_mean, r_mean = float(row["mean"]), float(other["mean"])
        out.append({
            "metric": row["metric"],
            "left_system": row["system"],
            "right_system": other["system"],
            "left_median": l_median,
            "right_median": r_median,
            "median_ratio": l_median / r_median if r_median else float("nan"),
            "left_mean": l_mean,
            "right_mean": r_mean,
            "mean_ratio": l_mean / r_mean if r_mean else float("nan"),
        })
    return out


COMPARE_COLUMNS = ["metric", "left_system", "right_system", "left_median",
                   "right_median", "median_ratio", "left_mean", "right_mean",
                   "mean_ratio"]


# -- canned experiment presets ------------------------------------------------

def preset_cold_parallel(n: int, seeds: Optional[list[int]] = None,
                         systems: Optional[list[str]] = None) -> dict[str, Any]:
    """One fan-out run from a fully cold platform, the scale experiment."""
    return {
        "label": f"cold parallel n={n}",
        "workload": {"shape": "parallel", "n": n, "p": 10.0,
                     "period_minutes": 30.0, "run_count": 1},
        "systems": systems or ["faas", "baseline"],
        "seeds": seeds if seeds is not None else list(range(20)),
    }


def preset_warm_chain(n: int = 1, seeds: Optional[list[int]] = None,
                      systems: Optional[list[str]] = None) -> dict[str, Any]:
    """Short-period chain; the first (cold) run is excluded from metrics."""
    return {
        "label": f"warm chain n={n}",
        "workload": {"shape": "chain", "n": n, "p": 10.0,
                     "period_minutes": 5.0, "run_count": 12},
        "systems": systems or ["faas", "baseline"],
        "seeds": seeds if seeds is not None else list(range(20)),
        "exclude_first_run": True,
    }


def preset_cold_single(seeds: Optional[list[int]] = None) -> dict[str, Any]:
    """Single task from cold, for the cold-start wait distribution."""
    return {
        "label": "cold single task",
        "workload": {"shape": "chain", "n": 1, "p": 10.0,
                     "period_minutes": 30.0, "run_count": 1},
        "systems": ["faas"],
        "seeds": seeds if seeds is not None else list(range(20)),
    }


def preset_container_single(seeds: Optional[list[int]] = None) -> dict[str, Any]:
    """Single container task, for the provisioning wait distribution."""
    return {
        "label": "container single task",
        "workload": {"shape": "chain", "n": 1, "p": 10.0,
                     "period_minutes": 30.0, "run_count": 1},
        "systems": ["caas"],
        "seeds": seeds if seeds is not None else list(range(20)),
    }


def preset_forest(k: int, n: int = 8, p: float = 10.0,
                  seeds: Optional[list[int]] = None) -> dict[str, Any]:
    """k independent fan-out DAGs on one cadence."""
    return {
        "label": f"forest k={k}",
        "workload": {"shape": "forest", "k": k, "n": n, "p": p,
                     "period_minutes": 5.0, "run_count": 2},
        "systems": ["faas", "baseline"],
        "seeds": seeds if seeds is not None else list(range(10)),
        "exclude_first_run": True,
    }
