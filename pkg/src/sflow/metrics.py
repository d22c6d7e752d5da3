"""Run metrics: makespan, per-task wait and duration, normalized overhead.

All metrics derive from the three per-task timestamps: v (ready for
scheduling), s (execution start), c (completion).  Makespan is
max(c) - min(v) over a run.  Normalized overhead rescales the gap between
makespan and the critical path by longest_path_len / max_parallelism so
chains and wide fans are comparable.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Any, Iterable, Optional, Union

from .model import SflowError
from .sim import TraceLog
from .workloads import DagShapeStats


class IncompleteTrace(SflowError):
    pass


@dataclass(frozen=True)
class RunMetrics:
    run_id: str
    dag_id: str
    logical_time: float
    makespan_s: float
    first_ready_s: float
    last_completion_s: float
    task_waits: tuple[float, ...]      # s - v per task
    task_durations: tuple[float, ...]  # c - s per task


def split_run_id(run_id: str) -> tuple[str, float]:
    dag_id, _, logical = run_id.rpartition("@")
    if not dag_id:
        raise ValueError(f"run id {run_id!r} lacks the dag@logical_time form")
    return dag_id, float(logical)


def _as_float(value: Any) -> Optional[float]:
    if value is None or value == "":
        return None
    return float(value)


def compute_metrics(source: Union[TraceLog, Iterable[dict[str, Any]]],
                    exclude_first_run: bool = False) -> list[RunMetrics]:
    """Per-run metrics from a trace or from tasks.csv-style rows.

    Raises IncompleteTrace when a task lacks timestamps (its run never
    finished).  exclude_first_run drops each DAG's earliest run, the
    conventional way to measure steady-state (warm) behaviour.
    """
    rows = source.task_rows() if isinstance(source, TraceLog) else list(source)
    by_run: dict[str, list[dict[str, Any]]] = {}
    for row in rows:
        by_run.setdefault(row["run_id"], []).append(row)

    metrics: list[RunMetrics] = []
    for run_id in sorted(by_run):
        dag_id, logical = split_run_id(run_id)
        waits: list[float] = []
        durations: list[float] = []
        v_min = float("inf")
        c_max = float("-inf")
        for row in by_run[run_id]:
            v = _as_float(row["v_i"])
            s = _as_float(row["s_i"])
            c = _as_float(row["c_i"])
            if v is None or s is None or c is None:
                raise IncompleteTrace(
                    f"task {row['task_id']} of {run_id} has no complete timestamps")
            waits.append(s - v)
            durations.append(c - s)
            v_min = min(v_min, v)
            c_max = max(c_max, c)
        metrics.append(RunMetrics(
            run_id=run_id, dag_id=dag_id, logical_time=logical,
            makespan_s=c_max - v_min, first_ready_s=v_min, last_completion_s=c_max,
            task_waits=tuple(waits), task_durations=tuple(durations)))

    if exclude_first_run:
        first = {}
        for m in metrics:
            if m.dag_id not in first or m.logical_time < first[m.dag_id]:
                first[m.dag_id] = m.logical_time
        metrics = [m for m in metrics if m.logical_time != first[m.dag_id]]
    return metrics


def normalized_overhead(makespan_s: float, stats: DagShapeStats) -> float:
    """(makespan - critical path) scaled by longest path over max parallelism."""
    return (makespan_s - stats.critical_path_s) * stats.normalization_factor()


@dataclass(frozen=True)
class SummaryRow:
    system: str
    metric: str
    count: int
    mean: float
    median: float
    min: float
    max: float


SUMMARY_COLUMNS = ["system", "metric", "count", "mean", "median", "min", "max"]


def _row(system: str, metric: str, values: list[float]) -> SummaryRow:
    return SummaryRow(system, metric, len(values),
                      statistics.fmean(values), statistics.median(values),
                      min(values), max(values))


def summarize(metrics: list[RunMetrics], system: str,
              stats: Optional[DagShapeStats] = None) -> list[SummaryRow]:
    """Aggregate run metrics into the summary.csv rows."""
    if not metrics:
        return []
    makespans = [m.makespan_s for m in metrics]
    waits = [w for m in metrics for w in m.task_waits]
    durations = [d for m in metrics for d in m.task_durations]
    rows = [
        _row(system, "makespan_s", makespans),
        _row(system, "task_wait_s", waits),
        _row(system, "task_duration_s", durations),
    ]
    if stats is not None:
        rows.append(_row(system, "normalized_overhead_s",
                         [normalized_overhead(m, stats) for m in makespans]))
    return rows
