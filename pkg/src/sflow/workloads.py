"""Workload construction: synthetic DAG generators, a production-trace
parser, and shape analytics.

Trace files use one row per task, "M<id>[_<dep>...],duration_s", the
naming convention of batch-processing cluster traces where a task's
dependencies are encoded in its name.  Durations are clamped to 60 s to
keep replay on the function platform well inside its execution cap.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .model import DagDefinition, ExecutorKind, SflowError, TaskSpec, dag_from_row


class MalformedRow(SflowError):
    pass


class DanglingDependency(SflowError):
    pass


TRACE_DURATION_CAP_S = 60.0

# Run counts pair with trigger periods so experiments cover about an hour
# of simulated wall time (three firings for the long cold-start period).
_RUNS_BY_PERIOD = {5.0: 12, 10.0: 6, 30.0: 3}


def default_run_count(period_minutes: float) -> int:
    if period_minutes in _RUNS_BY_PERIOD:
        return _RUNS_BY_PERIOD[period_minutes]
    return max(1, round(60.0 / period_minutes))


def _task_ids(n: int) -> list[str]:
    width = max(3, len(str(n)))
    return [f"t{i:0{width}d}" for i in range(1, n + 1)]


def gen_chain(n: int, p: float, period_minutes: float = 5.0,
              run_count: Optional[int] = None,
              executor: ExecutorKind = ExecutorKind.FUNCTION,
              dag_id: Optional[str] = None) -> DagDefinition:
    """n tasks in sequence, each of duration p seconds."""
    if n < 1:
        raise ValueError("chain needs at least one task")
    ids = _task_ids(n)
    tasks = tuple(
        TaskSpec(ids[i], p, executor, deps=(ids[i - 1],) if i else ())
        for i in range(n))
    return DagDefinition(dag_id or f"chain-{n}", period_minutes,
                         run_count or default_run_count(period_minutes), tasks)


def gen_parallel(n: int, p: float, period_minutes: float = 5.0,
                 run_count: Optional[int] = None,
                 executor: ExecutorKind = ExecutorKind.FUNCTION,
                 dag_id: Optional[str] = None) -> DagDefinition:
    """A zero-duration root fanning out to n tasks of duration p seconds.

    The root always runs on the function platform; the executor hint only
    applies to the fan-out tasks.
    """
    if n < 1:
        raise ValueError("parallel needs at least one fan-out task")
    width = max(3, len(str(n)))
    root = f"t{0:0{width}d}"
    tasks = [TaskSpec(root, 0.0, ExecutorKind.FUNCTION)]
    tasks.extend(TaskSpec(tid, p, executor, deps=(root,)) for tid in _task_ids(n))
    return DagDefinition(dag_id or f"parallel-{n}", period_minutes,
                         run_count or default_run_count(period_minutes), tuple(tasks))


def gen_layered(n: int, width: int, p: float, period_minutes: float = 5.0,
                run_count: Optional[int] = None,
                executor: ExecutorKind = ExecutorKind.FUNCTION,
                dag_id: Optional[str] = None) -> DagDefinition:
    """n tasks in barrier-synchronized layers of at most `width` tasks."""
    if n < 1 or width < 1:
        raise ValueError("need n >= 1 and width >= 1")
    ids = _task_ids(n)
    tasks: list[TaskSpec] = []
    prev_layer: tuple[str, ...] = ()
    for offset in range(0, n, width):
        layer = ids[offset:offset + width]
        tasks.extend(TaskSpec(tid, p, executor, deps=prev_layer) for tid in layer)
        prev_layer = tuple(layer)
    return DagDefinition(dag_id or f"layered-{n}x{width}", period_minutes,
                         run_count or default_run_count(period_minutes), tuple(tasks))


def gen_forest(k: int, n: int, p: float, period_minutes: float = 5.0,
               run_count: Optional[int] = None,
               executor: ExecutorKind = ExecutorKind.FUNCTION,
               base_id: str = "forest") -> list[DagDefinition]:
    """k independent parallel DAGs triggered on the same cadence."""
    if k < 1:
        raise ValueError("forest needs at least one dag")
    return [
        gen_parallel(n, p, period_minutes, run_count, executor,
                     dag_id=f"{base_id}-{i:02d}")
        for i in range(k)
    ]


# -- production trace files ------------------------------------------------

_NAME_RE = re.compile(r"M(\d+)((?:_\d+)*)$")


def parse_trace_dag_text(text: str, dag_id: str = "trace-dag",
                         clamp_s: float = TRACE_DURATION_CAP_S) -> DagDefinition:
    """Parse "M<id>[_<dep>...],duration_s" rows into a DAG definition.

    Blank lines and '#' comments are ignored.  Durations above clamp_s are
    clamped; the trigger period follows the critical path (5 min for short
    DAGs, 10 min past 200 s).
    """
    rows: list[tuple[str, tuple[str, ...], float]] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise MalformedRow(f"line {lineno}: expected 'name,duration', got {raw!r}")
        name, dur_text = parts[0].strip(), parts[1].strip()
        match = _NAME_RE.fullmatch(name)
        if not match:
            raise MalformedRow(f"line {lineno}: bad task name {name!r}")
        try:
            duration = float(dur_text)
        except ValueError:
            raise MalformedRow(f"line {lineno}: bad duration {dur_text!r}") from None
        if not duration > 0:  # also rejects NaN
            raise MalformedRow(f"line {lineno}: duration must be positive, got {dur_text}")
        task_id = f"M{match.group(1)}"
        deps = tuple(f"M{tok}" for tok in match.group(2).split("_") if tok)
        if task_id in seen:
            # DagDefinition would catch this too, but the row context helps.
            raise MalformedRow(f"line {lineno}: duplicate task {task_id}")
        seen.add(task_id)
        rows.append((task_id, deps, min(duration, clamp_s)))
    if not rows:
        raise MalformedRow("no task rows found")
    for task_id, deps, _ in rows:
        for dep in deps:
            if dep not in seen:
                raise DanglingDependency(f"task {task_id} depends on missing {dep}")
    tasks = tuple(TaskSpec(tid, dur, ExecutorKind.FUNCTION, deps)
                  for tid, deps, dur in rows)
    probe = DagDefinition(dag_id, 5.0, 1, tasks)  # raises CycleDetected if cyclic
    stats = analyze(probe)
    period = stats.suggested_period_minutes
    return DagDefinition(dag_id, period, default_run_count(period), tasks)


def parse_trace_dag(path: str | Path, dag_id: Optional[str] = None,
                    clamp_s: float = TRACE_DURATION_CAP_S) -> DagDefinition:
    path = Path(path)
    return parse_trace_dag_text(path.read_text(), dag_id or path.stem, clamp_s)


def serialize_trace_dag(defn: DagDefinition) -> str:
    """Inverse of parse_trace_dag_text; parse(serialize(d)) == d on task data."""
    lines = []
    for spec in defn.tasks:
        match = _NAME_RE.fullmatch(spec.task_id)
        if not match or match.group(2):
            raise ValueError(f"task id {spec.task_id!r} is not trace-style (M<digits>)")
        name = spec.task_id + "".join(f"_{dep[1:]}" for dep in spec.deps)
        lines.append(f"{name},{spec.duration_s:g}")
    return "\n".join(lines) + "\n"


def load_dag_file(path: str | Path) -> DagDefinition:
    """Load a DAG from a JSON definition file or a trace CSV."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        return dag_from_row(json.loads(path.read_text()))
    return parse_trace_dag(path)


def fixture_path(name: str) -> Path:
    return Path(__file__).parent / "fixtures" / name


def list_fixtures() -> list[str]:
    return sorted(p.name for p in fixture_path("").glob("*.csv"))


# -- shape analytics ---------------------------------------------------------

@dataclass(frozen=True)
class DagShapeStats:
    """Structural summary of one DAG.

    critical_path_s is the largest total duration along any path;
    longest_path_len the largest node count along any path; and
    max_parallelism the peak concurrency of an idealized execution with
    zero overhead and unlimited resources.
    """

    n_tasks: int
    critical_path_s: float
    longest_path_len: int
    max_parallelism: int
    total_work_s: float
    suggested_period_minutes: float

    def normalization_factor(self) -> float:
        return self.longest_path_len / self.max_parallelism


def analyze(defn: DagDefinition) -> DagShapeStats:
    order = defn.topological_order()
    specs = defn.task_map()

    # Path DP for duration and node count.
    path_dur: dict[str, float] = {}
    path_len: dict[str, int] = {}
    # Earliest start as (time, causal depth); the integer component orders
    # zero-duration predecessors strictly before their successors.
    est: dict[str, tuple[float, int]] = {}
    for tid in order:
        spec = specs[tid]
        best_dur = 0.0
        best_len = 0
        start: tuple[float, int] = (0.0, 0)
        for dep in spec.deps:
            best_dur = max(best_dur, path_dur[dep])
            best_len = max(best_len, path_len[dep])
            finish = (est[dep][0] + specs[dep].duration_s, est[dep][1] + 1)
            if finish > start:
                start = finish
        path_dur[tid] = best_dur + spec.duration_s
        path_len[tid] = best_len + 1
        est[tid] = start

    # Concurrency sweep over half-open execution intervals.  Interval ends
    # sort before starts at identical instants, so back-to-back tasks never
    # count as concurrent while simultaneous siblings do.
    points: list[tuple[float, int, int]] = []
    for tid in order:
        t0, k0 = est[tid]
        points.append((t0, k0, 1))
        points.append((t0 + specs[tid].duration_s, k0 + 1, -1))
    points.sort()
    current = peak = 0
    for _, _, delta in points:
        current += delta
        peak = max(peak, current)

    critical = max(path_dur.values())
    return DagShapeStats(
        n_tasks=len(defn.tasks),
        critical_path_s=critical,
        longest_path_len=max(path_len.values()),
        max_parallelism=peak,
        total_work_s=sum(spec.duration_s for spec in defn.tasks),
        suggested_period_minutes=5.0 if critical <= 200.0 else 10.0,
    )
