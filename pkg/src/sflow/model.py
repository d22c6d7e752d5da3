"""Core metadata model: DAG definitions, runs, task instances, and a CDC commit log.

The store mimics a relational metadata database fronting a workflow
orchestrator.  Every committed mutation appends one change-data-capture
record to a single totally ordered log; downstream consumers (router,
scheduler, executors) react to those records rather than to direct calls,
which is what makes the simulated control plane event-driven.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Optional


class SflowError(Exception):
    """Base class for all simulator errors."""


class CycleDetected(SflowError):
    pass


class DuplicateDagId(SflowError):
    pass


class DuplicateTaskId(SflowError):
    pass


class DuplicateRunId(SflowError):
    pass


class IllegalTransition(SflowError):
    pass


class UnknownEntity(SflowError):
    pass


class ExecutorKind(str, Enum):
    FUNCTION = "function"
    CONTAINER = "container"


class TaskState(str, Enum):
    NONE = "none"
    SCHEDULED = "scheduled"
    QUEUED = "queued"
    RUNNING = "running"
    SUCCESS = "success"
    FAILED = "failed"


class RunState(str, Enum):
    RUNNING = "running"
    SUCCESS = "success"
    FAILED = "failed"


# Legal task-state edges.  failed -> scheduled is the retry path.
_TASK_EDGES = {
    (TaskState.NONE, TaskState.SCHEDULED),
    (TaskState.SCHEDULED, TaskState.QUEUED),
    (TaskState.QUEUED, TaskState.RUNNING),
    (TaskState.RUNNING, TaskState.SUCCESS),
    (TaskState.RUNNING, TaskState.FAILED),
    (TaskState.FAILED, TaskState.SCHEDULED),
}

_RUN_EDGES = {
    (RunState.RUNNING, RunState.SUCCESS),
    (RunState.RUNNING, RunState.FAILED),
}


@dataclass(frozen=True)
class TaskSpec:
    """One node of a DAG definition."""

    task_id: str
    duration_s: float
    executor: ExecutorKind = ExecutorKind.FUNCTION
    deps: tuple[str, ...] = ()


@dataclass(frozen=True)
class DagDefinition:
    """A periodic workflow: tasks, precedence edges, and a trigger cadence."""

    dag_id: str
    period_minutes: float
    run_count: int
    tasks: tuple[TaskSpec, ...]

    def __post_init__(self) -> None:
        if self.period_minutes <= 0:
            raise ValueError(f"period_minutes must be positive, got {self.period_minutes}")
        if self.run_count < 1:
            raise ValueError(f"run_count must be >= 1, got {self.run_count}")
        seen: set[str] = set()
        for spec in self.tasks:
            if spec.task_id in seen:
                raise DuplicateTaskId(f"{self.dag_id}: duplicate task id {spec.task_id!r}")
            seen.add(spec.task_id)
            if not (spec.duration_s >= 0):
                raise ValueError(f"{spec.task_id}: duration_s must be >= 0")
        for spec in self.tasks:
            for dep in spec.deps:
                if dep not in seen:
                    raise UnknownEntity(f"{self.dag_id}: task {spec.task_id!r} depends on unknown {dep!r}")
        self.topological_order()  # raises CycleDetected on cyclic definitions

    def task_map(self) -> dict[str, TaskSpec]:
        return {spec.task_id: spec for spec in self.tasks}

    def topological_order(self) -> list[str]:
        """Kahn's algorithm with lexicographic tie-break so output is stable."""
        indegree = {spec.task_id: len(spec.deps) for spec in self.tasks}
        children: dict[str, list[str]] = {spec.task_id: [] for spec in self.tasks}
        for spec in self.tasks:
            for dep in spec.deps:
                children[dep].append(spec.task_id)
        frontier = sorted(tid for tid, deg in indegree.items() if deg == 0)
        order: list[str] = []
        while frontier:
            tid = frontier.pop(0)
            order.append(tid)
            opened = []
            for child in children[tid]:
                indegree[child] -= 1
                if indegree[child] == 0:
                    opened.append(child)
            if opened:
                frontier = sorted(frontier + opened)
        if len(order) != len(self.tasks):
            raise CycleDetected(f"{self.dag_id}: dependency cycle among tasks")
        return order


@dataclass
class DagRun:
    run_id: str
    dag_id: str
    logical_time: float
    state: RunState = RunState.RUNNING
    created_at: float = 0.0
    finished_at: Optional[float] = None

    def row(self) -> dict[str, Any]:
        return {
            "run_id": self.run_id,
            "dag_id": self.dag_id,
            "logical_time": self.logical_time,
            "state": self.state.value,
            "created_at": self.created_at,
            "finished_at": self.finished_at,
        }


@dataclass
class TaskInstance:
    """Per-run task row.  v/s/c are the ready, start, and completion stamps."""

    run_id: str
    task_id: str
    state: TaskState = TaskState.NONE
    try_number: int = 0
    v_time: Optional[float] = None
    s_time: Optional[float] = None
    c_time: Optional[float] = None
    executor: ExecutorKind = ExecutorKind.FUNCTION
    warm: Optional[bool] = None

    def row(self) -> dict[str, Any]:
        return {
            "run_id": self.run_id,
            "task_id": self.task_id,
            "state": self.state.value,
            "try_number": self.try_number,
            "v_time": self.v_time,
            "s_time": self.s_time,
            "c_time": self.c_time,
            "executor": self.executor.value,
            "warm": self.warm,
        }


@dataclass(frozen=True)
class CdcRecord:
    """One committed mutation.

    commit_seq is gapless and global across tables; before_image holds only
    the fields the mutation changed (with their prior values) while
    after_image is the full row, so consumers never need a second read.
    """

    commit_seq: int
    table: str
    op: str  # "insert" | "update"
    key: tuple[str, ...]
    before_image: dict[str, Any]
    after_image: dict[str, Any]
    commit_time: float


def run_id_for(dag_id: str, logical_time: float) -> str:
    """Deterministic run identity; creating the same run twice is detectable."""
    return f"{dag_id}@{logical_time:g}"


def _diff(before: dict[str, Any], after: dict[str, Any]) -> dict[str, Any]:
    return {k: before[k] for k in before if before[k] != after.get(k)}


class MetadataStore:
    """In-memory metadata database with a totally ordered CDC log."""

    def __init__(self) -> None:
        self.dags: dict[str, DagDefinition] = {}
        self.runs: dict[str, DagRun] = {}
        self.tasks: dict[tuple[str, str], TaskInstance] = {}
        self.log: list[CdcRecord] = []
        self._next_seq = 1

    # -- commit helpers ---------------------------------------------------

    def _commit(self, table: str, op: str, key: tuple[str, ...],
                before: dict[str, Any], after: dict[str, Any], now: float) -> CdcRecord:
        record = CdcRecord(self._next_seq, table, op, key, before, after, now)
        self._next_seq += 1
        self.log.append(record)
        return record

    # -- mutations --------------------------------------------------------

    def register_dag(self, defn: DagDefinition, now: float = 0.0,
                     replace: bool = False) -> CdcRecord:
        """Insert or (with replace=True) update a DAG definition row."""
        exists = defn.dag_id in self.dags
        if exists and not replace:
            raise DuplicateDagId(f"dag {defn.dag_id!r} is already registered")
        before: dict[str, Any] = {}
        if exists:
            old = self.dags[defn.dag_id]
            before = _diff(_dag_row(old), _dag_row(defn))
        self.dags[defn.dag_id] = defn
        op = "update" if exists else "insert"
        return self._commit("dag_definition", op, (defn.dag_id,), before, _dag_row(defn), now)

    def create_dag_run(self, dag_id: str, logical_time: float,
                       now: float = 0.0) -> list[CdcRecord]:
        """Insert a run row plus one task-instance row per task, atomically."""
        if dag_id not in self.dags:
            raise UnknownEntity(f"unknown dag {dag_id!r}")
        run_id = run_id_for(dag_id, logical_time)
        if run_id in self.runs:
            raise DuplicateRunId(f"run {run_id!r} already exists")
        defn = self.dags[dag_id]
        run = DagRun(run_id, dag_id, logical_time, RunState.RUNNING, created_at=now)
        self.runs[run_id] = run
        records = [self._commit("dag_run", "insert", (run_id,), {}, run.row(), now)]
        for spec in defn.tasks:
            inst = TaskInstance(run_id, spec.task_id, executor=spec.executor)
            self.tasks[(run_id, spec.task_id)] = inst
            records.append(
                self._commit("task_instance", "insert", (run_id, spec.task_id), {}, inst.row(), now)
            )
        return records

    def apply_transition(self, run_id: str, to: TaskState | RunState,
                         task_id: Optional[str] = None, now: float = 0.0,
                         stamps: Optional[dict[str, Any]] = None) -> CdcRecord:
        """Advance the task (or, with task_id=None, the run) state machine.

        Raises IllegalTransition for edges outside the machine and
        UnknownEntity for missing rows.  A retry edge (failed -> scheduled)
        clears the start/completion stamps from the prior attempt.
        """
        stamps = stamps or {}
        if task_id is not None:
            inst = self.tasks.get((run_id, task_id))
            if inst is None:
                raise UnknownEntity(f"unknown task instance ({run_id!r}, {task_id!r})")
            assert isinstance(to, TaskState)
            if (inst.state, to) not in _TASK_EDGES:
                raise IllegalTransition(f"task {task_id!r}: {inst.state.value} -> {to.value}")
            before_row = inst.row()
            inst.state = to
            if to is TaskState.SCHEDULED:
                inst.try_number += 1
                inst.v_time = stamps.get("v_time", now)
                inst.s_time = None
                inst.c_time = None
                inst.warm = None
            if "s_time" in stamps:
                inst.s_time = stamps["s_time"]
            if "c_time" in stamps:
                inst.c_time = stamps["c_time"]
            if "warm" in stamps:
                inst.warm = stamps["warm"]
            after = inst.row()
            return self._commit("task_instance", "update", (run_id, task_id),
                                _diff(before_row, after), after, now)

        run = self.runs.get(run_id)
        if run is None:
            raise UnknownEntity(f"unknown run {run_id!r}")
        assert isinstance(to, RunState)
        if (run.state, to) not in _RUN_EDGES:
            raise IllegalTransition(f"run {run_id!r}: {run.state.value} -> {to.value}")
        before_row = run.row()
        run.state = to
        run.finished_at = stamps.get("finished_at", now)
        after = run.row()
        return self._commit("dag_run", "update", (run_id,), _diff(before_row, after), after, now)

    # -- reads ------------------------------------------------------------

    def get_dag(self, dag_id: str) -> DagDefinition:
        try:
            return self.dags[dag_id]
        except KeyError:
            raise UnknownEntity(f"unknown dag {dag_id!r}") from None

    def get_run(self, run_id: str) -> DagRun:
        try:
            return self.runs[run_id]
        except KeyError:
            raise UnknownEntity(f"unknown run {run_id!r}") from None

    def get_task(self, run_id: str, task_id: str) -> TaskInstance:
        try:
            return self.tasks[(run_id, task_id)]
        except KeyError:
            raise UnknownEntity(f"unknown task instance ({run_id!r}, {task_id!r})") from None

    def has_run(self, dag_id: str, logical_time: float) -> bool:
        return run_id_for(dag_id, logical_time) in self.runs

    def run_tasks(self, run_id: str) -> list[TaskInstance]:
        """Task instances of a run, ordered by task id for determinism."""
        return sorted((inst for (rid, _), inst in self.tasks.items() if rid == run_id),
                      key=lambda inst: inst.task_id)

    def active_runs(self) -> list[DagRun]:
        return sorted((r for r in self.runs.values() if r.state is RunState.RUNNING),
                      key=lambda r: r.run_id)

    def drain_cdc(self, after_seq: int = 0) -> list[CdcRecord]:
        """All records with commit_seq > after_seq, in commit order.

        The log is retained, so draining is replayable: the same after_seq
        always yields the same records.
        """
        if after_seq >= self._next_seq - 1:
            return []
        # log[i].commit_seq == i + 1 because the sequence is gapless
        return self.log[after_seq:]

    def snapshot(self) -> dict[str, Any]:
        """Canonical dump of table contents, used by traces and tests."""
        return {
            "dags": {dag_id: _dag_row(d) for dag_id, d in sorted(self.dags.items())},
            "runs": {run_id: r.row() for run_id, r in sorted(self.runs.items())},
            "tasks": {f"{rid}/{tid}": inst.row()
                      for (rid, tid), inst in sorted(self.tasks.items())},
        }


def _dag_row(defn: DagDefinition) -> dict[str, Any]:
    return {
        "dag_id": defn.dag_id,
        "period_minutes": defn.period_minutes,
        "run_count": defn.run_count,
        "tasks": [
            {
                "id": spec.task_id,
                "duration_s": spec.duration_s,
                "executor": spec.executor.value,
                "deps": list(spec.deps),
            }
            for spec in defn.tasks
        ],
    }


def dag_from_row(row: dict[str, Any]) -> DagDefinition:
    """Inverse of the dag_definition row/JSON layout."""
    tasks = tuple(
        TaskSpec(
            task_id=t["id"],
            duration_s=float(t["duration_s"]),
            executor=ExecutorKind(t.get("executor", "function")),
            deps=tuple(t.get("deps", ())),
        )
        for t in row["tasks"]
    )
    return DagDefinition(
        dag_id=row["dag_id"],
        period_minutes=float(row["period_minutes"]),
        run_count=int(row["run_count"]),
        tasks=tasks,
    )
