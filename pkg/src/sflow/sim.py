"""Discrete-event simulation of both orchestrators.

run_event_driven wires the full reactive pipeline: store commits flow
through the CDC router into latency-bearing queues, a batched scheduler
consumes trigger/lifecycle events, and executors walk task attempts
through their milestones.  run_baseline models the polling comparator:
a worker fleet that scans the metadata database every few seconds and
scales out slowly.

Both produce a TraceLog: the ordered event record, all task attempts,
and a final store snapshot.  Identical (workload, model, seed) inputs
yield bit-identical traces.
"""

from __future__ import annotations

import csv
import heapq
import io
import json
import math
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from .cloud import BaselineModel, ContentionTracker, PlatformModel, WarmPool
from .events import (
    EXECUTOR_CONTAINER,
    EXECUTOR_FUNCTION,
    SCHEDULE_UPDATER,
    SCHEDULER,
    EventKind,
    EventQueue,
    LatencySpec,
    RoutedEvent,
    ScheduleUpdater,
    route,
)
from .executors import (
    ExecutorConfig,
    TaskAttempt,
    default_config,
    plan_attempt,
)
from .model import (
    DagDefinition,
    ExecutorKind,
    MetadataStore,
    RunState,
    SflowError,
    TaskState,
)
from .scheduler import SchedulerConfig, scheduling_pass


class NonTermination(SflowError):
    pass


class EventLoop:
    """Minimal heap-based event loop; (time, insertion seq) orders events."""

    def __init__(self) -> None:
        self._heap: list[tuple[float, int, Callable[[], None]]] = []
        self._seq = 0
        self.now = 0.0
        self.processed = 0

    def schedule(self, time: float, callback: Callable[[], None]) -> None:
        if time < self.now:
            raise ValueError(f"cannot schedule into the past ({time} < {self.now})")
        heapq.heappush(self._heap, (time, self._seq, callback))
        self._seq += 1

    def run(self, max_events: int = 5_000_000, max_time: float = math.inf) -> None:
        while self._heap:
            time, _, callback = heapq.heappop(self._heap)
            if time > max_time:
                raise NonTermination(f"simulation passed max_time={max_time}s")
            self.processed += 1
            if self.processed > max_events:
                raise NonTermination(f"simulation exceeded {max_events} events")
            self.now = time
            callback()


class TraceLog:
    """Everything one simulation emitted, in deterministic order."""

    def __init__(self, system: str, seed: int, config: dict[str, Any]) -> None:
        self.system = system
        self.seed = seed
        self.config = config
        self.events: list[dict[str, Any]] = []
        self.attempts: list[TaskAttempt] = []
        self.logs: list[str] = []
        self.snapshot: dict[str, Any] = {}
        self.queue_stats: dict[str, dict[str, int]] = {}

    def record(self, time: float, kind: str, **data: Any) -> None:
        self.events.append({"time": time, "kind": kind, "data": data})

    def to_dict(self) -> dict[str, Any]:
        return {
            "system": self.system,
            "seed": self.seed,
            "config": self.config,
            "events": self.events,
            "attempts": [a.as_dict() for a in self.attempts],
            "logs": self.logs,
            "snapshot": self.snapshot,
            "queue_stats": self.queue_stats,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def task_rows(self) -> list[dict[str, Any]]:
        """Final per-task rows in (run_id, task_id) order."""
        rows = []
        for key in sorted(self.snapshot.get("tasks", {})):
            row = self.snapshot["tasks"][key]
            rows.append({
                "run_id": row["run_id"],
                "task_id": row["task_id"],
                "v_i": row["v_time"],
                "s_i": row["s_time"],
                "c_i": row["c_time"],
                "warm": row["warm"],
                "executor": row["executor"],
            })
        return rows

    def tasks_csv(self) -> str:
        return rows_to_csv(self.task_rows(),
                            ["run_id", "task_id", "v_i", "s_i", "c_i", "warm", "executor"])

    def events_csv(self) -> str:
        rows = [{"time": e["time"], "kind": e["kind"],
                 "payload": json.dumps(e["data"], sort_keys=True, separators=(",", ":"))}
                for e in self.events]
        return rows_to_csv(rows, ["time", "kind", "payload"])

    def write(self, outdir: Path) -> None:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "trace.json").write_text(self.to_json() + "\n")
        (outdir / "tasks.csv").write_text(self.tasks_csv())
        (outdir / "events.csv").write_text(self.events_csv())

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "TraceLog":
        trace = cls(payload["system"], payload["seed"], payload.get("config", {}))
        trace.events = payload.get("events", [])
        trace.logs = payload.get("logs", [])
        trace.snapshot = payload.get("snapshot", {})
        trace.queue_stats = payload.get("queue_stats", {})
        for row in payload.get("attempts", []):
            row = dict(row)
            row["executor"] = ExecutorKind(row["executor"])
            trace.attempts.append(TaskAttempt(**row))
        return trace


def load_trace(path: Path | str) -> TraceLog:
    return TraceLog.from_dict(json.loads(Path(path).read_text()))


def _csv_cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return value


def rows_to_csv(rows: list[dict[str, Any]], columns: list[str]) -> str:
    """Render dict rows as a byte-stable CSV (comma, header, LF)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row[c]) for c in columns])
    return buf.getvalue()


class EventDrivenSim:
    """The reactive pipeline: store -> CDC router -> queues -> consumers."""

    def __init__(self, dags: list[DagDefinition], platform: PlatformModel,
                 scheduler_config: SchedulerConfig = SchedulerConfig(),
                 seed: int = 0, system: str = "faas",
                 config_echo: Optional[dict[str, Any]] = None,
                 executor_configs: Optional[dict[ExecutorKind, ExecutorConfig]] = None):
        self.dags = list(dags)
        self.platform = platform
        self.sched_config = scheduler_config
        self.rng = np.random.default_rng(seed)
        self.loop = EventLoop()
        self.store = MetadataStore()
        self.trace = TraceLog(system, seed, config_echo or {})
        self.updater = ScheduleUpdater()
        hop = LatencySpec(fixed_s=platform.queue_hop_s)
        self.queues: dict[str, EventQueue] = {
            SCHEDULER: EventQueue("scheduler", "fifo", hop, platform.scheduler_batch),
            SCHEDULE_UPDATER: EventQueue("schedule_updater", "unordered", hop),
            EXECUTOR_FUNCTION: EventQueue("executor_function", "unordered", hop),
            EXECUTOR_CONTAINER: EventQueue("executor_container", "unordered", hop),
        }
        self.exec_configs = executor_configs or {
            ExecutorKind.FUNCTION: default_config(ExecutorKind.FUNCTION),
            ExecutorKind.CONTAINER: default_config(ExecutorKind.CONTAINER),
        }
        self.pool = WarmPool(platform.keepalive_s)
        self.contention = ContentionTracker(platform.contention_alpha,
                                            platform.contention_floor,
                                            platform.contention_window_s)
        self._cdc_cursor = 0
        self._function_inflight = 0
        self._function_waitlist: list[RoutedEvent] = []
        self._container_seq = 0
        self._pass_active = False

    # -- plumbing ----------------------------------------------------------

    def _flush_cdc(self) -> None:
        """Route every fresh commit to its destination queue."""
        now = self.loop.now
        records = self.store.drain_cdc(self._cdc_cursor)
        if not records:
            return
        self._cdc_cursor = records[-1].commit_seq
        for record in records:
            for dest, event in route(record):
                lag = self.platform.sample_cdc_latency(self.rng)
                deliver = self.queues[dest].push(event, now, self.rng, extra_s=lag)
                self.trace.record(now, "enqueue", queue=dest, event=event.kind.value,
                                  payload=event.payload, deliver_time=deliver)
                self._arm(dest, deliver)

    def _arm(self, dest: str, deliver: float) -> None:
        wake = max(deliver, self.loop.now)
        if dest == SCHEDULER:
            self.loop.schedule(wake, self._scheduler_wake)
        elif dest == SCHEDULE_UPDATER:
            self.loop.schedule(wake, self._updater_wake)
        elif dest == EXECUTOR_FUNCTION:
            self.loop.schedule(wake, lambda: self._executor_wake(ExecutorKind.FUNCTION))
        else:
            self.loop.schedule(wake, lambda: self._executor_wake(ExecutorKind.CONTAINER))

    # -- scheduler ----------------------------------------------------------

    def _scheduler_wake(self) -> None:
        now = self.loop.now
        queue = self.queues[SCHEDULER]
        batch = queue.deliver(now)
        if batch:
            # Single consumer shard: passes never overlap.
            assert not self._pass_active, "concurrent scheduling pass"
            self._pass_active = True
            actions, _ = scheduling_pass(self.store, batch, now, self.sched_config)
            self._pass_active = False
            self.trace.record(now, "scheduler_pass",
                              batch=[e.kind.value for e in batch],
                              actions=[a.kind.value for a in actions])
            self._flush_cdc()
        nxt = queue.next_ready_time()
        if nxt is not None and batch:
            # Leftovers (batch overflow) get their own pass.
            self._arm(SCHEDULER, nxt)

    # -- schedule updater / trigger source -----------------------------------

    def _updater_wake(self) -> None:
        now = self.loop.now
        for event in self.queues[SCHEDULE_UPDATER].deliver(now):
            plan = self.updater.schedule_update(event, self.store)
            self.trace.record(now, "schedule_updated", dag_id=plan.dag_id,
                              firings=len(plan.times))
            for logical_time in plan.times:
                self.loop.schedule(
                    max(now, logical_time),
                    lambda d=plan.dag_id, t=logical_time: self._fire_trigger(d, t))

    def _fire_trigger(self, dag_id: str, logical_time: float) -> None:
        now = self.loop.now
        if self.updater.plans.get(dag_id) is None:
            return  # plan was withdrawn by a re-registration
        if logical_time not in self.updater.plans[dag_id].times:
            return
        event = RoutedEvent(EventKind.PERIODIC_TRIGGER,
                            {"dag_id": dag_id, "logical_time": logical_time}, now)
        deliver = self.queues[SCHEDULER].push(event, now, self.rng)
        self.trace.record(now, "trigger_fired", dag_id=dag_id,
                          logical_time=logical_time, deliver_time=deliver)
        self._arm(SCHEDULER, deliver)

    # -- executors -----------------------------------------------------------

    def _executor_wake(self, kind: ExecutorKind) -> None:
        dest = EXECUTOR_FUNCTION if kind is ExecutorKind.FUNCTION else EXECUTOR_CONTAINER
        for event in self.queues[dest].deliver(self.loop.now):
            self._executor_handle(kind, event)

    def _executor_handle(self, kind: ExecutorKind, event: RoutedEvent) -> None:
        now = self.loop.now
        if (kind is ExecutorKind.FUNCTION
                and self._function_inflight >= self.platform.function_concurrency):
            self._function_waitlist.append(event)
            self.trace.record(now, "throttled", task_id=event.payload["task_id"],
                              inflight=self._function_inflight)
            return
        self._dispatch(kind, event)

    def _dispatch(self, kind: ExecutorKind, event: RoutedEvent) -> None:
        now = self.loop.now
        run_id = event.payload["run_id"]
        task_id = event.payload["task_id"]
        reads = 0
        inst = self.store.get_task(run_id, task_id)
        reads += 1
        if inst.state is not TaskState.QUEUED or inst.try_number != event.payload["try_number"]:
            self.trace.record(now, "stale_delivery", run_id=run_id, task_id=task_id)
            return
        run = self.store.get_run(run_id)
        reads += 1
        spec = self.store.get_dag(run.dag_id).task_map()[task_id]
        reads += 1

        if kind is ExecutorKind.FUNCTION:
            self._function_inflight += 1
            invoke_time = now + self.platform.orchestrator_hop_s
            env_id, warm = self.pool.acquire(invoke_time)
            ready = self.platform.warm_invoke_s if warm else self.platform.sample_cold_start(self.rng)
        else:
            env_id, warm = self._container_seq, False
            self._container_seq += 1
            ready = (self.platform.sample_container_provision(self.rng)
                     + self.platform.container_startup_s)

        attempt = plan_attempt(
            run_id, task_id, inst.try_number, kind, spec.duration_s, now, warm,
            env_id, ready, self.platform.setup_s, self.platform.orchestrator_hop_s,
            self.exec_configs[kind])
        attempt.store_reads = reads
        if kind is ExecutorKind.FUNCTION and not warm:
            self.contention.register(attempt.exec_start_time)
        self.trace.record(now, "dispatch", run_id=run_id, task_id=task_id,
                          executor=kind.value, warm=warm, env_id=env_id,
                          invoke_time=attempt.invoke_time,
                          exec_start=attempt.exec_start_time)
        self.loop.schedule(attempt.exec_start_time, lambda: self._exec_start(attempt))

    def _exec_start(self, attempt: TaskAttempt) -> None:
        now = self.loop.now
        extra = 0.0
        if attempt.executor is ExecutorKind.FUNCTION and not attempt.warm:
            extra = self.contention.extra_seconds(attempt.exec_start_time)
        attempt.inflation_s = extra
        attempt.exec_end_time = attempt.exec_start_time + attempt.duration_s + extra
        attempt.check_limit(self.exec_configs[attempt.executor])
        self.store.apply_transition(attempt.run_id, TaskState.RUNNING, attempt.task_id,
                                    now, stamps={"s_time": attempt.exec_start_time,
                                                 "warm": attempt.warm})
        self.trace.record(now, "exec_start", run_id=attempt.run_id,
                          task_id=attempt.task_id, warm=attempt.warm,
                          inflation_s=extra)
        self._flush_cdc()
        self.loop.schedule(attempt.exec_end_time, lambda: self._exec_end(attempt))

    def _exec_end(self, attempt: TaskAttempt) -> None:
        now = self.loop.now
        failed = float(self.rng.random()) < self.platform.exec_fault_rate
        attempt.status = "failed" if failed else "success"
        to = TaskState.FAILED if failed else TaskState.SUCCESS
        self.store.apply_transition(attempt.run_id, to, attempt.task_id, now,
                                    stamps={"c_time": attempt.exec_end_time})
        self.trace.record(now, "exec_end", run_id=attempt.run_id,
                          task_id=attempt.task_id, status=attempt.status)
        self._flush_cdc()
        self.loop.schedule(now + self.platform.log_push_s,
                           lambda: self._logs_pushed(attempt))

    def _logs_pushed(self, attempt: TaskAttempt) -> None:
        now = self.loop.now
        attempt.logs_pushed_time = now
        lost = float(self.rng.random()) < self.platform.log_fault_rate
        attempt.log_lost = lost
        if lost:
            self.trace.record(now, "log_lost", run_id=attempt.run_id,
                              task_id=attempt.task_id, try_number=attempt.try_number)
        else:
            self.trace.logs.append(attempt.log_line())
        self.trace.record(now, "logs_pushed", run_id=attempt.run_id,
                          task_id=attempt.task_id)
        self.trace.attempts.append(attempt)
        if attempt.executor is ExecutorKind.FUNCTION:
            self.pool.release(attempt.env_id, now)
            self._function_inflight -= 1
            while (self._function_waitlist
                   and self._function_inflight < self.platform.function_concurrency):
                pending = self._function_waitlist.pop(0)
                self._dispatch(ExecutorKind.FUNCTION, pending)

    # -- entry point ---------------------------------------------------------

    def run(self, max_events: int = 5_000_000, max_time: float = math.inf) -> TraceLog:
        for defn in self.dags:
            self.store.register_dag(defn, now=0.0)
            self.trace.record(0.0, "register_dag", dag_id=defn.dag_id,
                              tasks=len(defn.tasks), run_count=defn.run_count)
        self._flush_cdc()
        self.loop.run(max_events=max_events, max_time=max_time)
        expected = sum(d.run_count for d in self.dags)
        open_runs = [r.run_id for r in self.store.active_runs()]
        if open_runs or len(self.store.runs) != expected:
            raise NonTermination(
                f"drained loop with {len(open_runs)} open runs, "
                f"{len(self.store.runs)}/{expected} runs created")
        self.trace.snapshot = self.store.snapshot()
        self.trace.queue_stats = {
            q.name: {"enqueued": q.enqueued, "delivered": q.delivered}
            for q in self.queues.values()
        }
        return self.trace


def run_event_driven(dags: list[DagDefinition] | DagDefinition,
                     platform: Optional[PlatformModel] = None,
                     scheduler_config: Optional[SchedulerConfig] = None,
                     seed: int = 0, system: str = "faas",
                     config_echo: Optional[dict[str, Any]] = None,
                     max_events: int = 5_000_000,
                     max_time: float = math.inf) -> TraceLog:
    """Simulate the event-driven orchestrator over the given workload."""
    if isinstance(dags, DagDefinition):
        dags = [dags]
    sim = EventDrivenSim(dags, platform or PlatformModel(),
                         scheduler_config or SchedulerConfig(),
                         seed=seed, system=system, config_echo=config_echo)
    return sim.run(max_events=max_events, max_time=max_time)


class _Worker:
    __slots__ = ("available_at", "running")

    def __init__(self, available_at: float) -> None:
        self.available_at = available_at
        self.running = 0


class BaselineSim:
    """Polling comparator: fixed poll interval, slot-based worker fleet."""

    def __init__(self, dags: list[DagDefinition], model: BaselineModel,
                 seed: int = 0, config_echo: Optional[dict[str, Any]] = None):
        self.dags = list(dags)
        self.model = model
        self.rng = np.random.default_rng(seed)
        self.loop = EventLoop()
        self.store = MetadataStore()
        self.trace = TraceLog("baseline", seed, config_echo or {})
        self.workers: list[_Worker] = []
        self._pending_triggers: list[tuple[float, str]] = []
        self._tick_armed = False

    def run(self, max_events: int = 5_000_000, max_time: float = math.inf) -> TraceLog:
        for defn in self.dags:
            self.store.register_dag(defn, now=0.0)
            self.trace.record(0.0, "register_dag", dag_id=defn.dag_id,
                              tasks=len(defn.tasks), run_count=defn.run_count)
            period_s = defn.period_minutes * 60.0
            for k in range(defn.run_count):
                self._pending_triggers.append((k * period_s, defn.dag_id))
        self._pending_triggers.sort()
        self.workers = [_Worker(0.0) for _ in range(self.model.min_workers)]
        self._schedule_tick(0.0)
        self.loop.run(max_events=max_events, max_time=max_time)
        if self.store.active_runs() or self._pending_triggers:
            raise NonTermination("baseline loop drained with unfinished work")
        self.trace.snapshot = self.store.snapshot()
        return self.trace

    def _schedule_tick(self, time: float) -> None:
        if self._tick_armed:
            return
        self._tick_armed = True
        self.loop.schedule(time, self._tick)

    def _tick(self) -> None:
        self._tick_armed = False
        now = self.loop.now

        while self._pending_triggers and self._pending_triggers[0][0] <= now:
            fire_time, dag_id = self._pending_triggers.pop(0)
            self.store.create_dag_run(dag_id, fire_time, now)
            self.trace.record(now, "run_created", dag_id=dag_id, logical_time=fire_time)

        # The polling scheduler marks ready tasks and queues them in one scan.
        for run in self.store.active_runs():
            dag = self.store.get_dag(run.dag_id)
            deps = {spec.task_id: spec.deps for spec in dag.tasks}
            instances = self.store.run_tasks(run.run_id)
            states = {inst.task_id: inst.state for inst in instances}
            for inst in instances:
                if inst.state is TaskState.NONE and all(
                        states[d] is TaskState.SUCCESS for d in deps[inst.task_id]):
                    self.store.apply_transition(run.run_id, TaskState.SCHEDULED,
                                                inst.task_id, now, stamps={"v_time": now})
                    self.store.apply_transition(run.run_id, TaskState.QUEUED,
                                                inst.task_id, now)

        queued: list[tuple[float, str, str]] = []
        running = 0
        for run in self.store.active_runs():
            for inst in self.store.run_tasks(run.run_id):
                if inst.state is TaskState.QUEUED:
                    queued.append((inst.v_time, run.run_id, inst.task_id))
                elif inst.state is TaskState.RUNNING:
                    running += 1
        queued.sort()

        for v_time, run_id, task_id in queued:
            worker = self._free_worker(now)
            if worker is None:
                break
            dag = self.store.get_dag(self.store.get_run(run_id).dag_id)
            duration = dag.task_map()[task_id].duration_s
            start = now + self.model.task_launch_s
            end = start + duration
            worker.running += 1
            running += 1
            self.store.apply_transition(run_id, TaskState.RUNNING, task_id, now,
                                        stamps={"s_time": start})
            self.trace.record(now, "assigned", run_id=run_id, task_id=task_id,
                              start=start, end=end)
            self.loop.schedule(end, lambda r=run_id, t=task_id, w=worker: self._finish(r, t, w))

        for run in self.store.active_runs():
            instances = self.store.run_tasks(run.run_id)
            if all(inst.state is TaskState.SUCCESS for inst in instances):
                self.store.apply_transition(run.run_id, RunState.SUCCESS, None, now)
                self.trace.record(now, "run_finished", run_id=run.run_id)

        still_queued = sum(1 for run in self.store.active_runs()
                           for inst in self.store.run_tasks(run.run_id)
                           if inst.state is TaskState.QUEUED)
        demand = self.model.workers_needed(running + still_queued)
        while len(self.workers) < demand:
            arrival = now + self.model.sample_provision(self.rng)
            self.workers.append(_Worker(arrival))
            self.trace.record(now, "worker_requested", ready_at=arrival,
                              fleet=len(self.workers))
        self.trace.record(now, "worker_demand", demand=demand,
                          fleet=len(self.workers), running=running, queued=still_queued)

        if self.store.active_runs() or self._pending_triggers:
            self._schedule_tick(now + self.model.poll_interval_s)

    def _free_worker(self, now: float) -> Optional[_Worker]:
        for worker in self.workers:
            if worker.available_at <= now and worker.running < self.model.slots_per_worker:
                return worker
        return None

    def _finish(self, run_id: str, task_id: str, worker: _Worker) -> None:
        now = self.loop.now
        self.store.apply_transition(run_id, TaskState.SUCCESS, task_id, now,
                                    stamps={"c_time": now})
        worker.running -= 1
        self.trace.record(now, "exec_end", run_id=run_id, task_id=task_id,
                          status="success")


def run_baseline(dags: list[DagDefinition] | DagDefinition,
                 model: Optional[BaselineModel] = None, seed: int = 0,
                 config_echo: Optional[dict[str, Any]] = None,
                 max_events: int = 5_000_000,
                 max_time: float = math.inf) -> TraceLog:
    """Simulate the polling orchestrator over the given workload."""
    if isinstance(dags, DagDefinition):
        dags = [dags]
    sim = BaselineSim(dags, model or BaselineModel(), seed=seed, config_echo=config_echo)
    return sim.run(max_events=max_events, max_time=max_time)
