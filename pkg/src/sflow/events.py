"""Event plane: CDC routing, delivery queues, and the periodic trigger table.

A router turns committed CDC records into typed events bound for one of the
control-plane consumers (schedule updater, scheduler, or an executor
frontend).  Queues add delivery latency; the scheduler queue additionally
guarantees total order and batches its deliveries, mirroring a FIFO queue
with a single consumer shard.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

import numpy as np

from .model import CdcRecord, MetadataStore, SflowError, UnknownEntity


class UnknownTable(SflowError):
    pass


class UnknownDag(SflowError):
    pass


class EventKind(str, Enum):
    DAG_PARSED = "dag_parsed"
    PERIODIC_TRIGGER = "periodic_trigger"
    DAG_RUN_CREATED = "dag_run_created"
    TASK_QUEUED = "task_queued"
    TASK_FINISHED = "task_finished"
    TASK_FAILED = "task_failed"


# Queue destinations the router can address.
SCHEDULE_UPDATER = "schedule_updater"
SCHEDULER = "scheduler"
EXECUTOR_FUNCTION = "executor:function"
EXECUTOR_CONTAINER = "executor:container"


@dataclass
class RoutedEvent:
    kind: EventKind
    payload: dict[str, Any]
    emit_time: float
    deliver_time: Optional[float] = None
    seq: int = 0  # enqueue order, assigned by the queue

    def as_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "payload": self.payload,
            "emit_time": self.emit_time,
            "deliver_time": self.deliver_time,
        }


@dataclass(frozen=True)
class LatencySpec:
    """Per-message delivery latency: a fixed hop plus a uniform jitter term."""

    fixed_s: float = 0.0
    jitter_lo_s: float = 0.0
    jitter_hi_s: float = 0.0

    def __post_init__(self) -> None:
        if self.fixed_s < 0 or self.jitter_lo_s < 0 or self.jitter_hi_s < self.jitter_lo_s:
            raise ValueError(f"invalid latency spec {self}")

    def sample(self, rng: np.random.Generator) -> float:
        jitter = 0.0
        if self.jitter_hi_s > self.jitter_lo_s:
            jitter = float(rng.uniform(self.jitter_lo_s, self.jitter_hi_s))
        elif self.jitter_hi_s > 0:
            jitter = self.jitter_hi_s
        return self.fixed_s + jitter


class EventQueue:
    """Delivery queue with sampled latency.

    ordering="fifo" chains deliver times monotonically so consumption order
    equals enqueue order (total order); "unordered" releases each message
    at its own sampled time.  batch_size caps how many ready messages a
    single deliver() call can hand out.
    """

    def __init__(self, name: str, ordering: str = "unordered",
                 latency: LatencySpec = LatencySpec(),
                 batch_size: Optional[int] = None) -> None:
        if ordering not in ("fifo", "unordered"):
            raise ValueError(f"unknown ordering {ordering!r}")
        if batch_size is not None and batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        self.name = name
        self.ordering = ordering
        self.latency = latency
        self.batch_size = batch_size
        self._items: list[RoutedEvent] = []
        self._seq = 0
        self._last_deliver = 0.0
        self.enqueued: int = 0
        self.delivered: int = 0

    def push(self, event: RoutedEvent, now: float, rng: np.random.Generator,
             extra_s: float = 0.0) -> float:
        """Enqueue with sampled latency; extra_s adds upstream (CDC) delay."""
        deliver = now + extra_s + self.latency.sample(rng)
        if self.ordering == "fifo":
            deliver = max(deliver, self._last_deliver)
            self._last_deliver = deliver
        event.deliver_time = deliver
        event.seq = self._seq
        self._seq += 1
        self.enqueued += 1
        self._items.append(event)
        return deliver

    def deliver(self, now: float) -> list[RoutedEvent]:
        """Pop every message due by `now`, capped at batch_size, in order."""
        cap = self.batch_size if self.batch_size is not None else len(self._items)
        if self.ordering == "fifo":
            batch: list[RoutedEvent] = []
            while self._items and len(batch) < cap and self._items[0].deliver_time <= now:
                batch.append(self._items.pop(0))
        else:
            ready = sorted((e for e in self._items if e.deliver_time <= now),
                           key=lambda e: (e.deliver_time, e.seq))[:cap]
            taken = {id(e) for e in ready}
            self._items = [e for e in self._items if id(e) not in taken]
            batch = ready
        self.delivered += len(batch)
        return batch

    def next_ready_time(self) -> Optional[float]:
        if not self._items:
            return None
        if self.ordering == "fifo":
            return self._items[0].deliver_time
        return min(e.deliver_time for e in self._items)

    def __len__(self) -> int:
        return len(self._items)


def route(record: CdcRecord) -> list[tuple[str, RoutedEvent]]:
    """Map one CDC record to its destination events.

    Every (table, op, state) combination has exactly one outcome, possibly
    the empty list; tables outside the metadata schema raise UnknownTable.
    """
    after = record.after_image
    t = record.commit_time
    if record.table == "dag_definition":
        event = RoutedEvent(EventKind.DAG_PARSED, {"dag_id": after["dag_id"]}, t)
        return [(SCHEDULE_UPDATER, event)]
    if record.table == "dag_run":
        if record.op == "insert":
            payload = {"dag_id": after["dag_id"], "run_id": after["run_id"]}
            return [(SCHEDULER, RoutedEvent(EventKind.DAG_RUN_CREATED, payload, t))]
        return []  # terminal run states fan out nowhere
    if record.table == "task_instance":
        if record.op == "insert":
            return []
        state = after["state"]
        key = {"run_id": after["run_id"], "task_id": after["task_id"]}
        if state == "queued":
            payload = dict(key, executor=after["executor"], try_number=after["try_number"])
            dest = EXECUTOR_CONTAINER if after["executor"] == "container" else EXECUTOR_FUNCTION
            return [(dest, RoutedEvent(EventKind.TASK_QUEUED, payload, t))]
        if state == "success":
            return [(SCHEDULER, RoutedEvent(EventKind.TASK_FINISHED, dict(key), t))]
        if state == "failed":
            payload = dict(key, try_number=after["try_number"])
            return [(SCHEDULER, RoutedEvent(EventKind.TASK_FAILED, payload, t))]
        return []  # scheduled/running updates stay internal
    raise UnknownTable(f"no route for table {record.table!r}")


@dataclass
class TriggerPlan:
    dag_id: str
    times: list[float]


class ScheduleUpdater:
    """Consumes dag_parsed events and plans periodic trigger firings.

    Re-registration replaces the prior plan.  Triggers are anchored at t=0:
    a DAG with period T minutes and run_count R fires at 0, 60T, ...,
    60T(R-1) regardless of when the definition row was committed (firings
    already in the past are emitted immediately by the simulator).
    """

    def __init__(self) -> None:
        self.plans: dict[str, TriggerPlan] = {}

    def schedule_update(self, event: RoutedEvent, store: MetadataStore) -> TriggerPlan:
        if event.kind is not EventKind.DAG_PARSED:
            raise ValueError(f"schedule_update expects dag_parsed, got {event.kind}")
        dag_id = event.payload["dag_id"]
        try:
            defn = store.get_dag(dag_id)
        except UnknownEntity:
            raise UnknownDag(f"dag_parsed for unregistered dag {dag_id!r}") from None
        period_s = defn.period_minutes * 60.0
        plan = TriggerPlan(dag_id, [k * period_s for k in range(defn.run_count)])
        self.plans[dag_id] = plan
        return plan
