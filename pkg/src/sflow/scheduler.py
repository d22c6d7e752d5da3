"""Scheduling passes: turn delivered events plus store state into transitions.

A pass is the unit of scheduler work.  It treats most events as wake-up
signals and re-derives its decisions from the metadata store, so duplicate
deliveries are harmless (at-least-once delivery with an idempotent
consumer).  Each pass, in order: creates runs for trigger events, marks
ready tasks scheduled, promotes scheduled tasks to queued, and settles
finished runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .events import EventKind, RoutedEvent
from .model import (
    CdcRecord,
    MetadataStore,
    RunState,
    TaskInstance,
    TaskState,
    run_id_for,
)


@dataclass(frozen=True)
class SchedulerConfig:
    # max_tries counts the first attempt, so 2 means one retry.
    max_tries: int = 2
    # When False, a run created in a pass is left untouched until the
    # dag_run_created event comes back through the CDC pipeline; its roots
    # are scheduled by that later pass.  True collapses the round trip.
    single_pass_run_start: bool = False

    def __post_init__(self) -> None:
        if self.max_tries < 1:
            raise ValueError("max_tries must be >= 1")


class ActionKind(str, Enum):
    CREATE_RUN = "create_run"
    MARK_SCHEDULED = "mark_scheduled"
    MARK_QUEUED = "mark_queued"
    RUN_SUCCEEDED = "run_succeeded"
    RUN_FAILED = "run_failed"


@dataclass(frozen=True)
class SchedulerAction:
    kind: ActionKind
    dag_id: str
    run_id: str
    task_id: Optional[str] = None
    logical_time: Optional[float] = None


def handle_task_failure(inst: TaskInstance, config: SchedulerConfig) -> ActionKind:
    """Decide between a retry and giving up on the run."""
    if inst.state is not TaskState.FAILED:
        raise ValueError(f"task {inst.task_id!r} is not failed")
    if inst.try_number < config.max_tries:
        return ActionKind.MARK_SCHEDULED
    return ActionKind.RUN_FAILED


def plan_pass(store: MetadataStore, events: list[RoutedEvent],
              config: SchedulerConfig = SchedulerConfig()) -> list[SchedulerAction]:
    """Read-only planning step; returns actions in application order.

    Planning never sees rows it is about to create, so runs planned here
    are scheduled by a later pass (the CDC round trip) unless
    scheduling_pass collapses it.
    """
    actions: list[SchedulerAction] = []

    created: set[str] = set()
    for event in events:
        if event.kind is not EventKind.PERIODIC_TRIGGER:
            continue
        dag_id = event.payload["dag_id"]
        logical_time = float(event.payload["logical_time"])
        if store.has_run(dag_id, logical_time):
            continue  # duplicate trigger delivery
        run_id = run_id_for(dag_id, logical_time)
        if run_id in created:
            continue
        created.add(run_id)
        actions.append(SchedulerAction(ActionKind.CREATE_RUN, dag_id, run_id,
                                       logical_time=logical_time))

    to_schedule: list[tuple[str, str]] = []  # (run_id, task_id)
    failed_runs: list[tuple[str, str]] = []  # (run_id, dag_id)
    for run in store.active_runs():
        instances = store.run_tasks(run.run_id)
        states = {inst.task_id: inst.state for inst in instances}
        dag = store.get_dag(run.dag_id)
        deps = {spec.task_id: spec.deps for spec in dag.tasks}
        for inst in instances:
            if inst.state is TaskState.NONE:
                if all(states[d] is TaskState.SUCCESS for d in deps[inst.task_id]):
                    to_schedule.append((run.run_id, inst.task_id))
            elif inst.state is TaskState.FAILED:
                verdict = handle_task_failure(inst, config)
                if verdict is ActionKind.MARK_SCHEDULED:
                    to_schedule.append((run.run_id, inst.task_id))
                else:
                    failed_runs.append((run.run_id, run.dag_id))

    for run_id, task_id in to_schedule:
        dag_id = store.get_run(run_id).dag_id
        actions.append(SchedulerAction(ActionKind.MARK_SCHEDULED, dag_id, run_id, task_id))

    # Queue everything scheduled, oldest ready time first, ids as tie-break.
    queueable: list[tuple[float, str, str, str]] = []
    for run in store.active_runs():
        for inst in store.run_tasks(run.run_id):
            if inst.state is TaskState.SCHEDULED:
                v = inst.v_time if inst.v_time is not None else float("inf")
                queueable.append((v, run.run_id, inst.task_id, run.dag_id))
    for run_id, task_id in to_schedule:
        run = store.get_run(run_id)
        queueable.append((float("inf"), run_id, task_id, run.dag_id))
    queueable.sort(key=lambda item: (item[0], item[1], item[2]))
    seen_queue: set[tuple[str, str]] = set()
    for _, run_id, task_id, dag_id in queueable:
        if (run_id, task_id) in seen_queue:
            continue
        seen_queue.add((run_id, task_id))
        actions.append(SchedulerAction(ActionKind.MARK_QUEUED, dag_id, run_id, task_id))

    settled: set[str] = set()
    for run in store.active_runs():
        if run.run_id in settled:
            continue
        instances = store.run_tasks(run.run_id)
        if all(inst.state is TaskState.SUCCESS for inst in instances):
            actions.append(SchedulerAction(ActionKind.RUN_SUCCEEDED, run.dag_id, run.run_id))
            settled.add(run.run_id)
    for run_id, dag_id in failed_runs:
        if run_id not in settled:
            actions.append(SchedulerAction(ActionKind.RUN_FAILED, dag_id, run_id))
            settled.add(run_id)

    return actions


def apply_actions(store: MetadataStore, actions: list[SchedulerAction],
                  now: float) -> list[CdcRecord]:
    """Commit planned actions; ready tasks get v_i = now."""
    records: list[CdcRecord] = []
    for action in actions:
        if action.kind is ActionKind.CREATE_RUN:
            records.extend(store.create_dag_run(action.dag_id, action.logical_time, now))
        elif action.kind is ActionKind.MARK_SCHEDULED:
            records.append(store.apply_transition(
                action.run_id, TaskState.SCHEDULED, action.task_id, now,
                stamps={"v_time": now}))
        elif action.kind is ActionKind.MARK_QUEUED:
            records.append(store.apply_transition(
                action.run_id, TaskState.QUEUED, action.task_id, now))
        elif action.kind is ActionKind.RUN_SUCCEEDED:
            records.append(store.apply_transition(action.run_id, RunState.SUCCESS, None, now))
        elif action.kind is ActionKind.RUN_FAILED:
            records.append(store.apply_transition(action.run_id, RunState.FAILED, None, now))
    return records


def scheduling_pass(store: MetadataStore, events: list[RoutedEvent], now: float,
                    config: SchedulerConfig = SchedulerConfig()
                    ) -> tuple[list[SchedulerAction], list[CdcRecord]]:
    """Plan then commit one pass.  Replaying the same events is a no-op.

    With single_pass_run_start a pass that created runs immediately plans
    once more, so the new runs' root tasks do not wait for the
    dag_run_created round trip.
    """
    actions = plan_pass(store, events, config)
    records = apply_actions(store, actions, now)
    if (config.single_pass_run_start
            and any(a.kind is ActionKind.CREATE_RUN for a in actions)):
        follow = plan_pass(store, [], config)
        actions = actions + follow
        records = records + apply_actions(store, follow, now)
    return actions, records
