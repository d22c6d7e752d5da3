"""Event plane: delivery queues, CDC routing, and trigger planning."""

import numpy as np
import pytest

from sflow.events import (
    EXECUTOR_CONTAINER,
    EXECUTOR_FUNCTION,
    SCHEDULE_UPDATER,
    SCHEDULER,
    EventKind,
    EventQueue,
    LatencySpec,
    RoutedEvent,
    ScheduleUpdater,
    UnknownDag,
    UnknownTable,
    route,
)
from sflow.model import (
    CdcRecord,
    DagDefinition,
    ExecutorKind,
    MetadataStore,
    RunState,
    TaskSpec,
    TaskState,
)


def ping(i: int = 0) -> RoutedEvent:
    return RoutedEvent(EventKind.TASK_FINISHED, {"i": i}, emit_time=0.0)


class TestLatencySpec:
    def test_sample_within_bounds(self):
        rng = np.random.default_rng(0)
        spec = LatencySpec(fixed_s=0.5, jitter_lo_s=1.0, jitter_hi_s=2.0)
        samples = [spec.sample(rng) for _ in range(200)]
        assert all(1.5 <= s <= 2.5 for s in samples)
        assert len(set(samples)) > 1

    def test_degenerate_jitter_is_constant(self):
        rng = np.random.default_rng(0)
        spec = LatencySpec(fixed_s=0.1, jitter_lo_s=0.3, jitter_hi_s=0.3)
        assert spec.sample(rng) == pytest.approx(0.4)

    def test_invalid_specs(self):
        with pytest.raises(ValueError):
            LatencySpec(fixed_s=-1.0)
        with pytest.raises(ValueError):
            LatencySpec(jitter_lo_s=2.0, jitter_hi_s=1.0)


class TestEventQueue:
    def test_fifo_deliver_times_are_monotone(self):
        rng = np.random.default_rng(1)
        q = EventQueue("q", ordering="fifo",
                       latency=LatencySpec(jitter_lo_s=0.0, jitter_hi_s=5.0))
        times = [q.push(ping(i), now=0.0, rng=rng) for i in range(100)]
        assert times == sorted(times)

    def test_fifo_consumption_order_is_enqueue_order(self):
        rng = np.random.default_rng(2)
        q = EventQueue("q", ordering="fifo",
                       latency=LatencySpec(jitter_lo_s=0.0, jitter_hi_s=5.0))
        for i in range(50):
            q.push(ping(i), now=0.0, rng=rng)
        out = q.deliver(now=1e9)
        assert [e.payload["i"] for e in out] == list(range(50))

    def test_unordered_can_overtake(self):
        rng = np.random.default_rng(3)
        q = EventQueue("q", latency=LatencySpec(jitter_lo_s=0.0, jitter_hi_s=5.0))
        for i in range(50):
            q.push(ping(i), now=0.0, rng=rng)
        out = q.deliver(now=1e9)
        assert [e.payload["i"] for e in out] != list(range(50))
        times = [e.deliver_time for e in out]
        assert times == sorted(times)

    def test_deliver_respects_due_time(self):
        rng = np.random.default_rng(4)
        q = EventQueue("q", latency=LatencySpec(fixed_s=10.0))
        q.push(ping(), now=0.0, rng=rng)
        assert q.deliver(now=9.9) == []
        assert len(q.deliver(now=10.0)) == 1

    def test_batch_size_caps_each_deliver(self):
        rng = np.random.default_rng(5)
        q = EventQueue("q", ordering="fifo", batch_size=10)
        for i in range(25):
            q.push(ping(i), now=0.0, rng=rng)
        sizes = [len(q.deliver(now=1.0)) for _ in range(4)]
        assert sizes == [10, 10, 5, 0]

    def test_extra_delay_shifts_delivery(self):
        rng = np.random.default_rng(6)
        q = EventQueue("q")
        deliver = q.push(ping(), now=5.0, rng=rng, extra_s=2.5)
        assert deliver == pytest.approx(7.5)

    def test_next_ready_time(self):
        rng = np.random.default_rng(7)
        q = EventQueue("q", latency=LatencySpec(fixed_s=3.0))
        assert q.next_ready_time() is None
        q.push(ping(), now=1.0, rng=rng)
        assert q.next_ready_time() == pytest.approx(4.0)

    def test_counters(self):
        rng = np.random.default_rng(8)
        q = EventQueue("q")
        for i in range(3):
            q.push(ping(i), now=0.0, rng=rng)
        q.deliver(now=1.0)
        assert (q.enqueued, q.delivered, len(q)) == (3, 3, 0)

    def test_invalid_construction(self):
        with pytest.raises(ValueError):
            EventQueue("q", ordering="lifo")
        with pytest.raises(ValueError):
            EventQueue("q", batch_size=0)


def store_with_run() -> MetadataStore:
    store = MetadataStore()
    store.register_dag(DagDefinition("d", 5.0, 2, (
        TaskSpec("a", 1.0),
        TaskSpec("b", 1.0, deps=("a",)),
    )))
    store.create_dag_run("d", 0.0)
    return store


class TestRoute:
    def test_dag_definition_goes_to_schedule_updater(self):
        store = MetadataStore()
        record = store.register_dag(DagDefinition("d", 5.0, 1, (TaskSpec("a", 1.0),)))
        [(dest, event)] = route(record)
        assert dest == SCHEDULE_UPDATER
        assert event.kind is EventKind.DAG_PARSED
        assert event.payload == {"dag_id": "d"}

    def test_run_insert_goes_to_scheduler(self):
        store = store_with_run()
        run_insert = next(r for r in store.log if r.table == "dag_run")
        [(dest, event)] = route(run_insert)
        assert dest == SCHEDULER
        assert event.kind is EventKind.DAG_RUN_CREATED
        assert event.payload == {"dag_id": "d", "run_id": "d@0"}

    def test_task_insert_routes_nowhere(self):
        store = store_with_run()
        inserts = [r for r in store.log if r.table == "task_instance"]
        assert all(route(r) == [] for r in inserts)

    def test_queued_goes_to_matching_executor(self):
        store = MetadataStore()
        store.register_dag(DagDefinition("d", 5.0, 1, (
            TaskSpec("fn", 1.0),
            TaskSpec("ct", 1.0, executor=ExecutorKind.CONTAINER),
        )))
        store.create_dag_run("d", 0.0)
        for task_id, want in (("fn", EXECUTOR_FUNCTION), ("ct", EXECUTOR_CONTAINER)):
            store.apply_transition("d@0", TaskState.SCHEDULED, task_id)
            record = store.apply_transition("d@0", TaskState.QUEUED, task_id)
            [(dest, event)] = route(record)
            assert dest == want
            assert event.kind is EventKind.TASK_QUEUED
            assert event.payload["task_id"] == task_id

    def test_success_and_failure_go_back_to_scheduler(self):
        store = store_with_run()
        for state in (TaskState.SCHEDULED, TaskState.QUEUED, TaskState.RUNNING):
            store.apply_transition("d@0", state, "a")
        done = store.apply_transition("d@0", TaskState.SUCCESS, "a", now=9.0)
        [(dest, event)] = route(done)
        assert (dest, event.kind) == (SCHEDULER, EventKind.TASK_FINISHED)
        assert event.emit_time == 9.0

        for state in (TaskState.SCHEDULED, TaskState.QUEUED, TaskState.RUNNING):
            store.apply_transition("d@0", state, "b")
        failed = store.apply_transition("d@0", TaskState.FAILED, "b")
        [(dest, event)] = route(failed)
        assert (dest, event.kind) == (SCHEDULER, EventKind.TASK_FAILED)
        assert event.payload["try_number"] == 1

    def test_intermediate_states_route_nowhere(self):
        store = store_with_run()
        scheduled = store.apply_transition("d@0", TaskState.SCHEDULED, "a")
        assert route(scheduled) == []
        queued = store.apply_transition("d@0", TaskState.QUEUED, "a")
        running = store.apply_transition("d@0", TaskState.RUNNING, "a")
        assert route(queued) != [] and route(running) == []

    def test_terminal_run_update_routes_nowhere(self):
        store = MetadataStore()
        store.register_dag(DagDefinition("d", 5.0, 1, (TaskSpec("a", 0.0),)))
        store.create_dag_run("d", 0.0)
        for state in (TaskState.SCHEDULED, TaskState.QUEUED,
                      TaskState.RUNNING, TaskState.SUCCESS):
            store.apply_transition("d@0", state, "a")
        record = store.apply_transition("d@0", RunState.SUCCESS)
        assert route(record) == []

    def test_unknown_table(self):
        record = CdcRecord(1, "audit_log", "insert", ("x",), {}, {}, 0.0)
        with pytest.raises(UnknownTable):
            route(record)


class TestScheduleUpdater:
    def test_triggers_anchored_at_zero(self):
        store = store_with_run()
        updater = ScheduleUpdater()
        event = RoutedEvent(EventKind.DAG_PARSED, {"dag_id": "d"}, 0.0)
        plan = updater.schedule_update(event, store)
        assert plan.times == [0.0, 300.0]

    def test_reregistration_replaces_plan(self):
        store = MetadataStore()
        store.register_dag(DagDefinition("d", 1.0, 3, (TaskSpec("a", 1.0),)))
        updater = ScheduleUpdater()
        event = RoutedEvent(EventKind.DAG_PARSED, {"dag_id": "d"}, 0.0)
        updater.schedule_update(event, store)
        store.register_dag(DagDefinition("d", 2.0, 2, (TaskSpec("a", 1.0),)),
                           replace=True)
        plan = updater.schedule_update(event, store)
        assert updater.plans["d"] is plan
        assert plan.times == [0.0, 120.0]

    def test_unregistered_dag(self):
        updater = ScheduleUpdater()
        event = RoutedEvent(EventKind.DAG_PARSED, {"dag_id": "ghost"}, 0.0)
        with pytest.raises(UnknownDag):
            updater.schedule_update(event, MetadataStore())

    def test_wrong_event_kind(self):
        updater = ScheduleUpdater()
        with pytest.raises(ValueError):
            updater.schedule_update(ping(), MetadataStore())
