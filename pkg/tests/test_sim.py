"""End-to-end simulator behaviour for both systems, plus trace I/O."""

import dataclasses
import json

import pytest

from sflow import (
    BaselineModel,
    DagDefinition,
    ExecutorKind,
    NonTermination,
    PlatformModel,
    TaskSpec,
    gen_chain,
    gen_parallel,
    run_baseline,
    run_event_driven,
)
from sflow.executors import DurationExceedsLimit
from sflow.sim import TraceLog, load_trace, rows_to_csv

from conftest import max_overlap


def rows_by_task(trace) -> dict[tuple[str, str], dict]:
    return {(r["run_id"], r["task_id"]): r for r in trace.task_rows()}


def chain(n=3, duration=5.0, runs=1, period=1.0) -> DagDefinition:
    return gen_chain(n, duration, period_minutes=period, run_count=runs)


class TestDeterminism:
    def test_same_seed_bit_identical(self):
        dag = chain(runs=2)
        a = run_event_driven(dag, seed=7)
        b = run_event_driven(dag, seed=7)
        assert a.to_json() == b.to_json()

    def test_different_seeds_differ(self):
        dag = chain()
        a = run_event_driven(dag, seed=1)
        b = run_event_driven(dag, seed=2)
        assert a.to_json() != b.to_json()

    def test_baseline_same_seed_bit_identical(self):
        dag = gen_parallel(32, 10.0, run_count=1)
        a = run_baseline(dag, seed=3)
        b = run_baseline(dag, seed=3)
        assert a.to_json() == b.to_json()


class TestEventDrivenPipeline:
    def test_timestamps_ordered_and_deps_respected(self):
        trace = run_event_driven(chain(n=4), seed=0)
        rows = trace.task_rows()
        assert len(rows) == 4
        for row in rows:
            assert row["v_i"] <= row["s_i"] <= row["c_i"]
        by_task = rows_by_task(trace)
        run_id = rows[0]["run_id"]
        for i in range(2, 5):
            parent = by_task[(run_id, f"t{i - 1:03d}")]
            child = by_task[(run_id, f"t{i:03d}")]
            assert child["v_i"] >= parent["c_i"]

    def test_first_run_cold_then_warm(self):
        trace = run_event_driven(chain(n=1, runs=3, period=1.0), seed=0)
        rows = sorted(trace.task_rows(), key=lambda r: r["v_i"])
        assert [r["warm"] for r in rows] == [False, True, True]
        cold_wait = rows[0]["s_i"] - rows[0]["v_i"]
        warm_wait = rows[1]["s_i"] - rows[1]["v_i"]
        assert cold_wait > 8.0
        assert warm_wait < 3.0

    def test_keepalive_expiry_makes_next_run_cold(self):
        # 20 min between runs exceeds the 15 min keepalive.
        trace = run_event_driven(chain(n=1, runs=2, period=20.0), seed=0)
        rows = sorted(trace.task_rows(), key=lambda r: r["v_i"])
        assert [r["warm"] for r in rows] == [False, False]

    def test_all_runs_settle_success(self):
        trace = run_event_driven(chain(n=2, runs=3), seed=0)
        states = [r["state"] for r in trace.snapshot["runs"].values()]
        assert states == ["success"] * 3

    def test_cdc_lag_floor_on_every_delivery(self):
        trace = run_event_driven(chain(n=3), seed=0)
        enqueues = [e for e in trace.events if e["kind"] == "enqueue"]
        assert enqueues
        for e in enqueues:
            assert e["data"]["deliver_time"] >= e["time"] + 1.0

    def test_container_tasks_never_reuse_environments(self):
        dag = DagDefinition("c", 5.0, 2, (
            TaskSpec("t", 30.0, ExecutorKind.CONTAINER),))
        trace = run_event_driven(dag, seed=0, system="caas")
        assert [r["warm"] for r in trace.task_rows()] == [False, False]
        env_ids = [a.env_id for a in trace.attempts]
        assert len(set(env_ids)) == len(env_ids)

    def test_container_duration_unbounded(self):
        dag = DagDefinition("c", 5.0, 1, (
            TaskSpec("t", 86400.0, ExecutorKind.CONTAINER),))
        trace = run_event_driven(dag, seed=0)
        row = trace.task_rows()[0]
        assert row["c_i"] - row["s_i"] == pytest.approx(86400.0)

    def test_function_duration_cap_enforced(self):
        dag = DagDefinition("d", 5.0, 1, (TaskSpec("t", 901.0),))
        with pytest.raises(DurationExceedsLimit):
            run_event_driven(dag, seed=0)


class TestFaultsAndRetries:
    def test_certain_failure_exhausts_retries_and_fails_run(self):
        platform = PlatformModel(exec_fault_rate=1.0)
        trace = run_event_driven(chain(n=2), platform=platform, seed=0)
        run_row = next(iter(trace.snapshot["runs"].values()))
        assert run_row["state"] == "failed"
        first = trace.snapshot["tasks"][f"{run_row['run_id']}/t001"]
        assert first["state"] == "failed"
        assert first["try_number"] == 2
        assert len([a for a in trace.attempts if a.task_id == "t001"]) == 2

    def test_downstream_tasks_never_start_after_run_fails(self):
        platform = PlatformModel(exec_fault_rate=1.0)
        trace = run_event_driven(chain(n=3), platform=platform, seed=0)
        run_id = next(iter(trace.snapshot["runs"]))
        assert trace.snapshot["tasks"][f"{run_id}/t003"]["state"] == "none"

    def test_retry_keeps_other_runs_unaffected(self):
        platform = PlatformModel(exec_fault_rate=0.3)
        trace = run_event_driven(chain(n=3, runs=3), platform=platform, seed=5)
        states = {r["state"] for r in trace.snapshot["runs"].values()}
        assert states <= {"success", "failed"}

    def test_lost_logs_do_not_stall_the_run(self):
        platform = PlatformModel(log_fault_rate=1.0)
        trace = run_event_driven(chain(n=2), platform=platform, seed=0)
        assert trace.logs == []
        assert all(a.log_lost for a in trace.attempts)
        run_row = next(iter(trace.snapshot["runs"].values()))
        assert run_row["state"] == "success"

    def test_retried_attempt_gets_fresh_stamps(self):
        platform = PlatformModel(exec_fault_rate=1.0)
        trace = run_event_driven(chain(n=1), platform=platform, seed=0)
        tries = sorted((a for a in trace.attempts), key=lambda a: a.try_number)
        assert tries[1].invoke_time > tries[0].exec_end_time


class TestConcurrencyThrottle:
    def test_inflight_functions_never_exceed_limit(self):
        platform = PlatformModel(function_concurrency=4)
        trace = run_event_driven(gen_parallel(12, 10.0, run_count=1),
                                 platform=platform, seed=0)
        spans = [(a.exec_start_time, a.exec_end_time) for a in trace.attempts]
        assert max_overlap(spans) <= 4
        assert any(e["kind"] == "throttled" for e in trace.events)

    def test_throttled_tasks_eventually_run(self):
        platform = PlatformModel(function_concurrency=2)
        trace = run_event_driven(gen_parallel(8, 5.0, run_count=1),
                                 platform=platform, seed=0)
        assert all(r["state"] == "success"
                   for r in trace.snapshot["runs"].values())
        assert len(trace.attempts) == 9  # root plus eight branches


class TestGuards:
    def test_max_events_triggers_nontermination(self):
        with pytest.raises(NonTermination):
            run_event_driven(chain(n=5), seed=0, max_events=10)

    def test_max_time_triggers_nontermination(self):
        with pytest.raises(NonTermination):
            run_event_driven(chain(n=5, duration=100.0), seed=0, max_time=50.0)


class TestBaselineSim:
    def test_ready_times_land_on_poll_ticks(self):
        trace = run_baseline(chain(n=4, duration=7.0), seed=0)
        for row in trace.task_rows():
            assert row["v_i"] % 5.0 == pytest.approx(0.0)

    def test_launch_delay_is_constant(self):
        trace = run_baseline(chain(n=4, duration=7.0), seed=0)
        for row in trace.task_rows():
            assert row["s_i"] - row["v_i"] == pytest.approx(1.7)

    def test_completions_between_ticks_are_exact(self):
        trace = run_baseline(chain(n=2, duration=7.3), seed=0)
        rows = sorted(trace.task_rows(), key=lambda r: r["s_i"])
        assert rows[0]["c_i"] == pytest.approx(rows[0]["s_i"] + 7.3)

    def test_single_worker_limits_parallelism(self):
        trace = run_baseline(gen_parallel(32, 60.0, run_count=1), seed=0)
        spans = [(r["s_i"], r["c_i"]) for r in trace.task_rows()
                 if r["s_i"] is not None]
        # One worker, five slots, until provisioned workers arrive minutes in.
        early = [s for s in spans if s[0] < 200.0]
        assert max_overlap(early) <= 5

    def test_fleet_scales_out_after_provisioning(self):
        trace = run_baseline(gen_parallel(64, 120.0, run_count=1), seed=0)
        spans = [(r["s_i"], r["c_i"]) for r in trace.task_rows()]
        assert max_overlap(spans) > 5
        requested = [e for e in trace.events if e["kind"] == "worker_requested"]
        assert requested
        for e in requested:
            assert 240.0 <= e["data"]["ready_at"] - e["time"] <= 300.0

    def test_baseline_tasks_always_cold_field_empty(self):
        trace = run_baseline(chain(n=2), seed=0)
        assert all(r["warm"] is None for r in trace.task_rows())


class TestTraceIO:
    def test_json_round_trip(self):
        trace = run_event_driven(chain(n=3, runs=2), seed=4)
        clone = TraceLog.from_dict(json.loads(trace.to_json()))
        assert clone.to_json() == trace.to_json()

    def test_write_and_load(self, tmp_path):
        trace = run_event_driven(chain(n=2), seed=1)
        trace.write(tmp_path)
        assert (tmp_path / "trace.json").exists()
        assert (tmp_path / "tasks.csv").exists()
        assert (tmp_path / "events.csv").exists()
        clone = load_trace(tmp_path / "trace.json")
        assert clone.to_json() == trace.to_json()

    def test_tasks_csv_layout(self):
        trace = run_event_driven(chain(n=2), seed=1)
        lines = trace.tasks_csv().splitlines()
        assert lines[0] == "run_id,task_id,v_i,s_i,c_i,warm,executor"
        assert len(lines) == 3
        assert lines[1].endswith(",function")

    def test_events_csv_payloads_parse_as_json(self):
        import csv
        import io

        trace = run_event_driven(chain(n=2), seed=1)
        reader = csv.DictReader(io.StringIO(trace.events_csv()))
        rows = list(reader)
        assert len(rows) == len(trace.events)
        for row in rows:
            json.loads(row["payload"])

    def test_rows_to_csv_cell_encoding(self):
        csv_text = rows_to_csv(
            [{"a": None, "b": True, "c": 1.5, "d": "x"}],
            ["a", "b", "c", "d"])
        assert csv_text == "a,b,c,d\r\n,true,1.5,x\r\n" \
            or csv_text == "a,b,c,d\n,true,1.5,x\n"

    def test_csv_bytes_reproducible(self):
        dag = chain(n=3, runs=2)
        a = run_event_driven(dag, seed=9)
        b = run_event_driven(dag, seed=9)
        assert a.tasks_csv() == b.tasks_csv()
        assert a.events_csv() == b.events_csv()


class TestQueueStats:
    def test_scheduler_queue_counts_balance(self):
        trace = run_event_driven(chain(n=3, runs=2), seed=0)
        stats = trace.queue_stats["scheduler"]
        assert stats["enqueued"] == stats["delivered"] > 0

    def test_executor_split_matches_task_kinds(self):
        dag = DagDefinition("m", 5.0, 1, (
            TaskSpec("f", 1.0),
            TaskSpec("c", 1.0, ExecutorKind.CONTAINER, deps=("f",)),
        ))
        trace = run_event_driven(dag, seed=0, system="mixed")
        assert trace.queue_stats["executor_function"]["delivered"] == 1
        assert trace.queue_stats["executor_container"]["delivered"] == 1
