"""Shared fixtures and helpers for the test suite.

The property and acceptance suites check invariants over a pool of 1000
randomized simulations.  Building the pool is the expensive part, so it
is session-scoped and shared; individual suites iterate over it.
"""

from __future__ import annotations

import dataclasses
from typing import Any

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from sflow import (
    DagDefinition,
    ExecutorKind,
    PlatformModel,
    SchedulerConfig,
    TaskSpec,
)
from sflow.sim import EventDrivenSim

settings.register_profile(
    "bulk",
    max_examples=1000,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("bulk")

POOL_SIZE = 1000
_DURATIONS = np.array([0.0, 0.0, 0.5, 1.0, 2.0, 5.0, 12.0])


def random_dag(rng: np.random.Generator, dag_id: str, n_max: int = 8,
               executor: ExecutorKind = ExecutorKind.FUNCTION) -> DagDefinition:
    """Random acyclic workflow: edges only point forward in task order."""
    n = int(rng.integers(1, n_max + 1))
    tasks = []
    for i in range(n):
        deps = tuple(f"t{j}" for j in range(i) if rng.random() < 0.35)
        tasks.append(TaskSpec(f"t{i}", float(rng.choice(_DURATIONS)),
                              executor, deps))
    return DagDefinition(
        dag_id=dag_id,
        period_minutes=float(rng.choice([0.1, 0.5])),
        run_count=int(rng.integers(1, 3)),
        tasks=tuple(tasks),
    )


def pool_platform(rng: np.random.Generator, idx: int) -> PlatformModel:
    """Mostly defaults, with faults and tight concurrency sprinkled in."""
    overrides: dict[str, Any] = {}
    if idx % 5 == 0:
        overrides["exec_fault_rate"] = float(rng.choice([0.05, 0.25]))
    if idx % 7 == 0:
        overrides["log_fault_rate"] = 0.05
    if idx % 11 == 0:
        overrides["function_concurrency"] = int(rng.integers(2, 5))
    return dataclasses.replace(PlatformModel(), **overrides)


def build_entry(idx: int) -> dict[str, Any]:
    """One randomized simulation plus everything needed to re-run it."""
    rng = np.random.default_rng(10_000 + idx)
    dag = random_dag(rng, f"pool-{idx}")
    platform = pool_platform(rng, idx)
    sim = EventDrivenSim([dag], platform, SchedulerConfig(), seed=idx,
                         system="faas")
    trace = sim.run()
    return {
        "idx": idx,
        "dag": dag,
        "seed": idx,
        "platform": platform,
        "trace": trace,
        "cdc_log": list(sim.store.log),
        "snapshot": sim.store.snapshot(),
    }


@pytest.fixture(scope="session")
def pool() -> list[dict[str, Any]]:
    return [build_entry(i) for i in range(POOL_SIZE)]


def max_overlap(intervals: list[tuple[float, float]]) -> int:
    """Peak number of concurrently open [start, end) intervals."""
    points = []
    for start, end in intervals:
        if end > start:
            points.append((start, 1))
            points.append((end, -1))
    points.sort(key=lambda p: (p[0], p[1]))  # ends close before starts open
    peak = depth = 0
    for _, delta in points:
        depth += delta
        peak = max(peak, depth)
    return peak


def fold_cdc(log: list) -> dict[str, dict[str, Any]]:
    """Replay a CDC log into table contents, last after-image wins."""
    tables: dict[str, dict[str, Any]] = {"dags": {}, "runs": {}, "tasks": {}}
    names = {"dag_definition": "dags", "dag_run": "runs", "task_instance": "tasks"}
    for record in log:
        key = record.key[0] if len(record.key) == 1 else "/".join(record.key)
        tables[names[record.table]][key] = record.after_image
    return tables
