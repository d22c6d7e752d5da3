"""Monetary cost models for both platforms.

Variable cost covers the serverless control plane and workers: function
compute (GB-seconds plus per-request fees), the orchestration service's
state transitions, blob storage calls, bus events, queue polling, and
container vCPU/memory hours.  Fixed cost covers the always-on services
backing the metadata database and its CDC pipeline.  Baseline cost prices
the polling comparator: a flat managed-environment day rate plus
additional worker hours.

The usage model is deliberately coarse: ~15 bus events per task and per
run schedule, four orchestrator transitions per task, one blob GET/PUT
per task, and fixed daily queue polling.  Control-plane functions are
billed per consumed batch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

from .model import ExecutorKind, SflowError
from .sim import TraceLog
from .workloads import gen_layered


class MissingPrice(SflowError):
    pass


# Usage-model constants.
EVENTS_PER_TASK = 15
EVENTS_PER_RUN = 15
TRANSITIONS_PER_TASK = 4
GETS_PER_TASK = 1
PUTS_PER_TASK = 1
FIFO_POLL_PERIOD_S = 20.0
STANDARD_POLL_PERIOD_S = 10.0
SECONDS_PER_DAY = 86400.0

# Control-plane function sizing: (billed seconds per invocation, GB).
EXECUTOR_FWD_S, EXECUTOR_FWD_GB = 1.0, 0.25
SCHEDULER_RUN_S, SCHEDULER_GB = 10.0, 0.5
CDC_FWD_S, CDC_FWD_GB = 1.0, 0.5


def _fixed_daily_defaults() -> dict[str, tuple[float, float]]:
    # component -> (single-AZ daily USD, highly-available daily USD)
    return {
        "database": (0.94, 1.88),
        "cdc_replication": (0.90, 1.80),
        "event_stream": (0.72, 0.72),
        "nat_gateway": (0.28, 0.55),
        "container_registry": (0.02, 0.02),
        "database_proxy": (0.72, 0.72),
        "web_ui": (0.34, 0.34),
    }


@dataclass(frozen=True)
class PricingTable:
    """Unit prices in USD, matching the public on-demand rates of a large
    cloud provider's us-east region."""

    function_gb_second: float = 0.0000166667
    function_request: float = 0.0000002
    orchestration_transition: float = 0.000025
    storage_get_per_1k: float = 0.0004
    storage_put_per_1k: float = 0.005
    bus_per_million: float = 1.00
    queue_fifo_per_million: float = 0.50
    queue_standard_per_million: float = 0.40
    container_vcpu_hour: float = 0.04048
    container_gb_hour: float = 0.004445
    baseline_env_day: float = 11.76
    baseline_worker_hour: float = 0.055
    fixed_daily: dict[str, tuple[float, float]] = field(default_factory=_fixed_daily_defaults)

    def require(self, name: str) -> float:
        value = getattr(self, name, None)
        if value is None:
            raise MissingPrice(f"pricing table has no rate for {name!r}")
        return value


@dataclass(frozen=True)
class LineItem:
    component: str
    notes: str
    usd: float


@dataclass(frozen=True)
class CostLedger:
    title: str
    lines: tuple[LineItem, ...]

    @property
    def total(self) -> float:
        return sum(line.usd for line in self.lines)

    def line(self, component: str) -> LineItem:
        for item in self.lines:
            if item.component == component:
                return item
        raise KeyError(component)

    def as_rows(self) -> list[dict[str, Any]]:
        rows = [{"component": l.component, "notes": l.notes, "usd": l.usd}
                for l in self.lines]
        rows.append({"component": "total", "notes": "", "usd": self.total})
        return rows


@dataclass(frozen=True)
class CostInputs:
    """Aggregate usage of one workload window."""

    n_runs: int
    fn_attempts: int = 0
    fn_exec_seconds: float = 0.0
    fn_memory_gb: float = 340.0 / 1024.0
    ct_attempts: int = 0
    ct_exec_seconds: float = 0.0
    ct_vcpu: float = 0.25
    ct_memory_gb: float = 0.5
    scheduler_batch: int = 10

    @property
    def attempts(self) -> int:
        return self.fn_attempts + self.ct_attempts


def control_plane_invocations(attempts: int, runs: int, batch: int) -> int:
    """Scheduler/CDC-forwarder invocations for a window's event volume."""
    events = EVENTS_PER_TASK * attempts + EVENTS_PER_RUN * runs
    return math.ceil(events / batch)


def estimate_variable_cost(inputs: CostInputs,
                           pricing: PricingTable = PricingTable()) -> CostLedger:
    gb_second = pricing.require("function_gb_second")
    request = pricing.require("function_request")
    lines: list[LineItem] = []

    if inputs.fn_attempts:
        gbs = inputs.fn_exec_seconds * inputs.fn_memory_gb
        usd = gbs * gb_second + inputs.fn_attempts * request
        lines.append(LineItem(
            "function_worker",
            f"{inputs.fn_attempts} invocations, {gbs:.1f} GB-s", usd))
    if inputs.ct_attempts:
        vcpu_hours = inputs.ct_exec_seconds * inputs.ct_vcpu / 3600.0
        gb_hours = inputs.ct_exec_seconds * inputs.ct_memory_gb / 3600.0
        usd = (vcpu_hours * pricing.require("container_vcpu_hour")
               + gb_hours * pricing.require("container_gb_hour"))
        lines.append(LineItem(
            "container_worker",
            f"{inputs.ct_attempts} containers, {vcpu_hours:.1f} vCPU-h", usd))

    attempts = inputs.attempts
    lines.append(LineItem(
        "executor_forwarder", f"{attempts} invocations at {EXECUTOR_FWD_S:g}s",
        attempts * (EXECUTOR_FWD_S * EXECUTOR_FWD_GB * gb_second + request)))

    invocations = control_plane_invocations(attempts, inputs.n_runs, inputs.scheduler_batch)
    lines.append(LineItem(
        "scheduler", f"{invocations} invocations at {SCHEDULER_RUN_S:g}s",
        invocations * (SCHEDULER_RUN_S * SCHEDULER_GB * gb_second + request)))
    lines.append(LineItem(
        "cdc_forwarder", f"{invocations} invocations at {CDC_FWD_S:g}s",
        invocations * (CDC_FWD_S * CDC_FWD_GB * gb_second + request)))

    transitions = TRANSITIONS_PER_TASK * attempts
    lines.append(LineItem(
        "orchestration_transitions", f"{transitions} state transitions",
        transitions * pricing.require("orchestration_transition")))
    lines.append(LineItem(
        "storage_get", f"{GETS_PER_TASK * attempts} GET requests",
        GETS_PER_TASK * attempts / 1000.0 * pricing.require("storage_get_per_1k")))
    lines.append(LineItem(
        "storage_put", f"{PUTS_PER_TASK * attempts} PUT requests",
        PUTS_PER_TASK * attempts / 1000.0 * pricing.require("storage_put_per_1k")))

    bus_events = EVENTS_PER_TASK * attempts
    lines.append(LineItem(
        "bus_events", f"{bus_events} events",
        bus_events / 1e6 * pricing.require("bus_per_million")))

    fifo_polls = SECONDS_PER_DAY / FIFO_POLL_PERIOD_S
    std_polls = SECONDS_PER_DAY / STANDARD_POLL_PERIOD_S
    lines.append(LineItem(
        "queue_fifo", f"{fifo_polls:.0f} daily polls",
        fifo_polls / 1e6 * pricing.require("queue_fifo_per_million")))
    lines.append(LineItem(
        "queue_standard", f"{std_polls:.0f} daily polls",
        std_polls / 1e6 * pricing.require("queue_standard_per_million")))

    return CostLedger("variable", tuple(lines))


def inputs_from_trace(trace: TraceLog, scheduler_batch: int = 10) -> CostInputs:
    """Aggregate a simulated trace into cost-model inputs."""
    fn_attempts = ct_attempts = 0
    fn_seconds = ct_seconds = 0.0
    for attempt in trace.attempts:
        busy = attempt.exec_end_time - attempt.exec_start_time
        if attempt.executor is ExecutorKind.FUNCTION:
            fn_attempts += 1
            fn_seconds += busy
        else:
            ct_attempts += 1
            ct_seconds += busy
    return CostInputs(
        n_runs=len(trace.snapshot.get("runs", {})),
        fn_attempts=fn_attempts, fn_exec_seconds=fn_seconds,
        ct_attempts=ct_attempts, ct_exec_seconds=ct_seconds,
        scheduler_batch=scheduler_batch)


def estimate_fixed_cost(pricing: PricingTable = PricingTable(),
                        ha: bool = False) -> CostLedger:
    """Daily cost of the always-on services; ha selects the replicated tier."""
    if pricing.fixed_daily is None:
        raise MissingPrice("pricing table has no fixed_daily rates")
    lines = []
    for component in sorted(pricing.fixed_daily):
        single, replicated = pricing.fixed_daily[component]
        usd = replicated if ha else single
        lines.append(LineItem(component, "highly available" if ha else "single instance", usd))
    return CostLedger("fixed_ha" if ha else "fixed", tuple(lines))


def estimate_baseline_cost(worker_hours: float,
                           pricing: PricingTable = PricingTable()) -> CostLedger:
    """Managed polling service: flat day rate plus additional worker hours."""
    lines = (
        LineItem("environment", "managed environment, one day",
                 pricing.require("baseline_env_day")),
        LineItem("additional_workers", f"{worker_hours:g} worker-hours",
                 worker_hours * pricing.require("baseline_worker_hour")),
    )
    return CostLedger("baseline", lines)


# -- scenarios ----------------------------------------------------------------

@dataclass(frozen=True)
class ScenarioSpec:
    """A one-day usage pattern with a closed-form cost ledger.

    episode_hours lists the scale-out episodes the polling baseline sees;
    each is billed at its peak additional-worker count for the whole
    (ceiling-rounded) episode.
    """

    name: str
    title: str
    runs: int
    tasks_per_run: int
    task_duration_s: float
    width: int
    executor: ExecutorKind
    period_minutes: float
    episode_hours: tuple[float, ...]
    description: str

    def inputs(self, scheduler_batch: int = 10) -> CostInputs:
        total = self.runs * self.tasks_per_run
        seconds = total * self.task_duration_s
        if self.executor is ExecutorKind.FUNCTION:
            return CostInputs(n_runs=self.runs, fn_attempts=total,
                              fn_exec_seconds=seconds, scheduler_batch=scheduler_batch)
        return CostInputs(n_runs=self.runs, ct_attempts=total,
                          ct_exec_seconds=seconds, scheduler_batch=scheduler_batch)

    def workload(self):
        return gen_layered(self.tasks_per_run, self.width, self.task_duration_s,
                           period_minutes=self.period_minutes, run_count=self.runs,
                           executor=self.executor, dag_id=self.name)

    def baseline_worker_hours(self, slots_per_worker: int = 5,
                              min_workers: int = 1) -> float:
        additional = max(0, math.ceil(self.width / slots_per_worker) - min_workers)
        return additional * sum(math.ceil(h) for h in self.episode_hours)


SCENARIOS: dict[str, ScenarioSpec] = {
    s.name: s for s in [
        ScenarioSpec(
            name="scenario1", title="heavy load",
            runs=20, tasks_per_run=50, task_duration_s=180.0, width=50,
            executor=ExecutorKind.FUNCTION, period_minutes=3.0,
            episode_hours=(1.0,),
            description="50 three-minute tasks in parallel, 20 back-to-back runs"),
        ScenarioSpec(
            name="scenario2", title="distributed load",
            runs=6, tasks_per_run=400, task_duration_s=60.0, width=35,
            executor=ExecutorKind.FUNCTION, period_minutes=240.0,
            episode_hours=(1.0,) * 6,
            description="400 one-minute tasks per run, six runs spread over a day"),
        ScenarioSpec(
            name="scenario3", title="sporadic load",
            runs=1, tasks_per_run=20, task_duration_s=30.0, width=1,
            executor=ExecutorKind.FUNCTION, period_minutes=1440.0,
            episode_hours=(1.0,),
            description="one chain of twenty 30-second tasks"),
        ScenarioSpec(
            name="scenario4", title="constant load",
            runs=1, tasks_per_run=100, task_duration_s=SECONDS_PER_DAY, width=100,
            executor=ExecutorKind.CONTAINER, period_minutes=1440.0,
            episode_hours=(24.0,),
            description="100 day-long container tasks"),
    ]
}


def scenario_cost(name: str, pricing: PricingTable = PricingTable(),
                  scheduler_batch: int = 10) -> CostLedger:
    if name not in SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}; have {sorted(SCENARIOS)}")
    return estimate_variable_cost(SCENARIOS[name].inputs(scheduler_batch), pricing)
