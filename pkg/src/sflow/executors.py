"""Task execution frontends for the function and container platforms.

An executor receives task_queued events, pulls the task row and DAG
definition from the metadata store (bounded at four reads per attempt),
acquires an environment, and walks the attempt through invoke, config
pull, DAG pull, execution, and log push.  State transitions are committed
back to the store so the CDC pipeline can fan them out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Optional

from .model import ExecutorKind, SflowError


class DurationExceedsLimit(SflowError):
    pass


@dataclass(frozen=True)
class ExecutorConfig:
    """Static sizing of one executor platform."""

    kind: ExecutorKind
    max_duration_s: float
    memory_mb: float
    vcpu: Optional[float] = None

    def memory_gb(self) -> float:
        return self.memory_mb / 1024.0


# Function workers are capped at 15 minutes; containers run unbounded.
DEFAULT_FUNCTION_CONFIG = ExecutorConfig(ExecutorKind.FUNCTION, 900.0, 340.0)
DEFAULT_CONTAINER_CONFIG = ExecutorConfig(ExecutorKind.CONTAINER, math.inf, 512.0, vcpu=0.25)


def default_config(kind: ExecutorKind) -> ExecutorConfig:
    if kind is ExecutorKind.FUNCTION:
        return DEFAULT_FUNCTION_CONFIG
    return DEFAULT_CONTAINER_CONFIG


@dataclass
class TaskAttempt:
    """One execution attempt with its milestone timestamps.

    The six timestamps are non-decreasing in order: invoke, config_pulled,
    dag_pulled, exec_start, exec_end, logs_pushed.  exec_end - exec_start
    equals the task duration plus any contention inflation.
    """

    run_id: str
    task_id: str
    try_number: int
    executor: ExecutorKind
    warm: bool
    env_id: int
    duration_s: float
    invoke_time: float
    config_pulled_time: float = 0.0
    dag_pulled_time: float = 0.0
    exec_start_time: float = 0.0
    exec_end_time: float = 0.0
    logs_pushed_time: float = 0.0
    inflation_s: float = 0.0
    store_reads: int = 0
    status: str = "pending"  # pending | success | failed
    log_lost: bool = False

    def timestamps(self) -> tuple[float, float, float, float, float, float]:
        return (self.invoke_time, self.config_pulled_time, self.dag_pulled_time,
                self.exec_start_time, self.exec_end_time, self.logs_pushed_time)

    def check_limit(self, config: ExecutorConfig) -> None:
        # The cap bounds billed execution time; environment init is excluded.
        if self.exec_end_time - self.exec_start_time > config.max_duration_s:
            raise DurationExceedsLimit(
                f"{self.task_id} try {self.try_number}: attempt exceeds "
                f"{config.max_duration_s}s platform cap")

    def log_line(self) -> str:
        return (f"run={self.run_id} task={self.task_id} try={self.try_number} "
                f"executor={self.executor.value} warm={str(self.warm).lower()} "
                f"start={self.exec_start_time:.3f} end={self.exec_end_time:.3f} "
                f"status={self.status}")

    def as_dict(self) -> dict[str, Any]:
        return {
            "run_id": self.run_id,
            "task_id": self.task_id,
            "try_number": self.try_number,
            "executor": self.executor.value,
            "warm": self.warm,
            "env_id": self.env_id,
            "duration_s": self.duration_s,
            "invoke_time": self.invoke_time,
            "config_pulled_time": self.config_pulled_time,
            "dag_pulled_time": self.dag_pulled_time,
            "exec_start_time": self.exec_start_time,
            "exec_end_time": self.exec_end_time,
            "logs_pushed_time": self.logs_pushed_time,
            "inflation_s": self.inflation_s,
            "store_reads": self.store_reads,
            "status": self.status,
            "log_lost": self.log_lost,
        }


def plan_attempt(run_id: str, task_id: str, try_number: int, kind: ExecutorKind,
                 duration_s: float, dispatch_time: float, warm: bool, env_id: int,
                 ready_delay_s: float, setup_s: float, orchestrator_hop_s: float,
                 config: ExecutorConfig) -> TaskAttempt:
    """Lay out an attempt's milestones up to exec_start.

    ready_delay_s is the platform time between invoke and having a live
    environment: the warm invoke latency, a cold-start penalty, or
    container provisioning plus boot.  The config and DAG pulls (setup_s,
    split evenly) happen on the live environment just before exec_start.
    """
    if duration_s > config.max_duration_s:
        raise DurationExceedsLimit(
            f"{task_id}: duration {duration_s}s exceeds {config.max_duration_s}s "
            f"cap of the {kind.value} platform")
    invoke = dispatch_time + orchestrator_hop_s
    env_live = invoke + ready_delay_s
    attempt = TaskAttempt(
        run_id=run_id,
        task_id=task_id,
        try_number=try_number,
        executor=kind,
        warm=warm,
        env_id=env_id,
        duration_s=duration_s,
        invoke_time=invoke,
        config_pulled_time=env_live + setup_s / 2,
        dag_pulled_time=env_live + setup_s,
        exec_start_time=env_live + setup_s,
    )
    return attempt
