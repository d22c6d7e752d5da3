"""Latency and capacity models for the two execution platforms.

PlatformModel captures the serverless side: function cold/warm starts with
a keepalive pool, container provisioning, CDC propagation jitter, and a
contention penalty that kicks in when many cold starts land on the fleet
at once.  BaselineModel captures the polling comparator: a fixed worker
pool with slot-based parallelism and slow scale-out.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np


@dataclass
class PlatformModel:
    """Tunable constants of the event-driven platform.

    The defaults reproduce measured behaviour of a commodity cloud stack:
    8-11 s function cold starts, ~0.1 s warm invokes, 60-90 s container
    provisioning plus a 30 s image boot, and 1-1.5 s of CDC propagation.
    """

    cold_start_lo_s: float = 8.0
    cold_start_hi_s: float = 11.0
    warm_invoke_s: float = 0.1
    setup_s: float = 0.3  # config pull + dag pull on a ready environment
    keepalive_s: float = 900.0
    function_concurrency: int = 125
    function_max_duration_s: float = 900.0
    container_provision_lo_s: float = 60.0
    container_provision_hi_s: float = 90.0
    container_startup_s: float = 30.0
    cdc_lo_s: float = 1.0
    cdc_hi_s: float = 1.5
    queue_hop_s: float = 0.1
    orchestrator_hop_s: float = 0.75
    log_push_s: float = 0.2
    scheduler_batch: int = 10
    # Cold-start contention: every concurrent cold start beyond the floor
    # adds alpha seconds to execution time.
    contention_alpha: float = 0.082
    contention_floor: int = 40
    contention_window_s: float = 5.0
    exec_fault_rate: float = 0.0
    log_fault_rate: float = 0.0

    def __post_init__(self) -> None:
        pairs = [
            (self.cold_start_lo_s, self.cold_start_hi_s),
            (self.container_provision_lo_s, self.container_provision_hi_s),
            (self.cdc_lo_s, self.cdc_hi_s),
        ]
        for lo, hi in pairs:
            if lo < 0 or hi < lo:
                raise ValueError(f"invalid latency range [{lo}, {hi}]")
        scalars = [
            self.warm_invoke_s, self.setup_s, self.keepalive_s,
            self.container_startup_s, self.queue_hop_s, self.orchestrator_hop_s,
            self.log_push_s, self.contention_alpha, self.contention_window_s,
            self.function_max_duration_s,
        ]
        if any(v < 0 for v in scalars):
            raise ValueError("latency constants must be >= 0")
        if self.function_concurrency < 1 or self.scheduler_batch < 1:
            raise ValueError("concurrency and batch size must be >= 1")
        if not 0 <= self.exec_fault_rate <= 1 or not 0 <= self.log_fault_rate <= 1:
            raise ValueError("fault rates must be probabilities")
        if self.contention_floor < 0:
            raise ValueError("contention_floor must be >= 0")

    def sample_cdc_latency(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(self.cdc_lo_s, self.cdc_hi_s))

    def sample_cold_start(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(self.cold_start_lo_s, self.cold_start_hi_s))

    def sample_container_provision(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(self.container_provision_lo_s,
                                 self.container_provision_hi_s))


@dataclass
class BaselineModel:
    """Polling orchestrator: workers poll a database on a fixed interval."""

    min_workers: int = 1
    max_workers: int = 25
    slots_per_worker: int = 5
    provision_lo_s: float = 240.0
    provision_hi_s: float = 300.0
    poll_interval_s: float = 5.0
    task_launch_s: float = 1.7

    def __post_init__(self) -> None:
        if not 1 <= self.min_workers <= self.max_workers:
            raise ValueError("need 1 <= min_workers <= max_workers")
        if self.slots_per_worker < 1:
            raise ValueError("slots_per_worker must be >= 1")
        if self.provision_lo_s < 0 or self.provision_hi_s < self.provision_lo_s:
            raise ValueError("invalid provisioning range")
        if self.poll_interval_s <= 0 or self.task_launch_s < 0:
            raise ValueError("poll interval must be > 0 and launch time >= 0")

    def workers_needed(self, pending_tasks: int) -> int:
        want = math.ceil(pending_tasks / self.slots_per_worker) if pending_tasks else 0
        return max(self.min_workers, min(self.max_workers, want))

    def sample_provision(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(self.provision_lo_s, self.provision_hi_s))


@dataclass
class _Environment:
    env_id: int
    busy: bool
    last_release: float


class WarmPool:
    """Keepalive pool of function environments.

    acquire() prefers the most recently released environment (it is the
    least likely to have been reclaimed); environments idle longer than
    the keepalive window are evicted lazily.
    """

    def __init__(self, keepalive_s: float) -> None:
        self.keepalive_s = keepalive_s
        self._envs: list[_Environment] = []
        self._next_id = 0
        self.cold_acquires = 0
        self.warm_acquires = 0

    def acquire(self, now: float) -> tuple[int, bool]:
        """Returns (env_id, warm)."""
        self._envs = [e for e in self._envs
                      if e.busy or now - e.last_release <= self.keepalive_s]
        idle = [e for e in self._envs if not e.busy]
        if idle:
            env = max(idle, key=lambda e: (e.last_release, e.env_id))
            env.busy = True
            self.warm_acquires += 1
            return env.env_id, True
        env = _Environment(self._next_id, True, now)
        self._next_id += 1
        self._envs.append(env)
        self.cold_acquires += 1
        return env.env_id, False

    def release(self, env_id: int, now: float) -> None:
        for env in self._envs:
            if env.env_id == env_id:
                if not env.busy:
                    raise ValueError(f"environment {env_id} released twice")
                env.busy = False
                env.last_release = now
                return
        raise ValueError(f"unknown environment {env_id}")

    def busy_count(self) -> int:
        return sum(1 for e in self._envs if e.busy)


class ContentionTracker:
    """Counts cold starts that land close together on the function fleet."""

    def __init__(self, alpha: float, floor: int, window_s: float) -> None:
        self.alpha = alpha
        self.floor = floor
        self.window_s = window_s
        self._starts: list[float] = []  # kept sorted

    def register(self, start_time: float) -> None:
        bisect.insort(self._starts, start_time)

    def extra_seconds(self, start_time: float) -> float:
        lo = bisect.bisect_left(self._starts, start_time - self.window_s)
        hi = bisect.bisect_right(self._starts, start_time + self.window_s)
        concurrent = hi - lo
        return self.alpha * max(0, concurrent - self.floor)
