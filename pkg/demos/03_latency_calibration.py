"""
Where the seconds go: wait-time calibration
===========================================

Each canned preset isolates one latency path.  Task wait (s_i - v_i) is
the time between a task becoming ready and its body starting: event hops,
scheduler passes, queueing, and environment provisioning.
"""

from sflow import (
    preset_cold_single,
    preset_container_single,
    preset_warm_chain,
    run_config,
)

SEEDS = list(range(10))


def wait_median(config, system):
    rows = run_config(config)["summary"]
    return next(r.median for r in rows
                if r.system == system and r.metric == "task_wait_s")


# Warm function: the environment is kept alive between 5-minute runs, so
# the wait is pure event-plane overhead (CDC, queue hops, passes).
warm = wait_median(preset_warm_chain(1, seeds=SEEDS, systems=["faas"]), "faas")
print(f"warm function wait:      {warm:6.2f}s")

# Cold function: add environment provisioning (one-off fan-outs, long gaps).
cold = wait_median(preset_cold_single(seeds=SEEDS), "faas")
print(f"cold function wait:      {cold:6.2f}s")

# Container: provisioning a container environment takes minutes, the price
# of unbounded runtimes.
container = wait_median(preset_container_single(seeds=SEEDS), "caas")
print(f"cold container wait:     {container:6.2f}s")

# Chained tasks: every hop in the chain pays the event plane again, a small
# per-task premium over the baseline's 5-second poll alignment.
chain = preset_warm_chain(5, seeds=SEEDS)
faas = wait_median(chain, "faas")
base = wait_median(chain, "baseline")
print(f"\nchain n=5 per-task wait: {faas:6.2f}s event-driven "
      f"vs {base:5.2f}s polling (delta {faas - base:+.2f}s)")
