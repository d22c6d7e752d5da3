"""
Cold-start scaling: functions vs the polling worker pool
========================================================

The scale experiment: one cold fan-out of n ten-second tasks, run on the
event-driven function platform and on the polling baseline.  Functions
provision in seconds; the baseline adds workers in minutes-long waves, so
the makespan gap widens with n.
"""

from sflow import preset_cold_parallel, run_config

SEEDS = list(range(5))  # the calibration suite uses 20; 5 keeps this quick


def median(rows, system, metric):
    return next(r.median for r in rows if r.system == system and r.metric == metric)


print("   n   functions   baseline   speedup")
for n in (16, 32, 64, 125):
    rows = run_config(preset_cold_parallel(n, seeds=SEEDS))["summary"]
    faas = median(rows, "faas", "makespan_s")
    base = median(rows, "baseline", "makespan_s")
    print(f" {n:3d}   {faas:8.1f}s  {base:8.1f}s   {base / faas:6.2f}x")

# The n=125 burst also shows contention: concurrent cold provisioning
# inflates the 10s task body itself.
rows = run_config(preset_cold_parallel(125, seeds=SEEDS))["summary"]
print(f"\nmedian task duration at n=125: "
      f"{median(rows, 'faas', 'task_duration_s'):.1f}s (10s of work)")
print(f"median task duration at n=16:  "
      f"{median(run_config(preset_cold_parallel(16, seeds=SEEDS))['summary'], 'faas', 'task_duration_s'):.1f}s")
