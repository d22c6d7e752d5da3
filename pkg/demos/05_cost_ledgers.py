"""
What a day of orchestration costs
=================================

Three ways to price the platform: closed-form usage scenarios, the
always-on fixed tier, and metering an actual simulated trace.  Every
ledger is per-day USD.
"""

from sflow import (
    SCENARIOS,
    PlatformModel,
    estimate_baseline_cost,
    estimate_fixed_cost,
    estimate_variable_cost,
    gen_chain,
    inputs_from_trace,
    run_event_driven,
    scenario_cost,
)

# Closed-form scenarios: (runs/day, tasks/run, seconds/task) profiles from
# heavy ETL down to a sporadic cron job and a constant container fleet.
print("scenario             variable/day    managed baseline/day")
for name, spec in sorted(SCENARIOS.items()):
    variable = scenario_cost(name)
    baseline = estimate_baseline_cost(spec.baseline_worker_hours())
    print(f"{name:<10} {spec.title:<14} {variable.total:9.4f}      {baseline.total:9.4f}")

# The fixed tier is what idling costs before the first run fires.
single = estimate_fixed_cost()
ha = estimate_fixed_cost(ha=True)
print(f"\nfixed daily: {single.total:.2f} single-instance, {ha.total:.2f} highly available")
print(f"fixed monthly: {single.total * 30.5:.2f} / {ha.total * 30.5:.2f}")

# Line items of the heavy-load scenario.
print("\nscenario1 breakdown:")
for line in scenario_cost("scenario1").lines:
    print(f"  {line.component:<26} {line.usd:8.4f}  {line.notes}")

# Metering a simulation: inputs_from_trace counts attempts (retries bill
# too) and billed execution seconds straight off the trace.
trace = run_event_driven([gen_chain(5, 10.0, run_count=12)], PlatformModel(), seed=0)
inputs = inputs_from_trace(trace)
ledger = estimate_variable_cost(inputs)
print(f"\nsimulated chain day: {inputs.fn_attempts} function attempts, "
      f"{inputs.fn_exec_seconds:.0f}s billed -> {ledger.total:.4f}/day variable")
