"""
Workflow shape analytics from production traces
===============================================

Parse batch-job dependency traces ("M3_1_2,45" = task M3 depends on M1 and
M2 and runs 45s), then reduce each DAG to the three numbers that predict
its scheduling behaviour: critical path p_d (makespan lower bound),
longest node path n_L (depth), and max parallelism n_W (peak width).
"""

from sflow import (
    analyze,
    fixture_path,
    list_fixtures,
    parse_trace_dag,
    parse_trace_dag_text,
)

# Inline example first: a two-layer join.
text = """\
M1,10
M2,30
M3_1_2,45
M4_3,5
"""
dag = parse_trace_dag_text(text, dag_id="inline")
stats = analyze(dag)
print(f"inline: n={stats.n_tasks}  p_d={stats.critical_path_s}s  "
      f"n_L={stats.longest_path_len}  n_W={stats.max_parallelism}")

# Bundled trace fixtures, one per shape family.
print(f"\nfixtures: {', '.join(list_fixtures())}")
print("\nfixture            n    p_d(s)  n_L  n_W  suggested period")
for name in list_fixtures():
    dag = parse_trace_dag(fixture_path(name))
    s = analyze(dag)
    print(f"{name:<18} {s.n_tasks:3d}  {s.critical_path_s:7.1f}  {s.longest_path_len:3d}"
          f"  {s.max_parallelism:3d}  {s.suggested_period_minutes:5.0f} min")

# Durations are clamped to 60s on parse so a trace DAG stays runnable at
# simulation periods; the chain-like job keeps its 439s critical path.
dag = parse_trace_dag(fixture_path("job_chainlike.csv"))
print(f"\nclamped durations over 60s: "
      f"{sum(1 for t in dag.tasks if t.duration_s == 60.0)} of {len(dag.tasks)}")
