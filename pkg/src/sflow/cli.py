"""Command-line entry points.

    sflow run --config cfg.json --out results/ [--seed N] [--system faas]
    sflow cost scenario1 [--ha] [--out dir]
    sflow cost --trace results/faas/seed-0/trace.json
    sflow analyze path/to/dag.json|trace.csv [--out stats.json]
    sflow compare left/summary.csv right/summary.csv [--system faas] [--out out.csv]

Seeds resolve in priority order: --seed flag, then the SFLOW_SEED
environment variable, then the config's seed list.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path
from typing import Optional

from .costs import (
    SCENARIOS,
    CostLedger,
    PricingTable,
    estimate_baseline_cost,
    estimate_fixed_cost,
    estimate_variable_cost,
    inputs_from_trace,
    scenario_cost,
)
from .experiments import (
    COMPARE_COLUMNS,
    SYSTEMS,
    compare_summaries,
    read_summary_csv,
    run_config,
)
from .sim import load_trace, rows_to_csv
from .workloads import analyze, load_dag_file


def _resolve_seeds(args: argparse.Namespace, config: dict) -> list[int]:
    if getattr(args, "seed", None) is not None:
        return [args.seed]
    env = os.environ.get("SFLOW_SEED")
    if env is not None:
        return [int(env)]
    return [int(s) for s in config.get("seeds", [0])]


def cmd_run(args: argparse.Namespace) -> int:
    config = json.loads(Path(args.config).read_text())
    config["seeds"] = _resolve_seeds(args, config)
    if args.system:
        config["systems"] = [args.system]
    result = run_config(config, out_dir=args.out)
    rows = result["summary"]
    print(f"workload: {config.get('label', args.config)}")
    print(f"{'system':<10} {'metric':<22} {'count':>6} {'median':>12} {'mean':>12}")
    for row in rows:
        print(f"{row.system:<10} {row.metric:<22} {row.count:>6} "
              f"{row.median:>12.3f} {row.mean:>12.3f}")
    systems = {r.system for r in rows}
    if "baseline" in systems:
        for system in sorted(systems - {"baseline"}):
            base = next(r for r in rows if r.system == "baseline" and r.metric == "makespan_s")
            mine = next(r for r in rows if r.system == system and r.metric == "makespan_s")
            if mine.median:
                print(f"makespan ratio baseline/{system}: {base.median / mine.median:.2f}")
    if args.out:
        print(f"artifacts written to {args.out}")
    return 0


def _print_ledger(ledger: CostLedger) -> None:
    print(f"[{ledger.title}]")
    for line in ledger.lines:
        print(f"  {line.component:<28} {line.usd:>10.4f}  {line.notes}")
    print(f"  {'total':<28} {ledger.total:>10.4f}")


def _ledger_rows(ledgers: list[CostLedger]) -> list[dict]:
    rows = []
    for ledger in ledgers:
        for item in ledger.as_rows():
            rows.append({"section": ledger.title, **item})
    return rows


def cmd_cost(args: argparse.Namespace) -> int:
    pricing = PricingTable()
    ledgers: list[CostLedger] = []
    if args.trace:
        trace = load_trace(args.trace)
        variable = estimate_variable_cost(inputs_from_trace(trace), pricing)
        ledgers.append(variable)
        print(f"trace: {args.trace} ({trace.system}, seed {trace.seed})")
    elif args.scenario:
        spec = SCENARIOS[args.scenario]
        variable = scenario_cost(args.scenario, pricing)
        ledgers.append(variable)
        print(f"{spec.name} ({spec.title}): {spec.description}")
    else:
        print("error: give a scenario name or --trace", file=sys.stderr)
        return 2

    fixed = estimate_fixed_cost(pricing, ha=args.ha)
    ledgers.append(fixed)
    _print_ledger(variable)
    _print_ledger(fixed)
    print(f"platform daily total: {variable.total + fixed.total:.4f}")

    if args.scenario:
        spec = SCENARIOS[args.scenario]
        hours = spec.baseline_worker_hours()
        baseline = estimate_baseline_cost(hours, pricing)
        ledgers.append(baseline)
        _print_ledger(baseline)
        print(f"baseline daily total: {baseline.total:.4f}")

    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        name = args.scenario or "trace"
        csv_text = rows_to_csv(_ledger_rows(ledgers),
                               ["section", "component", "notes", "usd"])
        (out / f"costs-{name}.csv").write_text(csv_text)
        print(f"ledger written to {out / f'costs-{name}.csv'}")
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    dag = load_dag_file(args.dag)
    stats = analyze(dag)
    payload = {"dag_id": dag.dag_id, **dataclasses.asdict(stats)}
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    left = read_summary_csv(args.left)
    right = read_summary_csv(args.right)
    rows = compare_summaries(left, right, system=args.system)
    if not rows:
        print("error: no joinable rows between the two summaries", file=sys.stderr)
        return 1
    text = rows_to_csv(rows, COMPARE_COLUMNS)
    print(text, end="")
    if args.out:
        Path(args.out).write_text(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sflow",
        description="Simulate an event-driven serverless workflow orchestrator "
                    "against a polling baseline, and price both.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a workload config")
    p_run.add_argument("--config", required=True, help="JSON experiment config")
    p_run.add_argument("--out", help="directory for traces, CSVs, and summary")
    p_run.add_argument("--seed", type=int, help="override all seeds with one value")
    p_run.add_argument("--system", choices=SYSTEMS, help="run only this system")
    p_run.set_defaults(func=cmd_run)

    p_cost = sub.add_parser("cost", help="price a scenario or a simulated trace")
    p_cost.add_argument("scenario", nargs="?", choices=sorted(SCENARIOS),
                        help="closed-form usage scenario")
    p_cost.add_argument("--trace", help="price a trace.json instead")
    p_cost.add_argument("--ha", action="store_true",
                        help="use the highly-available fixed-cost tier")
    p_cost.add_argument("--out", help="directory for the ledger CSV")
    p_cost.set_defaults(func=cmd_cost)

    p_an = sub.add_parser("analyze", help="DAG shape statistics")
    p_an.add_argument("dag", help="DAG definition JSON or trace CSV")
    p_an.add_argument("--out", help="write the stats JSON here")
    p_an.set_defaults(func=cmd_analyze)

    p_cmp = sub.add_parser("compare", help="join two summary.csv files with ratios")
    p_cmp.add_argument("left")
    p_cmp.add_argument("right")
    p_cmp.add_argument("--system", help="restrict both sides to one system")
    p_cmp.add_argument("--out", help="write the joined CSV here")
    p_cmp.set_defaults(func=cmd_compare)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
