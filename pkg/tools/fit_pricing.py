"""Recover unit prices from the itemized reference bills.

The four reference scenarios ship with per-component dollar amounts
rounded to a handful of decimal places.  Each line item states its own
usage (invocation counts, memory, billed seconds), so the unit prices
are recoverable without touching the package: build the usage matrix,
solve the weighted least-squares system, and compare against the
defaults frozen in ``sflow.costs.PricingTable``.

The script also runs the forward check: every line item predicted from
the default prices must match the reference bill within its rounding
half-width.  Exits non-zero if either check fails.
"""

from __future__ import annotations

import sys

import numpy as np

from sflow.costs import PricingTable

# Price vector layout.  Container vCPU and memory rates only ever appear
# together (0.25 vCPU + 0.5 GB for 24 h), so they are fit as one combined
# per-container-hour rate and split against the defaults afterwards.
PARAMS = [
    "function_gb_second",
    "function_request",
    "orchestration_transition",
    "storage_get_per_1k",
    "storage_put_per_1k",
    "bus_per_million",
    "queue_fifo_per_million",
    "queue_standard_per_million",
    "container_hour_combined",
]

FN_GB = 340.0 / 1024.0
FIFO_M = 4320 / 1e6
STD_M = 8640 / 1e6


def _lambda(inv: int, gb: float, seconds: float) -> dict[str, float]:
    return {"function_gb_second": inv * gb * seconds, "function_request": inv}


def reference_bills() -> list[tuple[str, dict[str, float], float, int]]:
    """(line id, usage vector, observed USD, printed decimals) rows."""
    rows: list[tuple[str, dict[str, float], float, int]] = []

    def scenario(tag: str, tasks: int, sched_inv: int, worker_s: float,
                 lines: dict[str, tuple[float, int]]) -> None:
        usage = {
            "worker": _lambda(tasks, FN_GB, worker_s),
            "executor": _lambda(tasks, 0.25, 1.0),
            "scheduler": _lambda(sched_inv, 0.5, 10.0),
            "cdc": _lambda(sched_inv, 0.5, 1.0),
            "transitions": {"orchestration_transition": 4.0 * tasks},
            "get": {"storage_get_per_1k": tasks / 1000.0},
            "put": {"storage_put_per_1k": tasks / 1000.0},
            "bus": {"bus_per_million": 15.0 * tasks / 1e6},
            "fifo": {"queue_fifo_per_million": FIFO_M},
            "standard": {"queue_standard_per_million": STD_M},
        }
        if worker_s == 0:
            usage["worker"] = {"container_hour_combined": tasks * 24.0}
        for name, (usd, decimals) in lines.items():
            rows.append((f"{tag}:{name}", usage[name], usd, decimals))

    scenario("s1", 1000, 1530, 180.0, {
        "worker": (0.9963, 4), "executor": (0.0044, 4),
        "scheduler": (0.1278, 4), "cdc": (0.0131, 4),
        "transitions": (0.1000, 4), "get": (0.0004, 4),
        "put": (0.0050, 4), "bus": (0.0150, 4),
        "fifo": (0.0022, 4), "standard": (0.0035, 4),
    })
    scenario("s2", 2400, 3609, 60.0, {
        "worker": (0.7974, 4), "executor": (0.0105, 4),
        "scheduler": (0.3015, 4), "cdc": (0.0308, 4),
        "transitions": (0.24, 2), "get": (0.001, 3),
        "put": (0.012, 3), "bus": (0.036, 3),
        "fifo": (0.0022, 4), "standard": (0.0035, 4),
    })
    scenario("s3", 20, 32, 30.0, {
        "worker": (0.0033, 4), "executor": (0.0001, 4),
        "scheduler": (0.0027, 4), "cdc": (0.0003, 4),
        "transitions": (0.002, 3), "get": (0.0, 4),
        "put": (0.0001, 4), "bus": (0.0003, 4),
        "fifo": (0.0022, 4), "standard": (0.0035, 4),
    })
    # Container scenario: worker_s=0 switches the worker line to
    # container-hours (100 tasks x 24 h each).
    scenario("s4", 100, 152, 0.0, {
        "worker": (29.62, 2), "executor": (0.0004, 4),
        "scheduler": (0.0127, 4), "cdc": (0.0013, 4),
        "transitions": (0.01, 2), "get": (0.0, 4),
        "put": (0.0005, 4), "bus": (0.0015, 4),
        "fifo": (0.0022, 4), "standard": (0.0035, 4),
    })
    return rows


def default_vector(pricing: PricingTable) -> np.ndarray:
    combined = 0.25 * pricing.container_vcpu_hour + 0.5 * pricing.container_gb_hour
    values = [getattr(pricing, name) for name in PARAMS[:-1]]
    return np.array(values + [combined])


def fit_prices() -> tuple[np.ndarray, list[tuple[str, float, float, float]]]:
    """Weighted least-squares fit and the per-line forward residuals."""
    rows = reference_bills()
    a = np.zeros((len(rows), len(PARAMS)))
    b = np.zeros(len(rows))
    weights = np.zeros(len(rows))
    for i, (_, usage, usd, decimals) in enumerate(rows):
        for name, amount in usage.items():
            a[i, PARAMS.index(name)] = amount
        b[i] = usd
        weights[i] = 1.0 / (0.5 * 10.0 ** -decimals)
    theta, *_ = np.linalg.lstsq(a * weights[:, None], b * weights, rcond=None)

    defaults = default_vector(PricingTable())
    forward = []
    for (line, usage, usd, decimals), row in zip(rows, a):
        predicted = float(row @ defaults)
        tol = 0.5 * 10.0 ** -decimals + 1e-12
        forward.append((line, predicted, usd, tol))
    return theta, forward


def main() -> int:
    theta, forward = fit_prices()
    defaults = default_vector(PricingTable())

    print(f"{'parameter':<28} {'fitted':>14} {'default':>14} {'rel diff':>9}")
    failed = False
    for name, fitted, default in zip(PARAMS, theta, defaults):
        rel = abs(fitted - default) / default
        print(f"{name:<28} {fitted:>14.10f} {default:>14.10f} {rel:>8.2%}")
        # The per-request fee is tiny relative to rounding noise; all other
        # rates must land within 5% of the defaults.
        limit = 0.5 if name == "function_request" else 0.05
        if rel > limit:
            failed = True
            print(f"  -> fitted value outside {limit:.0%} of default")

    print("\nforward check (defaults vs reference bills):")
    worst = max(forward, key=lambda f: abs(f[1] - f[2]) - f[3])
    for line, predicted, observed, tol in forward:
        if abs(predicted - observed) > tol:
            failed = True
            print(f"  FAIL {line}: predicted {predicted:.6f} vs {observed} "
                  f"(tol {tol:g})")
    print(f"  worst line {worst[0]}: predicted {worst[1]:.6f} vs {worst[2]} "
          f"(tol {worst[3]:g})")
    print("FAIL" if failed else "OK: defaults reproduce every reference line")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
