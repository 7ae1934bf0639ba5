"""Batch front end: run the case-study pipelines and emit plot-ready CSVs.

Three pipelines share one config:

* known    — pricing and scheduling with the true externality graph;
* unknown  — the supplier models the customers as disconnected; both its
             predicted profit and the profit realized at the true
             equilibrium are reported, along with capacity violations;
* baseline — maintain each unit exactly at its effective threshold,
             priced with the true graph.

Every output byte is determined by the manifest (config, seed, scenario
count, mode).
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .model import ConfigError, ValidationError, load_config
from .pricing import build_revenue_table, realized_profit_of_prices, subset_capacity
from .reliability import SamplingError, sample_scenarios
from .scheduler import SchedulingError, baseline_schedule, optimal_schedule_dp

__all__ = ["RunManifest", "run_case_study", "compare_modes", "main"]

MODES = ("known", "unknown", "baseline", "all")


@dataclasses.dataclass(frozen=True)
class RunManifest:
    """Everything that determines a run's outputs."""

    config: Path
    out_dir: Path
    seed: int | None = None  # None: take the config's rng_seed
    k_scenarios: int | None = None  # None: take the config's k_scenarios
    mode: str = "all"
    version: str = __version__

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


def _fmt(value) -> str:
    # shortest round-trip decimal; also normalizes numpy scalars
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(header)
        for row in rows:
            out.writerow([_fmt(v) for v in row])


def _capacities_of(fleet, schedule) -> np.ndarray:
    t_count = schedule.t_count
    caps = np.zeros(t_count)
    for t in range(t_count):
        mask = 0
        for j in range(fleet.j_count):
            if schedule.x[j, t]:
                mask |= 1 << j
        caps[t] = subset_capacity(fleet.q_max, mask)
    return caps


def run_case_study(manifest: RunManifest) -> dict:
    """Run the pipelines selected by ``manifest.mode`` and write reports.

    Returns the profit summary as a dict (also written to
    ``profit_summary.csv``).
    """
    net, fleet, horizon = load_config(manifest.config)
    seed = horizon.rng_seed if manifest.seed is None else manifest.seed
    k = horizon.k_scenarios if manifest.k_scenarios is None else manifest.k_scenarios
    out = Path(manifest.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    scenarios = sample_scenarios(fleet, k, seed)
    effective = scenarios.effective
    scenarios.dump_csv(out / "scenarios.csv")

    want = manifest.mode
    t_range = range(horizon.t_count)
    summary: dict[str, float] = {}
    rows = []

    known_tables = None
    if want in ("known", "baseline", "all"):
        known_tables = [
            build_revenue_table(net, fleet, t, network_known=True) for t in t_range
        ]

    known = None
    if want in ("known", "all"):
        known = optimal_schedule_dp(fleet, effective, known_tables)
        summary["known"] = known.profit
        rows.append(
            ("known", known.pricing.total_revenue, known.maintenance_cost,
             known.profit, 0)
        )
        _write_csv(
            out / "prices.csv",
            ["period"] + [f"phi_{i + 1}" for i in range(net.n)],
            [(t + 1, *known.pricing.phi[:, t]) for t in t_range],
        )
        _write_csv(
            out / "consumption.csv",
            ["period"] + [f"q_{i + 1}" for i in range(net.n)],
            [(t + 1, *known.pricing.q[:, t]) for t in t_range],
        )
        _write_csv(
            out / "schedule.csv",
            ["unit", "period", "x", "s"],
            [
                (j + 1, t + 1, int(known.schedule.x[j, t]), int(known.schedule.s[j, t]))
                for j in range(fleet.j_count)
                for t in t_range
            ],
        )

    baseline = None
    if want in ("baseline", "all"):
        baseline = baseline_schedule(fleet, effective, known_tables)
        summary["baseline"] = baseline.profit
        rows.append(
            ("baseline", baseline.pricing.total_revenue, baseline.maintenance_cost,
             baseline.profit, 0)
        )

    if want in ("unknown", "all"):
        predicted_tables = [
            build_revenue_table(net, fleet, t, network_known=False) for t in t_range
        ]
        unknown = optimal_schedule_dp(fleet, effective, predicted_tables)
        caps = _capacities_of(fleet, unknown.schedule)
        _, realized_rev, violations = realized_profit_of_prices(
            net, unknown.pricing.phi, caps
        )
        summary["unknown_predicted"] = unknown.profit
        summary["unknown_realized"] = realized_rev - unknown.maintenance_cost
        rows.append(
            ("unknown_predicted", unknown.pricing.total_revenue,
             unknown.maintenance_cost, unknown.profit, len(violations))
        )
        rows.append(
            ("unknown_realized", realized_rev, unknown.maintenance_cost,
             summary["unknown_realized"], len(violations))
        )

    if want == "all":
        _write_csv(
            out / "deterioration.csv",
            ["unit", "period", "s_known", "s_baseline"],
            [
                (j + 1, t + 1, int(known.schedule.s[j, t]), int(baseline.schedule.s[j, t]))
                for j in range(fleet.j_count)
                for t in range(horizon.t_count + 1)
            ],
        )

    _write_csv(
        out / "profit_summary.csv",
        ["mode", "revenue", "maintenance_cost", "profit", "capacity_violations"],
        rows,
    )
    _write_csv(
        out / "manifest.csv",
        ["config", "seed", "k_scenarios", "mode", "version"],
        [(str(manifest.config), seed, k, manifest.mode, manifest.version)],
    )
    return summary


def compare_modes(manifest: RunManifest) -> dict:
    """Run all three pipelines and write a one-table profit comparison."""
    summary = run_case_study(dataclasses.replace(manifest, mode="all"))
    known = summary["known"]
    rows = [
        (mode, profit, known - profit)
        for mode, profit in summary.items()
    ]
    _write_csv(
        Path(manifest.out_dir) / "comparison.csv",
        ["mode", "profit", "delta_vs_known"],
        rows,
    )
    return summary


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netmaint",
        description="Joint network pricing and predictive-maintenance scheduling",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, help_text in (
        ("run", "run the selected pipeline(s) and write report CSVs"),
        ("compare", "run all pipelines and write a profit comparison table"),
    ):
        p = sub.add_parser(cmd, help=help_text)
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--out", required=True, type=Path)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--scenarios", type=int, default=None)
        if cmd == "run":
            p.add_argument("--mode", choices=MODES, default="all")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    manifest = RunManifest(
        config=args.config,
        out_dir=args.out,
        seed=args.seed,
        k_scenarios=args.scenarios,
        mode=getattr(args, "mode", "all"),
    )
    try:
        if args.command == "run":
            summary = run_case_study(manifest)
        else:
            summary = compare_modes(manifest)
    except ConfigError as exc:
        print(f"config-error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"validation-error: {exc}", file=sys.stderr)
        return 3
    except SamplingError as exc:
        print(f"sampling-error: {exc}", file=sys.stderr)
        return 4
    except SchedulingError as exc:
        print(f"scheduling-error: {exc}", file=sys.stderr)
        return 5
    for mode, profit in summary.items():
        print(f"{mode}: {profit!r}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
