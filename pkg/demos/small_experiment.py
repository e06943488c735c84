"""
A small experiment comparing seeding modes on a handful of bundled scenarios.
Writes report.csv and report.json to --out and prints the per-scenario summary.

    python demos/small_experiment.py --reps 5 --out /tmp/crashseed-demo
"""

import argparse
from pathlib import Path

from crashseed.harness import bundled_scenarios, run_experiment

DEFAULT = ("null_depth2", "test_proximity", "static_only", "not_started")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("scenarios", nargs="*", default=list(DEFAULT))
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--budget", type=int, default=5_000)
    ap.add_argument("--out", default="demo-experiment")
    args = ap.parse_args()

    paths = [p for p in bundled_scenarios() if p.name in set(args.scenarios)]
    report = run_experiment(paths, ["none", "test", "model"], args.reps, seed_base=0, budget=args.budget)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.csv").write_text(report.to_csv())
    (out / "report.json").write_text(report.to_json())

    print(f"{'scenario':16} {'mode':6} {'ratio':>6} {'majority':17} a12 vs none")
    for row in report.aggregates:
        a12 = row.get("a12_vs_baseline")
        print(f"{row['scenario']:16} {row['mode']:6} {row['reproduction_ratio']:6.2f} "
              f"{row['majority_outcome']:17} {'' if a12 is None else f'{a12:.3f}'}")
    print(f"\nreport written to {out}/")


if __name__ == "__main__":
    main()
