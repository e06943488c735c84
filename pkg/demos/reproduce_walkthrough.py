"""
Walk through one crash reproduction: load a bundled scenario, show the crash
we are chasing, search for it with and without model seeding, and print the
test that came out.

    python demos/reproduce_walkthrough.py
    python demos/reproduce_walkthrough.py static_only --budget 20000
"""

import argparse

from crashseed.harness import bundled_scenarios, load_bundle, reproduce
from crashseed.search import SearchConfig


def pick(name):
    for path in bundled_scenarios():
        if path.name == name:
            return path
    raise SystemExit(f"no bundled scenario called {name!r}")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("scenario", nargs="?", default="test_proximity")
    ap.add_argument("--budget", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    bundle = load_bundle(pick(args.scenario))
    print(f"scenario: {bundle.name}")
    print(f"  {bundle.description}")
    print("crash to reproduce:")
    print((bundle.path / "crash.txt").read_text().rstrip())
    print(f"target frame level: {bundle.crash.target_frame_level}")
    print()

    for mode in ("none", "model"):
        cfg = SearchConfig(budget=args.budget, seeding=mode, seed=args.seed)
        outcome = reproduce(bundle, cfg)
        b = outcome.breakdown
        print(f"[{mode:5}] {outcome.status:17} fitness {b.total:.4f} "
              f"after {outcome.evaluations} evaluations, {outcome.generations} generations")
        if outcome.reproduced:
            print("        test found:")
            for line in outcome.best_test.to_text().splitlines():
                print("          " + line)

    print()
    print("The last search log lines (gen, best, d_l, d_e, d_s, evals) for model seeding:")
    for line in outcome.log_lines[-3:]:
        print("  " + line)


if __name__ == "__main__":
    main()
