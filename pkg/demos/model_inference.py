"""
Show what the analysis and model inference stages see for a scenario: the
call sequences collected per class and the transition system built from them.

    python demos/model_inference.py static_only
"""

import argparse
import random

from crashseed.behmodel import model_stats, random_path
from crashseed.harness import analyze, bundled_scenarios, infer_bundle_models, load_bundle


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("scenario", nargs="?", default="static_only")
    ap.add_argument("--paths", type=int, default=3, help="random behaviours to draw per model")
    args = ap.parse_args()

    path = [p for p in bundled_scenarios() if p.name == args.scenario]
    if not path:
        raise SystemExit(f"no bundled scenario called {args.scenario!r}")
    bundle = load_bundle(path[0])

    sequences = analyze(bundle)
    print(f"call sequences collected from {bundle.name}:")
    for cls in sorted(sequences):
        seqs = sequences[cls]
        print(f"  {cls}: {len(seqs)} distinct")
        for s in sorted(seqs, key=lambda q: q.actions)[:4]:
            print(f"    [{s.origin}] " + " -> ".join(s.actions))

    models = infer_bundle_models(bundle)
    rng = random.Random(0)
    print()
    for cls in sorted(models):
        m = models[cls]
        st = model_stats(m)
        print(f"model {cls}: {st.states} states, {st.transitions} transitions, bfs height {st.bfs_height}")
        print(m.to_text())
        for _ in range(args.paths):
            print("  sample path: " + " -> ".join(random_path(m, rng=rng).actions))
        print()


if __name__ == "__main__":
    main()
