"""Command line: analyze, infer-models, reproduce, experiment.

Exit codes: 0 crash reproduced (or command succeeded), 2 search ended in any
other status, 1 usage or input error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..search.ga import SEEDING_MODES, SearchConfig
from ..seeding import SeedingConfig
from .bundle import BundleError, bundled_scenarios, load_bundle
from .experiment import ProbabilitySetting, run_experiment
from .pipeline import analyze, infer_bundle_models, load_models, reproduce, write_models, write_outcome, write_sequences

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_REPRODUCED = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _probability(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} must be >= 1")
    return v


def _search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seeding", choices=SEEDING_MODES, default="none")
    p.add_argument("--pick-init", type=_probability, default=None, help="default 0.8")
    p.add_argument("--pick-mut", type=_probability, default=None, help="default 0.3")
    p.add_argument("--clone", type=_probability, default=None, help="default 0.2")
    p.add_argument("--budget", type=_positive, default=None, help="fitness evaluations, default 62328")
    p.add_argument("--population", type=_positive, default=None, help="default 100")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--frame", type=_positive, default=None, help="target frame level (bundle default otherwise)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="crashseed", description="Search-based crash reproduction with model and test seeding.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="collect static and dynamic call sequences")
    p.add_argument("bundle")
    p.add_argument("--out", default=None)

    p = sub.add_parser("infer-models", help="infer one transition system per class")
    p.add_argument("bundle")
    p.add_argument("--out", default="models")

    p = sub.add_parser("reproduce", help="search for a test reproducing the bundle's crash")
    p.add_argument("bundle")
    _search_flags(p)
    p.add_argument("--models", default=None, help="reuse models written by infer-models")
    p.add_argument("--out", default="out")

    p = sub.add_parser("experiment", help="repeat searches over scenarios and seeding modes")
    p.add_argument("bundles", nargs="*", help="bundle directories (default: the bundled scenarios)")
    p.add_argument("--modes", default="none,test,model")
    _search_flags(p)
    p.add_argument("--reps", type=int, default=30)
    p.add_argument("--jobs", type=_positive, default=1)
    p.add_argument("--out", default="experiment")
    return parser


def _load(path, frame=None):
    return load_bundle(path, frame)


def _config(args) -> SearchConfig:
    defaults = SeedingConfig()
    sc = SeedingConfig(
        pick_init=defaults.pick_init if args.pick_init is None else args.pick_init,
        pick_mut=defaults.pick_mut if args.pick_mut is None else args.pick_mut,
        clone=defaults.clone if args.clone is None else args.clone,
    )
    kw = {}
    if args.budget is not None:
        kw["budget"] = args.budget
    if args.population is not None:
        kw["population"] = args.population
    return SearchConfig(seeding=args.seeding, seed=args.seed, seeding_config=sc, **kw)


def cmd_analyze(args) -> int:
    bundle = _load(args.bundle)
    sequences = analyze(bundle)
    for cname in sorted(sequences):
        print(f"{cname}\t{len(sequences[cname])} sequences")
    if args.out:
        print(write_sequences(sequences, args.out))
    return EXIT_OK


def cmd_infer_models(args) -> int:
    bundle = _load(args.bundle)
    models = infer_bundle_models(bundle)
    if not models:
        raise UsageError("no call sequences: nothing to model")
    rows = write_models(models, args.out)
    print("class\tstates\ttransitions\tbfs_height")
    for row in rows:
        print("\t".join(str(x) for x in row))
    return EXIT_OK


def cmd_reproduce(args) -> int:
    bundle = _load(args.bundle, args.frame)
    models = None
    if args.models:
        try:
            models = load_models(args.models)
        except (OSError, ValueError) as exc:
            raise UsageError(str(exc)) from exc
    outcome = reproduce(bundle, _config(args), models)
    for w in outcome.warnings:
        print(f"warning: {w}", file=sys.stderr)
    paths = write_outcome(outcome, args.out, bundle.name)
    print(f"{bundle.name}: {outcome.status} after {outcome.evaluations} evaluations "
          f"(fitness {outcome.breakdown.total:.4f})")
    for key in sorted(paths):
        print(f"  {key}: {paths[key]}")
    return EXIT_OK if outcome.reproduced else EXIT_NOT_REPRODUCED


def cmd_experiment(args) -> int:
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    bad = [m for m in modes if m not in SEEDING_MODES]
    if bad:
        raise UsageError(f"unknown seeding mode(s): {', '.join(bad)}")
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    paths = args.bundles or [str(p) for p in bundled_scenarios()]
    for p in paths:
        _load(p)  # fail early on a broken bundle
    defaults = SeedingConfig()
    setting = ProbabilitySetting(
        defaults.pick_init if args.pick_init is None else args.pick_init,
        defaults.pick_mut if args.pick_mut is None else args.pick_mut,
        defaults.clone if args.clone is None else args.clone,
    )
    report = run_experiment(
        paths, modes, args.reps, args.seed, [setting], args.budget, args.population, args.jobs,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.csv").write_text(report.to_csv(), encoding="utf-8")
    (out / "report.json").write_text(report.to_json(), encoding="utf-8")
    for row in report.aggregates:
        print(f"{row['scenario']:<24} {row['mode']:<6} reproduced {row['reproduction_ratio']:.2f} "
              f"majority {row['majority_outcome']}")
    print(out / "report.csv")
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "infer-models": cmd_infer_models,
    "reproduce": cmd_reproduce,
    "experiment": cmd_experiment,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (BundleError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
