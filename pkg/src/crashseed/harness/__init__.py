"""Scenario bundles, the end-to-end pipeline, experiments and the command line."""

from .bundle import BundleError, ScenarioBundle, bundled_scenarios, load_bundle
from .experiment import ExperimentReport, ProbabilitySetting, run_experiment
from .pipeline import analyze, infer_bundle_models, load_models, reproduce, write_models, write_outcome
from .stats import majority_outcome, reproduction_ratio, vargha_delaney_a12

__all__ = [
    "BundleError", "ScenarioBundle", "bundled_scenarios", "load_bundle",
    "ExperimentReport", "ProbabilitySetting", "run_experiment",
    "analyze", "infer_bundle_models", "load_models", "reproduce", "write_models", "write_outcome",
    "majority_outcome", "reproduction_ratio", "vargha_delaney_a12",
]
