"""Scenario bundles: a program, its tests, a crash and a small config file."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import tomli

from ..search.fitness import CrashTarget
from ..sutlang.parser import parse_program, parse_tests
from ..sutlang.stacktrace import CrashReport, parse_stack_trace
from ..sutlang.syntax import Program

SCENARIO_FILE = "scenario.toml"
CRASH_FILE = "crash.txt"


class BundleError(Exception):
    """A bundle directory that cannot be loaded."""


@dataclass
class ScenarioBundle:
    name: str
    path: Path
    program: Program
    tests: list
    crash: CrashReport
    description: str = ""
    overrides: dict = field(default_factory=dict)
    tags: tuple = ()

    @property
    def target(self) -> CrashTarget:
        return CrashTarget.from_crash(self.crash, self.program)


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise BundleError(f"cannot read {path}: {exc.strerror or exc}") from exc


def load_bundle(path, target_frame_level=None) -> ScenarioBundle:
    root = Path(path)
    if not root.is_dir():
        raise BundleError(f"{root} is not a bundle directory")
    meta: dict = {}
    if (root / SCENARIO_FILE).exists():
        try:
            meta = tomli.loads(_read(root / SCENARIO_FILE))
        except tomli.TOMLDecodeError as exc:
            raise BundleError(f"{root / SCENARIO_FILE}: {exc}") from exc
    sources = sorted((root / "program").glob("*.sut"))
    if not sources:
        raise BundleError(f"{root}/program contains no .sut files")
    try:
        program = parse_program([(p.name, _read(p)) for p in sources])
    except ValueError as exc:
        raise BundleError(str(exc)) from exc
    tests: list = []
    for p in sorted((root / "tests").glob("*.sut-test")):
        try:
            tests.extend(parse_tests(_read(p), program, p.name))
        except ValueError as exc:
            raise BundleError(str(exc)) from exc
    crash_path = root / CRASH_FILE
    if not crash_path.exists():
        raise BundleError(f"{crash_path} is missing")
    level = target_frame_level or int(meta.get("target_frame_level", 1))
    try:
        crash = parse_stack_trace(_read(crash_path), level, program)
        bundle = ScenarioBundle(
            name=str(meta.get("name", root.name)),
            path=root,
            program=program,
            tests=tests,
            crash=crash,
            description=str(meta.get("description", "")),
            overrides=dict(meta.get("search", {})),
            tags=tuple(meta.get("tags", ())),
        )
        bundle.target  # validates the target line
    except ValueError as exc:
        raise BundleError(str(exc)) from exc
    return bundle


def bundled_scenarios_dir() -> Path:
    return Path(__file__).resolve().parent.parent / "scenarios"


def bundled_scenarios() -> list:
    """Paths of the scenarios shipped with the package, sorted by name."""
    root = bundled_scenarios_dir()
    return sorted(p for p in root.iterdir() if (p / CRASH_FILE).exists())
