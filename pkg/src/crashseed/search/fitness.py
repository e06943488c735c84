"""Crash-reproduction fitness: 3 * line distance + 2 * exception distance + stack distance."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..sutlang.interpreter import DEFAULT_STEP_LIMIT, ExecutionResult, Interpreter
from ..sutlang.stacktrace import CrashReport, format_stack_trace
from ..sutlang.syntax import Program


class InvalidTargetError(ValueError):
    pass


@dataclass(frozen=True)
class CrashTarget:
    crash: CrashReport

    @property
    def frame(self):
        return self.crash.target_frame

    @property
    def target_class(self) -> str:
        return self.frame.class_name

    @property
    def target_method(self) -> str:
        return self.frame.method

    @property
    def target_line(self) -> int:
        return self.frame.line

    @property
    def level(self) -> int:
        return self.crash.target_frame_level

    @property
    def exception_type(self) -> str:
        return self.crash.exception_type

    @property
    def required_frames(self) -> tuple:
        return self.crash.required_frames

    @classmethod
    def from_crash(cls, crash: CrashReport, program: Program) -> "CrashTarget":
        f = crash.target_frame
        if f.class_name not in program:
            raise InvalidTargetError(f"target class {f.class_name} is not part of the program")
        if not program.has_line(f.class_name, f.method, f.line):
            raise InvalidTargetError(f"line {f.line} is not a statement of {f.class_name}.{f.method}")
        return cls(crash)


@dataclass(frozen=True)
class FitnessBreakdown:
    d_l: float
    d_e: float
    d_s: float

    @property
    def total(self) -> float:
        return 3.0 * self.d_l + 2.0 * self.d_e + self.d_s

    def as_dict(self) -> dict:
        return {"total": self.total, "d_l": self.d_l, "d_e": self.d_e, "d_s": self.d_s}


WORST = FitnessBreakdown(1.0, 1.0, 1.0)


def _normalized(gap: int) -> float:
    return gap / (gap + 1.0)


def compute_line_distance(result: ExecutionResult, target: CrashTarget) -> float:
    cls, meth, line = target.target_class, target.target_method, target.target_line
    best = None
    for c, m, l in result.executed_lines:
        if c == cls and m == meth:
            if l == line:
                return 0.0
            gap = abs(l - line)
            if best is None or gap < best:
                best = gap
    return 1.0 if best is None else _normalized(best)


def compute_exception_distance(result: ExecutionResult, target: CrashTarget, d_l: float) -> float:
    """0 when the target exception passes through the target frame's exact location."""
    if d_l > 0 or result.thrown is None:
        return 1.0
    thrown = result.thrown
    if thrown.exception_type != target.exception_type or len(thrown.frames) < target.level:
        return 1.0
    return 0.0 if thrown.frames[target.level - 1].location == target.frame.location else 1.0


def compute_stack_distance(result: ExecutionResult, target: CrashTarget, d_e: float) -> float:
    if d_e > 0:
        return 1.0
    generated = result.thrown.frames
    required = target.required_frames
    total = 0.0
    for i, want in enumerate(required):
        if i >= len(generated):
            total += 1.0
            continue
        got = generated[i]
        if got.class_name != want.class_name or got.method != want.method:
            total += 1.0
        else:
            total += _normalized(abs(got.line - want.line))
    return total / len(required)


def breakdown_for(result: ExecutionResult, target: CrashTarget) -> FitnessBreakdown:
    d_l = compute_line_distance(result, target)
    d_e = compute_exception_distance(result, target, d_l)
    d_s = compute_stack_distance(result, target, d_e)
    return FitnessBreakdown(d_l, d_e, d_s)


def trace_signature(exception_type: str, frames) -> str:
    """Trace text compared by location only (file names normalized away)."""
    return format_stack_trace(exception_type, None, [f.__class__(f.class_name, f.method, f.line, "-") for f in frames])


class FitnessFunction:
    """Executes tests and scores them, counting every evaluation."""

    def __init__(self, program: Program, target: CrashTarget, step_limit: int = DEFAULT_STEP_LIMIT):
        self.program = program
        self.target = target
        self.interpreter = Interpreter(program, step_limit)
        self.evaluations = 0

    def __call__(self, test) -> FitnessBreakdown:
        return self.evaluate(test)[0]

    def evaluate(self, test) -> tuple:
        self.evaluations += 1
        if test is None:
            return WORST, None
        result = self.interpreter.run(test)
        return breakdown_for(result, self.target), result


def fitness(test, program: Program, target: CrashTarget, step_limit: int = DEFAULT_STEP_LIMIT) -> FitnessBreakdown:
    """Score one test; ``None`` stands for a test that could not be built (6.0)."""
    return FitnessFunction(program, target, step_limit)(test)
