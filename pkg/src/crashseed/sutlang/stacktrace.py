"""Stack frames, crash reports and the textual stack-trace format.

The wire format mirrors a JVM trace::

    NullDereference: value was null
    \tat Parser.parse(Parser.sut:12)
    \tat Service.handle(Service.sut:7)
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

_HEADER_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:: (.*))?$")
_FRAME_RE = re.compile(r"^\tat ([A-Za-z_][A-Za-z0-9_]*)\.([A-Za-z_][A-Za-z0-9_]*|<init>)\(([^():\t]+):(\d+)\)$")


class StackTraceError(ValueError):
    pass


@dataclass(frozen=True)
class Frame:
    class_name: str
    method: str
    line: int
    file: str = field(default="", compare=False)

    @property
    def location(self) -> tuple:
        return (self.class_name, self.method, self.line)

    def to_text(self) -> str:
        return f"\tat {self.class_name}.{self.method}({self.file or self.class_name + '.sut'}:{self.line})"


@dataclass(frozen=True)
class CrashReport:
    exception_type: str
    message: Optional[str]
    frames: tuple
    target_frame_level: int = 1

    def __post_init__(self) -> None:
        _check_level(self.target_frame_level, len(self.frames))

    @property
    def target_frame(self) -> Frame:
        return self.frames[self.target_frame_level - 1]

    @property
    def required_frames(self) -> tuple:
        return self.frames[: self.target_frame_level]

    def with_level(self, level: int) -> "CrashReport":
        return CrashReport(self.exception_type, self.message, self.frames, level)


def format_stack_trace(exception_type: str, message: Optional[str], frames) -> str:
    head = exception_type if message is None else f"{exception_type}: {message}"
    return "\n".join([head] + [f.to_text() for f in frames]) + "\n"


def format_crash(report: CrashReport) -> str:
    return format_stack_trace(report.exception_type, report.message, report.frames)


def _check_level(level: int, n_frames: int) -> None:
    if not 1 <= level <= n_frames:
        raise StackTraceError(f"target frame out of range: {level} not in 1..{n_frames}")


def parse_stack_trace(text: str, target_frame_level: int = 1, program=None) -> CrashReport:
    """Parse the textual trace; frames come back innermost first.

    When ``program`` is given the target frame's class must belong to it.
    """
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise StackTraceError("empty stack trace")
    m = _HEADER_RE.match(lines[0])
    if m is None:
        raise StackTraceError(f"malformed header line: {lines[0]!r}")
    exc_type, message = m.group(1), m.group(2)
    frames = []
    for n, raw in enumerate(lines[1:], start=2):
        fm = _FRAME_RE.match(raw)
        if fm is None:
            raise StackTraceError(f"malformed frame at line {n}: {raw!r}")
        frames.append(Frame(fm.group(1), fm.group(2), int(fm.group(4)), fm.group(3)))
    if not frames:
        raise StackTraceError("stack trace has no frames")
    _check_level(target_frame_level, len(frames))
    report = CrashReport(exc_type, message, tuple(frames), target_frame_level)
    if program is not None and report.target_frame.class_name not in program:
        raise StackTraceError(f"target frame class {report.target_frame.class_name} is not part of the program")
    return report
