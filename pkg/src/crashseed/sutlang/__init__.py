"""The mini-language playing the role of the software under test."""

from .interpreter import (
    BUDGET_EXHAUSTED,
    DEFAULT_STEP_LIMIT,
    DIVIDE_BY_ZERO,
    HARNESS_ERROR,
    NULL_DEREFERENCE,
    ExecutionResult,
    Interpreter,
    Thrown,
    execute_test,
)
from .parser import HARNESS_CLASS, SutSyntaxError, parse_program, parse_tests
from .stacktrace import (
    CrashReport,
    Frame,
    StackTraceError,
    format_crash,
    format_stack_trace,
    parse_stack_trace,
)
from .syntax import ClassDef, MethodDef, Program
from .testcase import Check, Construct, Declare, Invoke, Ref, TestCase

__all__ = [
    "BUDGET_EXHAUSTED", "DEFAULT_STEP_LIMIT", "DIVIDE_BY_ZERO", "HARNESS_ERROR", "NULL_DEREFERENCE",
    "ExecutionResult", "Interpreter", "Thrown", "execute_test",
    "HARNESS_CLASS", "SutSyntaxError", "parse_program", "parse_tests",
    "CrashReport", "Frame", "StackTraceError", "format_crash", "format_stack_trace", "parse_stack_trace",
    "ClassDef", "MethodDef", "Program",
    "Check", "Construct", "Declare", "Invoke", "Ref", "TestCase",
]
