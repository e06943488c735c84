import pytest

from crashseed.search import (
    WORST,
    CrashTarget,
    FitnessBreakdown,
    FitnessFunction,
    InvalidTargetError,
    compute_exception_distance,
    compute_line_distance,
    compute_stack_distance,
    fitness,
)
from crashseed.sutlang import CrashReport, Frame, parse_stack_trace
from crashseed.sutlang.interpreter import ExecutionResult, Thrown

from conftest import one_test, program_of


def target(frames, level=1, exc="Boom"):
    return CrashTarget(CrashReport(exc, None, tuple(Frame(*f) for f in frames), level))


def result(lines=(), thrown=None):
    r = ExecutionResult(executed_lines=list(lines))
    if thrown is not None:
        exc, frames = thrown
        r.thrown = Thrown(exc, None, tuple(Frame(*f) for f in frames))
    return r


T1 = target([("A", "m", 10)])


def test_line_distance_cases():
    assert compute_line_distance(result([("A", "m", 10)]), T1) == 0.0
    assert compute_line_distance(result([("A", "m", 8), ("A", "m", 5)]), T1) == pytest.approx(2 / 3)
    assert compute_line_distance(result([("A", "n", 10)]), T1) == 1.0


def test_exception_distance_cases():
    hit = result([("A", "m", 10)], ("Boom", [("A", "m", 10)]))
    assert compute_exception_distance(hit, T1, 0.0) == 0.0
    wrong_line = result([("A", "m", 10)], ("Boom", [("A", "m", 11)]))
    assert compute_exception_distance(wrong_line, T1, 0.0) == 1.0
    assert compute_exception_distance(hit, T1, 0.5) == 1.0
    wrong_type = result([("A", "m", 10)], ("Other", [("A", "m", 10)]))
    assert compute_exception_distance(wrong_type, T1, 0.0) == 1.0


T2 = target([("B", "n", 4), ("A", "m", 10)], level=2)


def test_stack_distance_cases():
    exact = result(thrown=("Boom", [("B", "n", 4), ("A", "m", 10), ("TestHarness", "run", 1)]))
    assert compute_stack_distance(exact, T2, 0.0) == 0.0
    off = result(thrown=("Boom", [("B", "n", 4), ("A", "m", 11)]))
    assert compute_stack_distance(off, T2, 0.0) == pytest.approx(0.25)
    shallow = result(thrown=("Boom", [("B", "n", 4)]))
    assert compute_stack_distance(shallow, T2, 0.0) == pytest.approx(0.5)
    assert compute_stack_distance(exact, T2, 1.0) == 1.0


def test_breakdown_arithmetic():
    assert FitnessBreakdown(0, 1, 1).total == 3.0
    assert WORST.total == 6.0


BOX = """\
class Box {
    field Box inner;

    def int peek(int k) {
        if (k > 0) {
            return this.inner.size();
        }
        return 0;
    }

    def int size() {
        return 1;
    }

    def void fill() {
        this.inner = new Box();
    }

    def int boom() {
        return 1 / 0;
    }
}
"""


@pytest.fixture()
def box():
    prog = program_of(BOX)
    crash = parse_stack_trace("NullDereference\n\tat Box.peek(F0.sut:6)\n", 1, prog)
    return prog, CrashTarget.from_crash(crash, prog)


def test_reproducing_test_scores_zero(box):
    prog, t = box
    b = fitness(one_test("test r {\n    var b = new Box();\n    b.peek(1);\n}\n", prog), prog, t)
    assert b.total == 0.0


def test_absent_test_scores_six(box):
    prog, t = box
    assert fitness(None, prog, t).total == 6.0


def test_line_reached_wrong_exception():
    prog = program_of("""\
        class R {
            field R next;
            def int f(int k) {
                return this.next.g(10 / k);
            }
            def int g(int v) {
                return v;
            }
        }
        """)
    crash = parse_stack_trace("NullDereference\n\tat R.f(F0.sut:4)\n", 1, prog)
    t = CrashTarget.from_crash(crash, prog)
    b = fitness(one_test("test w {\n    var r = new R();\n    r.f(0);\n}\n", prog), prog, t)
    assert (b.d_l, b.d_e, b.d_s, b.total) == (0.0, 1.0, 1.0, 3.0)


def test_reaching_the_line_lowers_fitness(box):
    prog, t = box
    far = fitness(one_test("test a {\n    var b = new Box();\n    b.peek(0);\n}\n", prog), prog, t)
    near = fitness(one_test("test a {\n    var b = new Box();\n    b.fill();\n    b.peek(1);\n}\n", prog), prog, t)
    assert near.d_l == 0.0 and far.d_l > 0
    assert near.total < far.total


def test_evaluations_are_counted(box):
    prog, t = box
    f = FitnessFunction(prog, t)
    test = one_test("test a {\n    var b = new Box();\n    b.peek(1);\n}\n", prog)
    f(test)
    f(test)
    assert f.evaluations == 2


def test_target_line_must_be_real(box):
    prog, _ = box
    crash = parse_stack_trace("NullDereference\n\tat Box.peek(F0.sut:3)\n", 1, prog)
    with pytest.raises(InvalidTargetError):
        CrashTarget.from_crash(crash, prog)
