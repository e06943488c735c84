import logging

import pytest

from crashseed.analysis import (
    DYNAMIC,
    STATIC,
    CallSequence,
    carve_objects,
    clone_tests,
    collect_dynamic_sequences,
    collect_static_sequences,
    dump_sequences,
    load_sequences,
    method_sequences,
)
from crashseed.sutlang import execute_test
from crashseed.sutlang.testcase import Check, Construct, Invoke, TestCase

from conftest import program_of, suite_of

TARGET = """\
class T {
    field int x;

    def void m() {
        this.x = 1;
    }

    def void n() {
        this.x = 2;
    }

    def void p() {
        this.x = 3;
    }

    def void q() {
        this.x = 4;
    }
}
"""

USER = """\
class U {
    def void branch(T a, bool c) {
        a.m();
        if (c) {
            a.n();
        } else {
            a.p();
        }
    }

    def void loop(T a, bool c) {
        while (c) {
            a.m();
        }
    }

    def int helper(T a) {
        a.q();
        return 1;
    }

    def void outer(T a) {
        var b = this.helper(a);
        a.m();
    }
}
"""


@pytest.fixture()
def prog():
    return program_of(TARGET, USER)


def seqs_for(prog, method):
    cls = prog["U"]
    m = next(x for x in cls.methods if x.name == method)
    return {s.actions for s in method_sequences(prog, cls, m) if s.class_name == "T"}


def test_branches_give_two_sequences(prog):
    assert seqs_for(prog, "branch") == {("m", "n"), ("m", "p")}


def test_loop_taken_once(prog):
    assert seqs_for(prog, "loop") == {("m",)}


def test_intraprocedural_only(prog):
    assert seqs_for(prog, "outer") == {("m",)}
    assert seqs_for(prog, "helper") == {("q",)}


def test_all_classes_analysed(prog):
    static = collect_static_sequences(prog)
    assert {s.origin for seqs in static.values() for s in seqs} == {STATIC}
    assert CallSequence("T", ("m", "n"), STATIC) in static["T"]


def test_path_cap_warns(caplog):
    body = "\n".join(f"        if (c) {{\n            a.m();\n        }}" for _ in range(10))
    prog = program_of(TARGET, f"class W {{\n    def void many(T a, bool c) {{\n{body}\n    }}\n}}\n")
    cls = prog["W"]
    with caplog.at_level(logging.WARNING):
        seqs = method_sequences(prog, cls, cls.methods[0], max_paths=8)
    assert "path cap" in caplog.text
    assert seqs


def test_static_sequences_are_realizable():
    prog = program_of(TARGET, USER)
    t = suite_of(
        """\
        test drive {
            var u = new U();
            var a = new T();
            u.branch(a, false);
        }
        """,
        prog,
    )[0]
    r = execute_test(prog, t)
    oid = r.var_objects["a"]
    observed = tuple(a for o, _c, a in r.call_events if o == oid and not a.startswith("<init>"))
    assert observed in seqs_for(prog, "branch")


def test_dynamic_interprocedural():
    prog = program_of("""\
        class A {
            def void m() {
                this.n();
            }
            def void n() {
            }
        }
        """)
    tests = suite_of("test t {\n    var a = new A();\n    a.m();\n}\n", prog)
    dyn = collect_dynamic_sequences(prog, tests)
    assert dyn == {"A": {CallSequence("A", ("<init>/0", "m", "n"), DYNAMIC)}}


def test_dynamic_matches_event_log(prog):
    tests = suite_of(
        """\
        test t {
            var u = new U();
            var a = new T();
            u.branch(a, true);
            u.outer(a);
        }
        """,
        prog,
    )
    dyn = collect_dynamic_sequences(prog, tests)
    r = execute_test(prog, tests[0])
    expected = {CallSequence(c, tuple(acts), DYNAMIC) for c, acts in r.events_by_object().values()}
    assert set().union(*dyn.values()) == expected


def test_irrelevant_tests_are_not_executed(prog, monkeypatch):
    import crashseed.analysis.dynamic as dynamic

    tests = suite_of("test only_u {\n    var u = new U();\n}\n", prog)
    ran = []
    real = dynamic.execute_test
    monkeypatch.setattr(dynamic, "execute_test", lambda *a, **k: ran.append(1) or real(*a, **k))
    assert collect_dynamic_sequences(prog, tests, {"Z"}) == {}
    assert ran == []


def test_empty_test_list(prog):
    assert collect_dynamic_sequences(prog, []) == {}


def test_adding_a_test_keeps_sequences(prog):
    tests = suite_of(
        """\
        test a {
            var t = new T();
            t.m();
        }
        test b {
            var t = new T();
            t.p();
            t.q();
        }
        """,
        prog,
    )
    small = collect_dynamic_sequences(prog, tests[:1])
    big = collect_dynamic_sequences(prog, tests)
    assert small["T"] <= big["T"]


LIST = """\
class Node {
    field int v;

    init(int v) {
        this.v = v;
    }
}

class Bag {
    field int n;
    field Node last;

    init() {
        this.n = 0;
    }

    def void add(int x) {
        this.n = this.n + 1;
    }

    def void put(Node k) {
        this.last = k;
    }

    def int size() {
        return this.n;
    }
}
"""


def test_carve_new_add_add():
    prog = program_of(LIST)
    tests = suite_of(
        """\
        test fill {
            var b = new Bag();
            b.add(1);
            b.add(2);
            assert b.size() == 2;
        }
        """,
        prog,
    )
    frags = carve_objects(prog, tests, ["Bag"])
    assert len(frags) == 1
    assert [type(s).__name__ for s in frags[0].statements[:3]] == ["Construct", "Invoke", "Invoke"]
    assert [s.method for s in frags[0].statements[1:3]] == ["add", "add"]


def test_carve_object_argument_recursively():
    prog = program_of(LIST)
    tests = suite_of("test t {\n    var b = new Bag();\n    b.put(new Node(5));\n}\n", prog)
    frags = carve_objects(prog, tests, ["Bag"])
    assert frags
    frag = frags[0]
    assert any(isinstance(s, Construct) and s.class_name == "Node" for s in frag.statements)
    assert execute_test(prog, frag.as_test()).thrown is None


def test_carving_without_target_objects():
    prog = program_of(LIST)
    tests = suite_of("test t {\n    var n = new Node(1);\n}\n", prog)
    assert carve_objects(prog, tests, ["Bag"]) == []


def test_clone_strips_assertions():
    prog = program_of(LIST)
    tests = suite_of("test t {\n    var b = new Bag();\n    b.add(1);\n    assert b.size() == 1;\n}\n", prog)
    clones = clone_tests(prog, tests, "Bag")
    assert len(clones) == 1
    assert not any(isinstance(s, Check) for s in clones[0].statements)


def test_clone_detects_internal_use():
    prog = program_of(LIST, """\
        class Wrapper {
            def int fill() {
                var b = new Bag();
                b.add(3);
                return b.size();
            }
        }
        """)
    tests = suite_of("test t {\n    var w = new Wrapper();\n    w.fill();\n}\n", prog)
    assert len(clone_tests(prog, tests, "Bag")) == 1


def test_clone_unavailable_warning(caplog):
    prog = program_of("""\
        class Loop {
            def void spin() {
                while (true) {
                }
            }
        }
        """)
    tests = suite_of("test t {\n    var l = new Loop();\n    l.spin();\n}\n", prog)
    with caplog.at_level(logging.WARNING):
        assert clone_tests(prog, tests, "Loop", step_limit=200) == []
    assert "test seeding unavailable" in caplog.text


def test_sequence_dump_round_trip(prog):
    static = collect_static_sequences(prog)
    text = dump_sequences(static)
    assert load_sequences(text) == static
    assert all(len(line.split("\t")) == 3 for line in text.splitlines())


def test_sequences_are_non_empty():
    with pytest.raises(ValueError):
        CallSequence("T", ())
