import itertools
import logging
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crashseed.behmodel import AbstractObjectBehavior, infer_model
from crashseed.seeding import (
    STRING_POOL,
    ObjectPool,
    SeedingConfig,
    build_object_pool,
    concretize,
    greedy_select,
    jaccard_distance,
    select_behaviors,
)
from crashseed.sutlang import execute_test, parse_stack_trace
from crashseed.sutlang.testcase import Construct, Invoke

from conftest import program_of

B = AbstractObjectBehavior


def beh(*actions, cls="C"):
    return B(cls, tuple(actions))


def test_jaccard_worked_values():
    assert jaccard_distance(beh("m", "n"), beh("m", "n")) == 0.0
    assert jaccard_distance(beh("m"), beh("n")) == 1.0
    assert jaccard_distance(beh("a", "b"), beh("b", "c")) == pytest.approx(2 / 3, abs=1e-15)


def test_jaccard_ignores_order_and_multiplicity():
    assert jaccard_distance(beh("a", "b", "a"), beh("b", "a")) == 0.0


behaviors = st.lists(st.sampled_from("abcdef"), min_size=1, max_size=6).map(lambda xs: beh(*xs))


@settings(max_examples=300, deadline=None)
@given(behaviors, behaviors, behaviors)
def test_jaccard_is_pseudometric(x, y, z):
    d = jaccard_distance
    assert d(x, x) == 0.0
    assert d(x, y) == d(y, x)
    assert 0.0 <= d(x, y) <= 1.0
    assert d(x, z) <= d(x, y) + d(y, z) + 1e-12


def test_exhausting_small_model():
    m = infer_model("C", [("a",), ("b",)])
    out = select_behaviors(m, 5, 20, random.Random(0))
    assert sorted(b.actions for b in out) == [("a",), ("b",)]


def _min_pairwise(sel):
    return min(jaccard_distance(x, y) for x, y in itertools.combinations(sel, 2))


def test_disjoint_candidate_selected():
    cands = [beh("a"), beh("a", "b"), beh("c")]
    best = max(itertools.combinations(cands, 2), key=_min_pairwise)
    assert beh("c") in best
    assert beh("c") in greedy_select(cands, 2)


def test_k1_is_longest():
    cands = [beh("b"), beh("x", "y"), beh("a", "z"), beh("q")]
    assert greedy_select(cands, 1) == [beh("a", "z")]


def test_empty_model_selection(caplog):
    with caplog.at_level(logging.WARNING):
        assert select_behaviors(infer_model("C", []), 3) == []


def test_greedy_beats_random_subsets():
    rng = random.Random(11)
    wins = 0
    trials = 1000
    for _ in range(trials):
        cands = [beh(*rng.sample("abcdefgh", rng.randint(1, 4))) for _ in range(12)]
        distinct = list({c.actions: c for c in cands}.values())
        k = min(4, len(distinct))
        if k < 2:
            wins += 1
            continue
        chosen = greedy_select(cands, k)
        rand = rng.sample(distinct, k)
        wins += _min_pairwise(chosen) >= _min_pairwise(rand)
    assert wins >= 0.95 * trials


LIST = """\
class Node {
    field int v;

    init(int v) {
        this.v = v;
    }
}

class LinkedList {
    field int n;
    field Node head;

    init() {
        this.n = 0;
    }

    init(int n) {
        this.n = n;
    }

    def void add(int x) {
        this.n = this.n + 1;
    }

    def void link(Node k) {
        this.head = k;
    }

    def void flag(bool b, string s) {
        this.n = this.n;
    }
}
"""


@pytest.fixture()
def lst():
    return program_of(LIST)


def test_concretize_add_add(lst):
    frag = concretize(beh("add", "add", cls="LinkedList"), lst, random.Random(1))
    kinds = [type(s).__name__ for s in frag.statements]
    assert kinds == ["Construct", "Invoke", "Invoke"]
    assert all(-100 <= s.args[0].value <= 100 for s in frag.statements[1:])
    assert frag.provenance == "model"


def test_concretize_constructor_only(lst):
    frag = concretize(beh("<init>/1", cls="LinkedList"), lst, random.Random(2))
    assert len(frag.statements) == 1
    assert isinstance(frag.statements[0], Construct) and len(frag.statements[0].args) == 1


def test_concretize_object_argument(lst):
    rng = random.Random(5)
    for _ in range(20):
        frag = concretize(beh("link", cls="LinkedList"), lst, rng)
        nested = [s for s in frag.statements if isinstance(s, Construct) and s.class_name == "Node"]
        link = [s for s in frag.statements if isinstance(s, Invoke) and s.method == "link"][0]
        if nested:
            assert link.args[0].name == nested[0].var
            break
    else:
        pytest.fail("no nested construction generated")
    assert execute_test(lst, frag.as_test()).thrown is None


def test_literal_domains(lst):
    rng = random.Random(9)
    for _ in range(50):
        frag = concretize(beh("flag", cls="LinkedList"), lst, rng)
        b, s = frag.statements[-1].args
        assert isinstance(b.value, bool)
        assert s.value in STRING_POOL
    assert len(STRING_POOL) == 16


def test_concretize_gives_up_after_failures():
    p = program_of("""\
        class Bad {
            def void boom(int x) {
                throw Nope("always");
            }
        }
        """)
    assert concretize(beh("boom", cls="Bad"), p, random.Random(0)) is None


def test_pool_keys_cover_internal_classes():
    p = program_of("""\
        class C {
            def void m() {
            }
        }
        class D {
            def void n() {
            }
        }
        """)
    models = {"C": infer_model("C", [("m",)]), "D": infer_model("D", [("n",)])}
    crash = parse_stack_trace("E\n\tat C.m(F0.sut:2)\n", 1, p)
    pool = build_object_pool(models, crash, p, SeedingConfig(), random.Random(0), k=3)
    assert pool.classes() == ["C", "D"]


def test_library_class_only_when_in_trace():
    p = program_of("""\
        library class Ext {
            def void x() {
            }
        }
        library class Other {
            def void y() {
            }
        }
        class App {
            def void run(Ext e) {
                e.x();
            }
        }
        """)
    models = {c: infer_model(c, [(a,)]) for c, a in (("Ext", "x"), ("Other", "y"), ("App", "run"))}
    crash = parse_stack_trace("E\n\tat Ext.x(F0.sut:2)\n\tat App.run(F0.sut:11)\n", 2, p)
    pool = build_object_pool(models, crash, p, SeedingConfig(), random.Random(0), k=2)
    assert pool.classes() == ["App", "Ext"]


def test_no_models_warns(lst, caplog):
    crash = parse_stack_trace("E\n\tat LinkedList.add(F0.sut:22)\n", 1, lst)
    with caplog.at_level(logging.WARNING):
        pool = build_object_pool({}, crash, lst, SeedingConfig(), random.Random(0))
    assert pool.size() == 0 and "no models" in caplog.text


def test_pool_fragments_replay(scenarios):
    b = scenarios["test_proximity"]
    from crashseed.search import build_models

    pool = build_object_pool(build_models(b.program, b.tests), b.crash, b.program, SeedingConfig(), random.Random(4), k=20)
    assert pool.size() > 0
    for cname in pool.classes():
        for frag in pool.entries[cname]:
            assert execute_test(b.program, frag.as_test()).thrown is None


def test_config_validation():
    with pytest.raises(ValueError):
        SeedingConfig(pick_init=1.5)
    with pytest.raises(ValueError):
        SeedingConfig(behaviors_per_model=0)
    assert (SeedingConfig().pick_mut, SeedingConfig().concretizations, SeedingConfig().candidate_multiplier) == (0.3, 1, 10)


def test_pool_sampling_counts_draws():
    pool = ObjectPool()
    assert not pool.has("X")
    pool.entries["X"] = ["f"]
    assert pool.sample("X", random.Random(0)) == "f" and pool.draws == 1
