import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crashseed.analysis import CallSequence
from crashseed.behmodel import (
    INITIAL,
    EmptyModelError,
    TransitionSystem,
    accepts,
    has_cycle,
    infer_model,
    model_stats,
    random_path,
)

ITERATOR = [("hasNext", "next"), ("hasNext", "next", "hasNext", "next")]

actions = st.sampled_from(["a", "b", "c", "d", "e"])
corpora = st.lists(st.lists(actions, min_size=1, max_size=8).map(tuple), min_size=1, max_size=10)


def test_iterator_model_has_cycle():
    m = infer_model("It", ITERATOR)
    assert ("next", "hasNext", "hasNext") in m.transitions
    assert has_cycle(m)
    assert accepts(m, ("hasNext", "next") * 3)


def test_iterator_model_stats():
    # s0, hasNext, next; s0-hasNext, hasNext-next, next-hasNext
    assert model_stats(infer_model("It", ITERATOR)) == (3, 3, 2)


def test_single_action_model():
    m = infer_model("C", [("m",)])
    assert m.states == {INITIAL, "m"}
    assert len(m.transitions) == 1
    assert m.terminals == {"m"}


def test_branching_state():
    m = infer_model("C", [("a", "b"), ("a", "c")])
    assert m.outgoing("a") == [("b", "b"), ("c", "c")]


def test_empty_model(caplog):
    m = infer_model("C", [])
    assert m.is_empty and m.states == {INITIAL}
    assert model_stats(m) == (1, 0, 0)
    assert "empty model" in caplog.text


def test_chain_stats():
    assert model_stats(infer_model("C", [("x", "y", "z")])) == (4, 3, 3)


def test_accepts():
    m = infer_model("C", [("a", "b")])
    assert not accepts(m, ("b",))
    assert accepts(m, ())
    assert not accepts(m, ("a", "zzz"))


def test_sequences_of_other_classes_rejected():
    with pytest.raises(ValueError):
        infer_model("C", [CallSequence("D", ("m",))])


def test_single_transition_path():
    m = infer_model("C", [("m",)])
    rng = random.Random(0)
    assert {random_path(m, 20, rng).actions for _ in range(50)} == {("m",)}


def test_iterator_walks_alternate():
    m = infer_model("It", ITERATOR)
    rng = random.Random(3)
    for _ in range(300):
        path = random_path(m, 6, rng).actions
        assert len(path) <= 6
        assert all(a == ("hasNext" if i % 2 == 0 else "next") for i, a in enumerate(path))


def test_path_bounds():
    m = infer_model("C", [("m",)])
    with pytest.raises(ValueError):
        random_path(m, 0)
    with pytest.raises(EmptyModelError, match="empty model"):
        random_path(infer_model("C", []), 5)


@settings(max_examples=200, deadline=None)
@given(corpora, st.randoms(use_true_random=False))
def test_training_inclusion_and_order_independence(corpus, rnd):
    m = infer_model("C", corpus)
    assert all(accepts(m, s) for s in corpus)
    shuffled = list(corpus)
    rnd.shuffle(shuffled)
    assert infer_model("C", shuffled).to_text() == m.to_text()


@settings(max_examples=200, deadline=None)
@given(corpora)
def test_model_invariants(corpus):
    m = infer_model("C", corpus)
    keys = [(src, a) for src, a, _d in m.transitions]
    assert len(keys) == len(set(keys))  # deterministic
    assert all(dst == a for _s, a, dst in m.transitions)
    assert m.terminals <= m.states
    st_ = model_stats(m)
    assert st_.bfs_height <= st_.states
    assert TransitionSystem.from_text(m.to_text()) == m


@settings(max_examples=150, deadline=None)
@given(corpora)
def test_cross_spliced_sequences_accepted(corpus):
    m = infer_model("C", corpus)
    for s1, s2 in itertools.product(corpus, repeat=2):
        for i, a in enumerate(s1):
            for j, b in enumerate(s2):
                if a == b:
                    assert accepts(m, s1[: i + 1] + s2[j + 1:])


@settings(max_examples=100, deadline=None)
@given(corpora, st.integers(min_value=1, max_value=12), st.integers(0, 2**16))
def test_random_paths_are_accepted(corpus, max_len, seed):
    m = infer_model("C", corpus)
    rng = random.Random(seed)
    for _ in range(10):
        p = random_path(m, max_len, rng)
        assert 1 <= len(p) <= max_len
        assert accepts(m, p.actions)
