from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iggp.baselines import (
    InertiaPredictor,
    KNNPredictor,
    MeanPredictor,
    bit_distance,
    distance,
    make_predictor,
    predict_inertia,
    predict_true,
)
from iggp.errors import PredictorError
from iggp.extract import Triple
from iggp.gdl import Atom, parse_prolog

from oracles import naive_knn


def A(text: str) -> Atom:
    (a,) = parse_prolog(text + ".").facts
    return a


def atoms(*texts) -> frozenset:
    return frozenset(A(t) for t in texts)


def T(bk, pos, neg=(), target="p") -> Triple:
    return Triple(atoms(*bk), atoms(*pos), atoms(*neg), target)


def test_true_always():
    assert predict_true(atoms("q(a)"), A("p(a)"))
    assert predict_true(frozenset(), A("terminal"))
    assert predict_true(atoms("true_step(2)"), A("next_step(3)"))


def test_inertia():
    assert predict_inertia(atoms("true_at(1,4,x)"), A("next_at(1,4,x)"))
    assert not predict_inertia(atoms("true_at(1,4,o)"), A("next_at(1,4,x)"))
    assert predict_inertia(frozenset(), A("goal(player,50)"))
    assert predict_inertia(frozenset(), A("legal_say(player,9)"))
    assert predict_inertia(atoms("true_p"), Atom("next_p"))


@given(st.frozensets(st.sampled_from(["a", "b", "c"])), st.sampled_from(["goal", "legal_x", "terminal", "role"]))
def test_inertia_equals_true_off_next(bk_consts, pred):
    bk = frozenset(Atom("true_q", (c,)) for c in bk_consts)
    a = Atom(pred, ("a",))
    assert predict_inertia(bk, a) == predict_true(bk, a)


def test_mean():
    train = [T([], ["p(a)"]), T([], ["p(a)"]), T([], ["p(b)"])]
    m = MeanPredictor().fit(train)
    assert m.predict(frozenset(), A("p(a)"))
    assert not m.predict(frozenset(), A("p(b)"))
    half = MeanPredictor().fit([T([], ["p(a)"]), T([], ["p(a)"]), T([], []), T([], [])])
    assert half.predict(frozenset(), A("p(a)"))


def test_mean_needs_training():
    with pytest.raises(PredictorError):
        MeanPredictor().fit([])
    with pytest.raises(PredictorError):
        MeanPredictor().predict(frozenset(), A("p(a)"))


def test_distance_examples():
    assert distance(atoms("q(a)"), atoms("q(a)")) == 0
    assert distance(atoms("q(a)"), atoms("q(b)")) == 2
    assert distance(atoms("p", "q"), atoms("q", "r")) == 2


def test_knn_propositional_limitation():
    train = [T(["q(a)"], ["p(a)"], ["p(b)", "p(c)"]), T(["q(b)"], ["p(b)"], ["p(a)", "p(c)"])]
    knn = KNNPredictor(1).fit(train)
    assert knn.predict(atoms("q(c)"), A("p(c)")) is False


def test_knn1_exact_match():
    train = [T(["q(a)"], ["p(a)"]), T(["q(b)"], ["p(b)"]), T(["q(c)", "q(d)"], ["p(c)"])]
    knn = KNNPredictor(1).fit(train)
    for t in train:
        for a in ["p(a)", "p(b)", "p(c)"]:
            assert knn.predict(t.bk, A(a)) == (A(a) in t.pos)


def test_knn2_half_vote_is_enough():
    train = [T(["q(a)"], ["p(a)"]), T(["q(a)", "q(b)"], []), T(["q(z)", "q(y)", "q(x)"], ["p(a)"])]
    knn = KNNPredictor(2).fit(train)
    assert knn.neighbours(atoms("q(a)")) == [0, 1]
    assert knn.predict(atoms("q(a)"), A("p(a)"))


def test_knn_ties_go_to_lower_index():
    train = [T(["q(a)"], []), T(["q(b)"], ["p(a)"])]
    knn = KNNPredictor(1).fit(train)
    assert knn.neighbours(atoms("q(c)")) == [0]
    assert not knn.predict(atoms("q(c)"), A("p(a)"))


def test_knn_errors():
    with pytest.raises(PredictorError):
        KNNPredictor(3).fit([T([], [])] * 2)
    with pytest.raises(PredictorError):
        KNNPredictor(0)
    with pytest.raises(PredictorError):
        KNNPredictor(1).predict(frozenset(), A("p(a)"))


def test_make_predictor():
    assert make_predictor("knn5").k == 5
    assert make_predictor("knn", 3).k == 3
    assert isinstance(make_predictor("inertia"), InertiaPredictor)
    with pytest.raises(PredictorError):
        make_predictor("oracle")


_sets = st.frozensets(st.integers(0, 40), max_size=25)


@settings(max_examples=500, deadline=None)
@given(_sets, _sets, _sets)
def test_metric_axioms(a, b, c):
    assert distance(a, b) >= 0
    assert distance(a, b) == distance(b, a)
    assert (distance(a, b) == 0) == (a == b)
    assert distance(a, c) <= distance(a, b) + distance(b, c)


@given(_sets, _sets)
def test_bitset_distance_matches_sets(a, b):
    code = lambda s: sum(1 << i for i in s)  # noqa: E731
    assert bit_distance(code(a), code(b)) == distance(a, b)


def _random_task(rng: random.Random, n: int):
    pool = [Atom("q", (str(i),)) for i in range(8)]
    targets = [Atom("p", (str(i),)) for i in range(4)]
    train = []
    for _ in range(n):
        bk = frozenset(x for x in pool if rng.random() < 0.4)
        pos = frozenset(x for x in targets if rng.random() < 0.5)
        train.append(Triple(bk, pos, frozenset(targets) - pos, "p"))
    return train, pool, targets


def test_knn_matches_naive_oracle():
    rng = random.Random(2024)
    for _ in range(60):
        train, pool, targets = _random_task(rng, rng.randint(1, 50))
        k = rng.randint(1, min(7, len(train)))
        knn = KNNPredictor(k).fit(train)
        for _ in range(5):
            bk = frozenset(x for x in pool if rng.random() < 0.4) | {Atom("unseen", ("z",))}
            for a in targets:
                assert knn.predict(bk, a) == naive_knn(train, bk, a, k)
