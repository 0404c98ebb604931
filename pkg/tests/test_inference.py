from __future__ import annotations

import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iggp.bundles import bundle, load_bundle
from iggp.errors import IterationCapExceeded, TermDepthExceeded
from iggp.gdl import Atom, Compound, make_program, parse_program, parse_prolog
from iggp.inference import Engine, FactSet, minimal_model, query

from oracles import naive_model, random_stratified_gdl

DATA = Path(__file__).parent / "data"


def A(text: str) -> Atom:
    (a,) = parse_prolog(text + ".").facts
    return a


def test_simple_rule():
    m = minimal_model(parse_program("(q a) (<= (p ?x) (q ?x))"))
    assert set(m) == {A("q(a)"), A("p(a)")}
    assert query(m, "p") == {A("p(a)")}


def test_rps_transition_model():
    p = parse_program(bundle("rock_paper_scissors").gdl)
    extra = [
        A("true(score(p1,0))"),
        A("true(score(p2,0))"),
        A("true(step(0))"),
        A("does(p1,stone)"),
        A("does(p2,paper)"),
    ]
    m = minimal_model(p, extra=extra)
    assert query(m, "next") == {A("next(score(p1,0))"), A("next(score(p2,1))"), A("next(step(1))")}
    assert A("wins(p2)") in m and A("loses(p1)") in m
    assert query(m, "draws") == set()


def test_fizz_buzz_next_hypothesis():
    h = parse_prolog((DATA / "fizz_buzz_next.pl").read_text())
    statics = [f for f in parse_program(bundle("fizz_buzz").gdl).facts if f.predicate not in ("init", "legal")]
    extra = [A("does_say(player,buzz)"), A("true_count(12)"), A("true_success(3)")] + statics
    m = minimal_model(h, extra=extra)
    assert A("next_count(13)") in m
    assert query(m, "next_success") == {A("next_success(3)")}
    assert query(m, "next_count") == {A("next_count(13)")}


def test_query_absent_predicate():
    m = FactSet([A("p(a)"), A("q(b)")])
    assert query(m, "p") == {A("p(a)")}
    assert query(m, "r") == set()


def test_distinct_is_syntactic():
    m = minimal_model(parse_program("(v a) (v b) (v (f a)) (<= (d ?x ?y) (v ?x) (v ?y) (distinct ?x ?y))"))
    assert len(query(m, "d")) == 6
    assert A("d(a,a)") not in m


def test_not_distinct():
    m = minimal_model(parse_program("(v a) (v b) (<= (same ?x ?y) (v ?x) (v ?y) (not (distinct ?x ?y)))"))
    assert query(m, "same") == {A("same(a,a)"), A("same(b,b)")}


def test_negation_uses_completed_lower_stratum():
    p = parse_program("(e a) (e b) (<= (r ?x) (e ?x) (not (s ?x))) (<= (s ?x) (t ?x)) (<= (t ?x) (e ?x) (distinct ?x a))")
    m = minimal_model(p)
    assert query(m, "r") == {A("r(a)")}


def test_recursion():
    p = parse_program("(edge 1 2) (edge 2 3) (edge 3 4) (<= (path ?x ?y) (edge ?x ?y)) (<= (path ?x ?z) (edge ?x ?y) (path ?y ?z))")
    assert len(query(minimal_model(p), "path")) == 6


def test_term_depth_cap():
    p = parse_program("(n z) (<= (n (s ?x)) (n ?x))")
    with pytest.raises(TermDepthExceeded):
        minimal_model(p)
    with pytest.raises(TermDepthExceeded):
        minimal_model(p, max_depth=3)


def test_derivation_cap():
    p = parse_program("(v 1) (v 2) (v 3) (v 4) (v 5) (<= (pair ?x ?y ?z) (v ?x) (v ?y) (v ?z))")
    with pytest.raises(IterationCapExceeded):
        minimal_model(p, max_derivations=50)
    assert len(query(minimal_model(p), "pair")) == 125


def test_extra_facts_do_not_leak_between_calls():
    p, _ = load_bundle("rock_paper_scissors")
    e = Engine(p)
    m1 = e.model([A("true(step(1))")])
    m2 = e.model([A("true(step(3))")])
    assert A("terminal") not in m1 and A("terminal") in m2
    assert A("terminal") not in e.model(())


def test_cached_engine_matches_fresh_engine():
    p, _ = load_bundle("buttons_and_lights")
    extra = [A("true(p)"), A("true(step(2))"), A("does(robot,b)")]
    combined = make_program(list(p.facts) + extra, p.rules)
    assert set(Engine(p).model(extra)) == set(minimal_model(combined))


def test_monotone_in_stratum_zero():
    p = parse_program("(e a b) (e b c) (<= (path ?x ?y) (e ?x ?y)) (<= (path ?x ?z) (e ?x ?y) (path ?y ?z))")
    before = query(minimal_model(p), "path")
    after = query(minimal_model(p, extra=[A("e(c,d)")]), "path")
    assert before <= after


def test_deterministic_output():
    p, _ = load_bundle("fizz_buzz")
    a = minimal_model(p, extra=[A("true(count(5))"), A("true(success(2))")])
    b = minimal_model(p, extra=[A("true(success(2))"), A("true(count(5))")])
    assert a == b


def test_agrees_with_naive_oracle_on_random_programs():
    for seed in range(120):
        p = parse_program(random_stratified_gdl(random.Random(seed)))
        assert set(minimal_model(p)) == naive_model(p), seed


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.lists(st.sampled_from(["a", "b", "c", "d"]), max_size=4))
def test_oracle_with_extra_facts(seed, extra_consts):
    p = parse_program(random_stratified_gdl(random.Random(seed)))
    preds = sorted({f.predicate for f in p.facts if f.arity == 1})
    extra = [Atom(preds[i % len(preds)], (c,)) for i, c in enumerate(extra_consts)] if preds else []
    assert set(minimal_model(p, extra=extra)) == naive_model(p, extra)


def test_model_is_closed_under_rules():
    p = parse_program(bundle("rock_paper_scissors").gdl)
    extra = [A("true(score(p1,1))"), A("true(score(p2,2))"), A("true(step(2))"), A("does(p1,paper)"), A("does(p2,paper)")]
    m = set(minimal_model(p, extra=extra))
    assert m == naive_model(p, extra)
    assert Atom("next", (Compound("score", ("p1", "1")),)) in m
