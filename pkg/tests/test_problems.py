import pytest
from hypothesis import given
from hypothesis import strategies as st

from diversity_ea.bitstring import BitString
from diversity_ea.oracles import brute_objectives
from diversity_ea.problems import (
    ProblemId,
    ProblemParams,
    Relation,
    dominates,
    evaluate,
    is_success,
    jump_eval,
    ojzj_eval,
    pareto_front,
    pareto_optimal_ones,
    strictly_dominates,
    weakly_dominates,
)

P20 = ProblemParams(20, 5)


def test_jump_examples():
    assert jump_eval(BitString.ones(20), P20) == (25,)
    assert jump_eval(BitString.with_ones(20, 15), P20) == (20,)
    assert jump_eval(BitString.with_ones(20, 18), P20) == (2,)


def test_ojzj_examples():
    assert ojzj_eval(BitString.with_ones(20, 15), P20) == (20, 10)
    assert ojzj_eval(BitString.ones(20), P20) == (25, 5)
    assert ojzj_eval(BitString.with_ones(20, 10), P20) == (15, 15)


def test_parameter_validation():
    ProblemParams(10, 4).validate("jump")
    ProblemParams(10, 4).validate("ojzj")
    with pytest.raises(ValueError):
        ProblemParams(10, 5).validate("ojzj")
    with pytest.raises(ValueError):
        ProblemParams(10, 1).validate("jump")
    with pytest.raises(ValueError):
        ProblemParams(4, 4).validate("jump")


@given(st.integers(3, 40).flatmap(lambda n: st.tuples(st.just(n), st.integers(2, n - 1), st.integers(0, 2**n - 1))))
def test_evaluate_matches_reference(case):
    n, k, value = case
    x = BitString(value, n)
    p = ProblemParams(n, k)
    assert evaluate("jump", x, p) == brute_objectives("jump", n, k, value)
    f = evaluate("jump", x, p)[0]
    assert 1 <= f <= n + k
    if 2 * k < n:
        f1, f2 = evaluate("ojzj", x, p)
        assert (f1, f2) == brute_objectives("ojzj", n, k, value)
        assert (f1, f2) == (jump_eval(x, p)[0], jump_eval(x.complement(), p)[0])


def test_dominates_examples():
    assert dominates((20, 10), (15, 15)) is Relation.INCOMPARABLE
    assert dominates((20, 10), (20, 10)) is Relation.EQUAL
    assert dominates((20, 10), (19, 9)) is Relation.DOMINATES
    assert dominates((19, 9), (20, 10)) is Relation.DOMINATED
    assert dominates((20, 10), (20, 9)) is Relation.DOMINATES
    with pytest.raises(ValueError):
        dominates((1,), (1, 2))


vectors = st.tuples(st.integers(0, 9), st.integers(0, 9))


@given(vectors, vectors, vectors)
def test_domination_order_properties(u, v, w):
    assert weakly_dominates(u, u)
    assert not strictly_dominates(u, u)
    if strictly_dominates(u, v):
        assert not strictly_dominates(v, u)
        assert dominates(u, v) is Relation.DOMINATES
    if weakly_dominates(u, v) and weakly_dominates(v, w):
        assert weakly_dominates(u, w)
    if weakly_dominates(u, v) and weakly_dominates(v, u):
        assert u == v


def test_pareto_front_examples():
    front = pareto_front(P20)
    assert len(front) == 13
    assert (25, 5) in front and (5, 25) in front
    assert all(a + b == 20 + 10 for a, b in front)


def test_pareto_optimal_ones_map_onto_front():
    for n, k in [(10, 2), (13, 4), (30, 4)]:
        p = ProblemParams(n, k)
        vecs = {ojzj_eval(BitString.with_ones(n, c), p) for c in pareto_optimal_ones(p)}
        assert vecs == pareto_front(p)


def test_is_success_examples():
    p = ProblemParams(10, 2)
    assert is_success(ProblemId.JUMP, [BitString.zeros(10), BitString.ones(10)], p)
    assert not is_success("ojzj", [BitString.zeros(10)] * 5, p)
    pop = [BitString.with_ones(10, c) for c in (0, 2, 3, 4, 5, 6, 7, 8, 10)]
    assert is_success("ojzj", pop, p)
    assert not is_success("ojzj", pop[:-1], p)
