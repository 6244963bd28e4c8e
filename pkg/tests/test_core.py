import random

import pytest

from m2vpi import (
    EMPTY_SUMMARY,
    Ext,
    Graph,
    NEG_INF,
    NegativeUnitGain,
    POS_INF,
    ParseError,
    WalkSummary,
    compose,
    cycle_bound,
    evaluate_solution,
    format_instance,
    parse_instance,
    propagate,
)
from m2vpi.core import Feasible, Q, Violated, format_rational, parse_rational, phi
from m2vpi.oracle import propagate_oracle

from helpers import instance_a, rand_gain, rand_rational, rand_system


def test_ext_ordering_and_arithmetic():
    assert NEG_INF < Ext(-100) < Ext(Q(1, 3)) < Ext(1) < POS_INF
    assert Ext(Q(1, 2)) + Ext(Q(1, 3)) == Ext(Q(5, 6))
    assert Ext(2) * Ext(Q(3, 4)) == Ext(Q(3, 2))
    assert POS_INF + Ext(5) == POS_INF
    assert Ext(5) - POS_INF == NEG_INF
    assert -POS_INF == NEG_INF
    assert POS_INF * Ext(-2) == NEG_INF
    assert NEG_INF / Ext(Q(-1, 2)) == POS_INF


def test_ext_indeterminate_forms_raise():
    with pytest.raises(ArithmeticError):
        POS_INF - POS_INF
    with pytest.raises(ArithmeticError):
        POS_INF + NEG_INF
    with pytest.raises(ArithmeticError):
        POS_INF * Ext(0)
    with pytest.raises(ArithmeticError):
        Ext(1) / POS_INF
    with pytest.raises(ZeroDivisionError):
        POS_INF / Ext(0)


def test_ext_finite_accessor():
    assert Ext(Q(7, 3)).finite() == Q(7, 3)
    with pytest.raises(ArithmeticError):
        POS_INF.finite()


def test_compose_identity_and_pair():
    s = WalkSummary(Q(3), Q(1, 7), 2)
    assert compose(EMPTY_SUMMARY, s) == s
    assert compose(s, EMPTY_SUMMARY) == s
    half = WalkSummary(Q(1), Q(1, 2), 1)
    assert compose(half, half) == WalkSummary(Q(3, 2), Q(1, 4), 2)


def test_compose_associative():
    rng = random.Random(20)
    for _ in range(100):
        a, b, c = (
            WalkSummary(rand_rational(rng), rand_gain(rng), rng.randint(0, 3))
            for _ in range(3)
        )
        assert compose(compose(a, b), c) == compose(a, compose(b, c))


def test_cycle_bound_values():
    assert cycle_bound(WalkSummary(Q(4), Q(1, 2), 1)) == Ext(8)
    assert cycle_bound(WalkSummary(Q(3, 2), Q(1, 4), 2)) == Ext(2)
    # gain > 1 closed walks still evaluate to cost/(1-gain), here a lower bound
    assert cycle_bound(WalkSummary(Q(-1), Q(2), 1)) == Ext(1)
    assert cycle_bound(WalkSummary(Q(3), Q(1), 2)) == POS_INF


def test_cycle_bound_negative_unit_gain_raises():
    with pytest.raises(NegativeUnitGain):
        cycle_bound(WalkSummary(Q(-1), Q(1), 2))
    with pytest.raises(ValueError):
        cycle_bound(EMPTY_SUMMARY)


def test_walk_construction_checks_continuity():
    g = instance_a()
    w = g.walk([0, 1])
    assert w.summary == WalkSummary(Q(3, 2), Q(1, 4), 2)
    assert w.is_closed
    with pytest.raises(ValueError):
        g.walk([0, 0])
    # empty walk needs an explicit start vertex
    w0 = g.walk([], start=1)
    assert w0.summary == EMPTY_SUMMARY
    with pytest.raises(ValueError):
        g.walk([])


def test_graph_rejects_bad_edges():
    with pytest.raises(ValueError):
        Graph.build(2, [(0, 2, 1, 1)])
    with pytest.raises(ValueError):
        Graph.build(1, [(0, 0, 1, 0)])
    with pytest.raises(ValueError):
        Graph.build(2, [(0, 1, 1, 1)], dmdp=True)


def test_propagate_zero_steps_is_identity():
    g = instance_a()
    bounds = [POS_INF, Ext(2)]
    assert propagate(g, bounds, 0) == bounds


def test_propagate_instance_a_one_step():
    g = instance_a()
    out = propagate(g, [POS_INF, Ext(2)], 1)
    assert out == [Ext(2), Ext(2)]


def test_propagate_matches_walk_enumeration():
    rng = random.Random(21)
    for _ in range(60):
        g = rand_system(rng, n_max=5)
        k = rng.randint(0, 4)
        bounds = [
            POS_INF if rng.random() < 0.3 else Ext(rand_rational(rng))
            for _ in range(g.n)
        ]
        assert propagate(g, bounds, k) == propagate_oracle(g, bounds, k)


def test_evaluate_solution_pins():
    g = instance_a()
    assert evaluate_solution(g, [Ext(2), Ext(2)]) == Feasible()
    assert evaluate_solution(g, [Ext(3), Ext(2)]) == Violated(0)
    loop = Graph.build(1, [(0, 0, 4, Q(1, 2))])
    assert evaluate_solution(loop, [Ext(8)]) == Feasible()
    with pytest.raises(ValueError):
        evaluate_solution(g, [POS_INF, Ext(0)])


def test_reverse_instance_walk_algebra():
    rng = random.Random(22)
    for _ in range(40):
        g = rand_system(rng, n_max=5)
        gr = g.reverse()
        # pick any walk in g and check the reversed summary relation
        ids = []
        at = rng.randrange(g.n)
        for _ in range(rng.randint(1, 4)):
            outs = g.out_edges[at]
            if not outs:
                break
            eid = rng.choice(outs)
            ids.append(eid)
            at = g.edges[eid].v
        if not ids:
            continue
        s = g.summary_of(ids)
        sr = gr.summary_of(list(reversed(ids)))
        assert sr.gain == 1 / s.gain
        assert sr.cost == s.cost / s.gain


def test_rational_parse_format_round_trip():
    assert parse_rational("3/4") == Q(3, 4)
    assert parse_rational("-7") == Q(-7)
    assert format_rational(Q(3, 4)) == "3/4"
    assert format_rational(Q(5, 1)) == "5"
    for tok in ("a/b", "", "1/2/3"):
        with pytest.raises(ValueError):
            parse_rational(tok)
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_rational("1/0")


def test_parse_format_instance_round_trip():
    rng = random.Random(23)
    for _ in range(25):
        g = rand_system(rng, n_max=6)
        h = parse_instance(format_instance(g))
        assert h.n == g.n and h.m == g.m
        assert all(
            (a.u, a.v, a.cost, a.gain) == (b.u, b.v, b.cost, b.gain)
            for a, b in zip(g.edges, h.edges)
        )


def test_parse_instance_errors_carry_line_numbers():
    with pytest.raises(ParseError) as ei:
        parse_instance("m2vpi 2 1\n1 2 nope 1/2\n")
    assert ei.value.line_no == 2
    with pytest.raises(ParseError) as ei:
        parse_instance("m2vpi 2 2\n1 2 0 1/2\n")
    assert "declares m=2" in str(ei.value)
    with pytest.raises(ParseError) as ei:
        parse_instance("m2vpi 2 1\n# comment\n1 2 1/0 1/2\n")
    assert ei.value.line_no == 3
    with pytest.raises(ParseError):
        parse_instance("dmdp 1 1\n1 1 0 3/2\n")


def test_phi_helper_matches_cycle_bound():
    s = WalkSummary(Q(4), Q(1, 2), 1)
    assert Ext(phi(s)) == cycle_bound(s)
