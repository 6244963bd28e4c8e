import random

import pytest

from m2vpi import (
    Ext,
    Graph,
    locate_cycle,
    locate_global,
    locate_value,
    verify_certificate,
)
from m2vpi.core import Q
from m2vpi.oracle import closed_walk_profile, shostak_enumerate

from helpers import instance_a, rand_system


def test_locate_cycle_below_and_equal():
    g = Graph.build(1, [(0, 0, 4, Q(1, 2))])
    out = locate_cycle(g, 0, 1, Q(10))
    assert out.tag == "below"
    assert out.witness_phi() == 8
    out = locate_cycle(g, 0, 1, Q(8))
    assert out.tag == "equal"
    assert out.gain < 1 and out.y == 8


def test_locate_cycle_above_and_between():
    g = Graph.build(1, [(0, 0, -1, 2)])
    out = locate_cycle(g, 0, 1, Q(0))
    assert out.tag == "above"
    assert out.witness_phi() == 1  # a lower bound beyond the threshold
    g2 = Graph.build(1, [(0, 0, 5, Q(1, 2))])
    out = locate_cycle(g2, 0, 1, Q(2))
    assert out.tag == "between"
    assert out.gain == 1 and out.y == Q(2)


def test_locate_cycle_negative_unit_gain():
    g = Graph.build(2, [(0, 1, -1, 1), (1, 0, 0, 1)])
    out = locate_cycle(g, 0, 2, Q(100))
    assert out.tag == "neg_unit"
    assert out.gain == 1 and out.witness_cost < 0


def test_locate_cycle_materialize():
    g = instance_a()
    out = locate_cycle(g, 0, 2, Q(10))
    assert out.tag == "below"
    w = out.materialize(g)
    assert w.edge_ids == (0, 1)


def test_locate_cycle_classification_matches_profile():
    rng = random.Random(60)
    for _ in range(200):
        g = rand_system(rng, n_max=5)
        v = rng.randrange(g.n)
        k = rng.randint(1, 4)
        xi = Q(rng.randint(-8, 8), rng.randint(1, 4))
        out = locate_cycle(g, v, k, xi)
        prof = closed_walk_profile(g, v, k)
        if out.tag == "below":
            assert prof.upper < Ext(xi)
        elif out.tag == "equal":
            assert prof.upper == Ext(xi)
        elif out.tag == "above":
            assert prof.lower > Ext(xi)
        elif out.tag == "neg_unit":
            assert prof.neg_unit is not None
        else:
            assert out.tag == "between"
            assert prof.upper > Ext(xi)
            assert prof.lower <= Ext(xi)


def test_locate_global_instance_a():
    g = instance_a()
    res = locate_global(g, [Q(3), Q(3)])
    assert res.kind == "violation"
    assert res.witness.bound() == 2
    assert res.witness.threshold == 3
    res = locate_global(g, [Q(2), Q(2)])
    assert res.kind == "no_violation"


def test_locate_global_all_minus_infinity():
    g = instance_a()
    res = locate_global(g, [None, None])
    assert res.kind == "no_violation"
    assert res.relaxations == 0


def test_locate_global_detects_infeasibility():
    g = Graph.build(2, [(0, 1, -1, 1), (1, 0, 0, 1)])
    res = locate_global(g, [Q(0), Q(0)])
    assert res.kind == "infeasible"
    assert verify_certificate(g, res.infeasibility)


def test_locate_value_instance_a():
    g = instance_a()
    assert locate_value(g, 0, Q(3)).below
    assert not locate_value(g, 0, Q(2)).below
    with pytest.raises(ValueError):
        locate_value(g, 5, Q(1))


def test_locate_value_agrees_with_enumeration():
    rng = random.Random(61)
    done = 0
    while done < 80:
        g = rand_system(rng, n_max=5)
        r = shostak_enumerate(g)
        if r.infeasible:
            continue
        done += 1
        v = rng.randrange(g.n)
        xi = Q(rng.randint(-10, 10), rng.randint(1, 3))
        expect = r.x_le[v] < Ext(xi)
        assert locate_value(g, v, xi).below == expect


def test_locate_global_agrees_with_enumeration():
    rng = random.Random(62)
    done = 0
    while done < 60:
        g = rand_system(rng, n_max=5)
        r = shostak_enumerate(g)
        if r.infeasible:
            continue
        done += 1
        thresholds = []
        for v in range(g.n):
            if rng.random() < 0.3:
                thresholds.append(None)
            else:
                thresholds.append(Q(rng.randint(-10, 10), rng.randint(1, 3)))
        res = locate_global(g, thresholds)
        expect = any(
            t is not None and r.x_le[v] < Ext(t) for v, t in enumerate(thresholds)
        )
        assert res.below == expect
        if res.below:
            w = res.witness
            assert Ext(w.bound()) < Ext(w.threshold)
            assert w.path.summary.gain > 0
            assert w.cycle.summary.gain < 1


def test_single_violator_witness_is_stable():
    # When exactly one vertex is violated, lowering the other thresholds
    # anywhere below their maxima must not change the returned evidence.
    rng = random.Random(63)
    done = 0
    while done < 12:
        g = rand_system(rng, n_max=5)
        r = shostak_enumerate(g)
        if r.infeasible or not any(v.is_finite for v in r.x_le):
            continue
        v = next(i for i in range(g.n) if r.x_le[i].is_finite)
        base = [None] * g.n
        base[v] = r.x_le[v].finite() + 1
        ref = locate_global(g, base)
        assert ref.kind == "violation" and ref.witness.source == v
        ref_ids = (ref.witness.path.edge_ids, ref.witness.cycle.edge_ids)
        for _ in range(6):
            xi = list(base)
            for u in range(g.n):
                if u == v or not r.x_le[u].is_finite:
                    continue
                if rng.random() < 0.5:
                    xi[u] = r.x_le[u].finite() - Q(rng.randint(0, 5), 2)
            res = locate_global(g, xi)
            assert res.kind == "violation" and res.witness.source == v
            assert (res.witness.path.edge_ids, res.witness.cycle.edge_ids) == ref_ids
        done += 1
