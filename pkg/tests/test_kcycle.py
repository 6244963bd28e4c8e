import random

import pytest

from m2vpi import Ext, Graph, POS_INF, phi_vk, verify_certificate
from m2vpi.certificates import NegBicycleCert
from m2vpi.core import Q, phi
from m2vpi.oracle import closed_walk_profile

from helpers import instance_a, rand_system


def test_self_loop_value_and_witness():
    g = Graph.build(1, [(0, 0, 4, Q(1, 2))])
    r = phi_vk(g, 0, 1)
    assert r.value == Ext(8)
    assert r.witness.edge_ids == (0,)
    assert not r.infeasible


def test_instance_a_two_cycle():
    g = instance_a()
    r = phi_vk(g, 0, 2)
    assert r.value == Ext(2)
    assert r.witness.edge_ids == (0, 1)


def test_no_qualifying_cycle():
    g = Graph.build(2, [(0, 1, 1, Q(1, 2))])
    r = phi_vk(g, 0, 3)
    assert r.value == POS_INF
    assert r.witness is None and r.certificate is None


def test_contradictory_self_loops_yield_bicycle():
    g = Graph.build(1, [(0, 0, 0, Q(1, 2)), (0, 0, -1, 2)])
    r = phi_vk(g, 0, 1)
    assert r.infeasible
    assert isinstance(r.certificate, NegBicycleCert)
    assert len(r.certificate.path.edge_ids) == 0
    assert verify_certificate(g, r.certificate)


def test_argument_validation():
    g = instance_a()
    with pytest.raises(ValueError):
        phi_vk(g, 2, 1)
    with pytest.raises(ValueError):
        phi_vk(g, 0, 0)


def test_materialize_witness_from_parameters():
    g = instance_a()
    r = phi_vk(g, 1, 2, materialize=False)
    assert r.value == Ext(2)
    assert r.witness is None
    w = r.materialize_witness(g)
    assert w.summary.gain < 1
    assert Ext(phi(w.summary)) == r.value


def test_matches_closed_walk_enumeration():
    rng = random.Random(50)
    done = 0
    while done < 150:
        g = rand_system(rng, n_max=6)
        v = rng.randrange(g.n)
        k = rng.randint(1, 4)
        r = phi_vk(g, v, k)
        done += 1
        if r.certificate is not None:
            assert r.value is None
            assert verify_certificate(g, r.certificate)
            continue
        prof = closed_walk_profile(g, v, k)
        assert r.value == prof.upper
        if r.value.is_finite:
            w = r.witness
            assert w.summary.gain < 1 and len(w.edge_ids) <= k
            assert Ext(phi(w.summary)) == r.value


def test_certificate_only_under_contradiction():
    # A returned bicycle uses closed walks of <= k edges at v, so the
    # enumerated profile must cross whenever one is produced.
    rng = random.Random(51)
    seen = 0
    for _ in range(400):
        g = rand_system(rng, n_max=5)
        v = rng.randrange(g.n)
        k = rng.randint(1, 4)
        r = phi_vk(g, v, k)
        if r.certificate is None or not isinstance(r.certificate, NegBicycleCert):
            continue
        seen += 1
        prof = closed_walk_profile(g, v, k)
        assert prof.lower > prof.upper
    assert seen > 0
