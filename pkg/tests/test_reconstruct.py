import random

import pytest

from m2vpi import Graph, NoWalk, reconstruct_walk
from m2vpi.core import Q
from m2vpi.oracle import min_walk_pair
from m2vpi.reconstruct import last_peak_cells

from helpers import instance_a, rand_system


def test_single_edge_base_case():
    g = Graph.build(2, [(0, 1, 3, Q(1, 2))])
    w = reconstruct_walk(g, 0, 1, 1, Q(0))
    assert w.edge_ids == (0,)


def test_instance_a_closed_walk():
    g = instance_a()
    w = reconstruct_walk(g, 0, 0, 2, Q(2))
    assert w.edge_ids == (0, 1)
    assert w.summary.cost + w.summary.gain * Q(2) == Q(2)
    assert w.summary.gain == Q(1, 4)


def test_empty_walk_when_it_wins():
    g = Graph.build(1, [(0, 0, 5, Q(1, 2))])
    w = reconstruct_walk(g, 0, 0, 3, Q(0))
    assert w.edge_ids == ()


def test_no_walk_raises():
    g = Graph.build(2, [(0, 1, 1, 1)])
    with pytest.raises(NoWalk):
        reconstruct_walk(g, 1, 0, 4, Q(0))
    with pytest.raises(NoWalk):
        reconstruct_walk(g, 0, 1, 0, Q(0))


def test_lexicographic_optimum_matches_enumeration():
    rng = random.Random(41)
    done = 0
    while done < 120:
        g = rand_system(rng, n_max=6)
        s, t = rng.randrange(g.n), rng.randrange(g.n)
        k = rng.randint(0, 5)
        alpha = Q(rng.randint(-8, 8), rng.randint(1, 4))
        expect = min_walk_pair(g, s, t, k, alpha)
        if expect is None:
            with pytest.raises(NoWalk):
                reconstruct_walk(g, s, t, k, alpha)
            continue
        w = reconstruct_walk(g, s, t, k, alpha)
        beta = w.summary.cost + w.summary.gain * alpha
        assert (beta, w.summary.gain) == (expect[0], expect[1])
        assert len(w.edge_ids) <= k
        done += 1


def test_returned_walk_endpoints():
    rng = random.Random(42)
    done = 0
    while done < 40:
        g = rand_system(rng, n_max=5)
        s, t = rng.randrange(g.n), rng.randrange(g.n)
        try:
            w = reconstruct_walk(g, s, t, 4, Q(1))
        except NoWalk:
            continue
        done += 1
        if w.edge_ids:
            assert g.edges[w.edge_ids[0]].u == s
            assert g.edges[w.edge_ids[-1]].v == t
        else:
            assert s == t


def test_peak_aux_cells_linear_in_n_plus_k():
    rng = random.Random(43)
    done = 0
    while done < 80:
        g = rand_system(rng, n_max=6)
        s, t = rng.randrange(g.n), rng.randrange(g.n)
        k = rng.randint(0, 5)
        try:
            reconstruct_walk(g, s, t, k, Q(rng.randint(-8, 8)))
        except NoWalk:
            continue
        done += 1
        assert last_peak_cells() <= 4 * (g.n + k)


def test_peak_aux_cells_on_long_winding_walks():
    # A ring with negative costs and alpha large enough that winding all k
    # edges is optimal: recursion depth is maximal, memory must stay linear.
    for n, k in ((3, 48), (8, 64), (12, 192)):
        g = Graph.build(n, [(i, (i + 1) % n, -1, Q(1, 2)) for i in range(n)])
        w = reconstruct_walk(g, 0, 0, k, Q(1000))
        assert len(w.edge_ids) == k
        assert last_peak_cells() <= 4 * (n + k)
