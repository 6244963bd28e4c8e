"""Shared builders for the test suite.

Instance A is the running two-vertex example: a symmetric 2-cycle with
cost 1 and gain 1/2 on both edges, whose maximal solution is (2, 2).
"""

import random

from m2vpi import Graph
from m2vpi.core import Q


def instance_a() -> Graph:
    return Graph.build(2, [(0, 1, 1, Q(1, 2)), (1, 0, 1, Q(1, 2))])


def rand_rational(rng: random.Random, lo: int = -8, hi: int = 8, den: int = 8):
    return Q(rng.randint(lo, hi), rng.randint(1, den))


def rand_gain(rng: random.Random, allow_unit: bool = True):
    num = rng.randint(1, 8)
    den = rng.randint(1, 8)
    if not allow_unit and num == den:
        num += 1
    return Q(num, den)


def rand_system(
    rng: random.Random,
    n_max: int = 6,
    m_factor: int = 2,
    allow_unit: bool = True,
) -> Graph:
    """Unconstrained random instance; may be feasible or not."""
    n = rng.randint(1, n_max)
    m = rng.randint(1, m_factor * n)
    spec = []
    for _ in range(m):
        u = rng.randrange(n)
        v = rng.randrange(n)
        spec.append((u, v, rand_rational(rng), rand_gain(rng, allow_unit)))
    return Graph.build(n, spec)


def walk_pairs(g: Graph, s: int, k: int):
    """(end vertex, summary, ids) for every walk from s with <= k edges."""
    from m2vpi.oracle import iter_walks

    for ids, at, summ in iter_walks(g, s, k):
        yield at, summ, ids
