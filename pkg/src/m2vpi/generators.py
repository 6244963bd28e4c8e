"""Seeded instance generators for tests and the benchmark harness.

Every generator is deterministic under its seed. The feasible families
construct a witness point first and only emit constraints that point
satisfies, so feasibility is guaranteed rather than sampled for; the
infeasible families plant an explicit contradiction that additional random
edges cannot repair, since adding constraints only shrinks the feasible set.
"""

import random
from typing import Optional

from .core import Graph, Q, Rational
from .dapsp import UniformInstance

__all__ = [
    "dapsp_random",
    "dmdp_random",
    "feasible_random",
    "infeasible_bicycle",
    "planted_long_cycle",
    "planted_unit_cycle",
]


def _rand_q(rng: random.Random, lo: int, hi: int, den: int = 4) -> Rational:
    return Q(rng.randint(lo * den, hi * den), den)


def _rand_gain(rng: random.Random) -> Rational:
    num = rng.randint(1, 12)
    den = rng.randint(1, 12)
    return Q(num, den)


def feasible_random(n: int, m: int, seed: int) -> Graph:
    """Random feasible system with arbitrary positive gains.

    A witness w is drawn first; every edge u -> v gets cost
    w[u] - gain * w[v] + slack with slack >= 0, so w satisfies the system.
    """
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    rng = random.Random(seed)
    w = [_rand_q(rng, -10, 10) for _ in range(n)]
    spec = []
    for _ in range(m):
        u = rng.randrange(n)
        v = rng.randrange(n)
        gn = _rand_gain(rng)
        slack = _rand_q(rng, 0, 6)
        spec.append((u, v, w[u] - gn * w[v] + slack, gn))
    return Graph.build(n, spec)


def dmdp_random(n: int, m: int, seed: int) -> Graph:
    """Random deterministic MDP: every gain strictly below one.

    Such systems are always feasible, there is no closed walk whose gain
    reaches 1, so neither kind of contradiction can exist.
    """
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    rng = random.Random(seed)
    spec = []
    for _ in range(m):
        u = rng.randrange(n)
        v = rng.randrange(n)
        den = rng.randint(2, 12)
        gn = Q(rng.randint(1, den - 1), den)
        spec.append((u, v, _rand_q(rng, -8, 8), gn))
    return Graph.build(n, spec, dmdp=True)


def planted_long_cycle(n: int, m: int, seed: int, length: Optional[int] = None) -> Graph:
    """Feasible instance whose tightest bound is one planted gain<1 cycle.

    The cycle runs through `length` vertices (all n by default). Its fixed
    point is computed exactly and used as the witness on the cycle; every
    additional edge is sampled with strictly positive slack against the
    witness, so the planted cycle's bound stays the unique tight one at its
    vertices.
    """
    if length is None:
        length = n
    if not (1 <= length <= n):
        raise ValueError("cycle length must lie in 1..n")
    if m < length:
        raise ValueError("m must cover the planted cycle")
    rng = random.Random(seed)
    gains = []
    costs = []
    for _ in range(length):
        den = rng.randint(2, 5)
        gains.append(Q(rng.randint(1, den - 1), den))
        costs.append(_rand_q(rng, -6, 6))
    # fixed point of x = c(C) + gain(C) x, then walk the cycle backwards
    total_cost = Q(0)
    total_gain = Q(1)
    for c, gn in zip(costs, gains):
        total_cost += total_gain * c
        total_gain *= gn
    w = [Q(0)] * n
    w[0] = total_cost / (1 - total_gain)
    for i in range(length - 1, 0, -1):
        # invert x_i = c_i + g_i x_{i+1} along the cycle edge i -> i+1 mod L
        nxt = w[(i + 1) % length]
        w[i] = costs[i] + gains[i] * nxt
    for v in range(length, n):
        w[v] = _rand_q(rng, -10, 10)
    spec = []
    for i in range(length):
        spec.append((i, (i + 1) % length, costs[i], gains[i]))
    for _ in range(m - length):
        u = rng.randrange(n)
        v = rng.randrange(n)
        gn = _rand_gain(rng)
        slack = _rand_q(rng, 1, 7)
        spec.append((u, v, w[u] - gn * w[v] + slack, gn))
    return Graph.build(n, spec)


def planted_unit_cycle(n: int, m: int, seed: int) -> Graph:
    """Infeasible instance: a closed walk of gain exactly 1 and cost < 0.

    Gains along the planted cycle come in reciprocal pairs so the product
    telescopes to 1; costs sum to a strictly negative total.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    rng = random.Random(seed)
    length = rng.randint(1, min(4, n))
    verts = rng.sample(range(n), length)
    gains = [Q(1)] * length
    for i in range(0, length - 1, 2):
        gn = _rand_gain(rng)
        gains[i] = gn
        gains[i + 1] = 1 / gn
    costs = [_rand_q(rng, -5, 5) for _ in range(length)]
    # force the discounted cycle cost negative by shifting the first edge
    total = Q(0)
    acc = Q(1)
    for c, gn in zip(costs, gains):
        total += acc * c
        acc *= gn
    costs[0] -= total + Q(rng.randint(1, 8), rng.randint(1, 3))
    spec = []
    for i in range(length):
        spec.append((verts[i], verts[(i + 1) % length], costs[i], gains[i]))
    while len(spec) < m:
        u = rng.randrange(n)
        v = rng.randrange(n)
        spec.append((u, v, _rand_q(rng, -8, 8), _rand_gain(rng)))
    return Graph.build(n, spec)


def infeasible_bicycle(n: int, m: int, seed: int) -> Graph:
    """Infeasible instance: contradicting cycle bounds joined by a path.

    A gain>1 cycle forces a lower bound at its vertex, a gain<1 cycle an
    upper bound at another, and a connecting path transports the upper
    bound back below the lower one. The margin between the two bounds is
    strictly positive by construction; extra random edges cannot remove the
    contradiction.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    rng = random.Random(seed)
    a = 0
    b = rng.randrange(1, n)
    spec = []
    # gain > 1 cycle at a, phi = c / (1 - g) with g > 1
    g_hi = Q(rng.randint(3, 8), 2)
    # gain < 1 cycle at b
    g_lo = Q(1, rng.randint(2, 5))
    c_lo = _rand_q(rng, -4, 4)
    phi_lo = c_lo / (1 - g_lo)
    # path a -> b, one edge
    c_p = _rand_q(rng, -4, 4)
    g_p = _rand_gain(rng)
    bound = c_p + g_p * phi_lo
    margin = Q(rng.randint(1, 6), rng.randint(1, 3))
    phi_hi = bound + margin
    c_hi = phi_hi * (1 - g_hi)
    spec.append((a, a, c_hi, g_hi))
    spec.append((b, b, c_lo, g_lo))
    spec.append((a, b, c_p, g_p))
    while len(spec) < m:
        u = rng.randrange(n)
        v = rng.randrange(n)
        spec.append((u, v, _rand_q(rng, -8, 8), _rand_gain(rng)))
    return Graph.build(n, spec)


def dapsp_random(n: int, m: int, seed: int, gamma=None) -> UniformInstance:
    """Random simple digraph with one discount factor for the dapsp solver."""
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    if m > n * n:
        raise ValueError("a simple digraph with loops has at most n^2 edges")
    rng = random.Random(seed)
    if gamma is None:
        den = rng.randint(2, 10)
        gamma = Q(rng.randint(1, den - 1), den)
    else:
        gamma = Q(gamma)
    pairs = set()
    while len(pairs) < m:
        pairs.add((rng.randrange(n), rng.randrange(n)))
    edges = [(u, v, _rand_q(rng, -8, 8, den=2)) for u, v in sorted(pairs)]
    return UniformInstance.build(n, edges, gamma)
