"""Reconstruction of lexicographically optimal bounded-length walks.

Given s, t, a length budget k and a parameter alpha, the task is to produce
an actual walk attaining

    min over walks P from s to t with at most k edges of
        (cost(P) + gain(P) * alpha,  gain(P))    lexicographically.

A plain dynamic program over all k steps would need k arrays of parent
pointers to read a walk back. Instead the walk is rebuilt top-down: compute
the optimal pair, find a midpoint vertex that splits it into two halves of
length about k/2, and recurse on the halves. Only two value arrays are alive
at any moment, so auxiliary memory stays linear in n + k while time is
O(m * k * log k).

All arithmetic is exact. The module keeps an allocation meter so tests can
check the linear-memory claim against a counter instead of guessing from the
process footprint.
"""

from __future__ import annotations

from typing import Optional

from .core import Graph, Q, Walk


class NoWalk(ValueError):
    """Raised when no s -> t walk with at most k edges exists."""


class AllocationMeter:
    """Counts live and peak auxiliary cells (array and list entries)."""

    __slots__ = ("live", "peak")

    def __init__(self):
        self.live = 0
        self.peak = 0

    def reset(self):
        self.live = 0
        self.peak = 0

    def alloc(self, cells: int):
        self.live += cells
        if self.live > self.peak:
            self.peak = self.live

    def free(self, cells: int):
        self.live -= cells


_meter = AllocationMeter()


def last_peak_cells() -> int:
    """Peak auxiliary cells of the most recent reconstruct_walk call."""
    return _meter.peak


def _backward(g: Graph, t: int, k: int, alpha) -> list:
    """r_v = lex-min (cost(P) + gain(P)*alpha, gain(P)) over P in P^k_{v,t}.

    Entries are (value, gain) pairs, None where no walk with at most k edges
    exists. One synchronous pass per step; a pass that changes nothing is a
    fixed point, so the loop stops there.
    """
    n = g.n
    tails, heads, costs, gains = g.arrays()
    cur: list[Optional[tuple]] = [None] * n
    cur[t] = (Q(alpha), Q(1))
    _meter.alloc(n)
    for _ in range(k):
        new = list(cur)
        _meter.alloc(n)
        for i in range(g.m):
            prev = cur[heads[i]]
            if prev is None:
                continue
            u = tails[i]
            cand = (costs[i] + gains[i] * prev[0], gains[i] * prev[1])
            old = new[u]
            if old is None or cand < old:
                new[u] = cand
        if new == cur:
            _meter.free(n)
            break
        _meter.free(n)
        cur = new
    return cur


def _forward(g: Graph, s: int, k: int, beta) -> list:
    """l_v = lex-max ((beta - cost(Q))/gain(Q), 1/gain(Q)) over Q in P^k_{s,v}."""
    n = g.n
    tails, heads, costs, gains = g.arrays()
    cur: list[Optional[tuple]] = [None] * n
    cur[s] = (Q(beta), Q(1))
    _meter.alloc(n)
    for _ in range(k):
        new = list(cur)
        _meter.alloc(n)
        for i in range(g.m):
            prev = cur[tails[i]]
            if prev is None:
                continue
            v = heads[i]
            cand = ((prev[0] - costs[i]) / gains[i], prev[1] / gains[i])
            old = new[v]
            if old is None or cand > old:
                new[v] = cand
        if new == cur:
            _meter.free(n)
            break
        _meter.free(n)
        cur = new
    return cur


def _base(g: Graph, s: int, t: int, alpha, beta, Gamma) -> list:
    # Walks of at most one edge: the empty walk (s == t only), then each
    # s -> t edge in id order. The first candidate matching the target pair
    # is returned, which fixes the tie-break.
    if s == t and beta == alpha and Gamma == 1:
        return []
    for i in g.out_edges[s]:
        e = g.edges[i]
        if e.v == t and e.gain == Gamma and e.cost + e.gain * alpha == beta:
            return [i]
    raise AssertionError("target pair not attainable by a short walk")


def _rec(g: Graph, s: int, t: int, k: int, alpha, beta, Gamma) -> list:
    if k <= 1:
        out = _base(g, s, t, alpha, beta, Gamma)
        _meter.alloc(len(out))
        return out
    k1 = (k + 1) // 2
    k2 = k - k1
    lv = _forward(g, s, k1, beta)
    rv = _backward(g, t, k2, alpha)
    mid = None
    for v in range(g.n):
        a, b = lv[v], rv[v]
        if a is None or b is None:
            continue
        if a[0] == b[0] and b[1] == Gamma * a[1]:
            mid = v
            break
    assert mid is not None, "no midpoint splits the optimal walk"
    rmid = rv[mid]
    del lv, rv
    _meter.free(2 * g.n)
    left = _rec(g, s, mid, k1, rmid[0], beta, Gamma / rmid[1])
    right = _rec(g, mid, t, k2, alpha, rmid[0], rmid[1])
    out = left + right
    _meter.alloc(len(out))
    _meter.free(len(left))
    _meter.free(len(right))
    return out


def reconstruct_walk(g: Graph, s: int, t: int, k: int, alpha) -> Walk:
    """Build a walk attaining the lex-min (cost + gain*alpha, gain) pair.

    Raises NoWalk if no s -> t walk with at most k edges exists. The result
    may be shorter than k edges; ties are resolved deterministically (empty
    walk first, then smaller edge ids).
    """
    if k < 0:
        raise ValueError("length budget must be >= 0")
    alpha = Q(alpha)
    _meter.reset()
    r0 = _backward(g, t, k, alpha)
    target = r0[s]
    del r0
    _meter.free(g.n)
    if target is None:
        raise NoWalk(f"no walk {s} -> {t} with at most {k} edges")
    beta, Gamma = target
    ids = _rec(g, s, t, k, alpha, beta, Gamma)
    walk = g.walk(ids, start=s)
    assert walk.end == t and len(ids) <= k
    assert walk.summary.gain == Gamma
    assert walk.summary.cost + Gamma * alpha == beta
    return walk
