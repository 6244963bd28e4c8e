"""Brute-force reference implementations used as ground truth in tests.

Everything here trades efficiency for obviousness: plain DFS enumeration of
walks, simple paths and simple cycles, and direct evaluation of the closed
form for the pointwise maximal solution. The main solvers never call into
this module; tests compare against it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .core import (
    EMPTY_SUMMARY,
    Ext,
    Graph,
    NEG_INF,
    POS_INF,
    Q,
    Rational,
    WalkSummary,
    compose,
    phi,
)


class SizeLimitExceeded(ValueError):
    pass


def _edge_summary(e) -> WalkSummary:
    return WalkSummary(e.cost, e.gain, 1)


def iter_walks(g: Graph, s: int, k: int) -> Iterator[tuple[tuple[int, ...], int, WalkSummary]]:
    """Yield (edge ids, end vertex, summary) for every walk from s with <= k edges.

    The empty walk is included. Purely exponential; keep k small.
    """
    stack = [((), s, EMPTY_SUMMARY)]
    while stack:
        ids, at, summ = stack.pop()
        yield ids, at, summ
        if len(ids) == k:
            continue
        for eid in g.out_edges[at]:
            e = g.edges[eid]
            stack.append((ids + (eid,), e.v, compose(summ, _edge_summary(e))))


def min_walk_pair(
    g: Graph, s: int, t: int, k: int, alpha: Rational
) -> Optional[tuple[Rational, Rational, tuple[int, ...]]]:
    """Lexicographic minimum of (c(Q) + gamma(Q)*alpha, gamma(Q)) over s->t walks, <= k edges.

    Returns (beta, Gamma, edge ids) or None if no such walk exists.
    """
    best = None
    for ids, at, summ in iter_walks(g, s, k):
        if at != t:
            continue
        key = (summ.cost + summ.gain * alpha, summ.gain)
        if best is None or key < (best[0], best[1]):
            best = (key[0], key[1], ids)
    return best


def propagate_oracle(g: Graph, bounds: list, k: int) -> list:
    """min over walks of <= k edges of c(P) + gamma(P)*bounds_end, per start vertex."""
    out = []
    for s in range(g.n):
        best = Ext.of(bounds[s])
        for ids, at, summ in iter_walks(g, s, k):
            cand = summ.cost + summ.gain * Ext.of(bounds[at])
            if cand < best:
                best = cand
        out.append(best)
    return out


@dataclass
class ClosedWalkProfile:
    """Exhaustive summary of closed walks at a vertex with <= k edges."""

    upper: Ext  # min phi over closed walks with gain < 1 (+inf if none)
    upper_witness: Optional[tuple[int, ...]]
    lower: Ext  # max phi over closed walks with gain > 1 (-inf if none)
    lower_witness: Optional[tuple[int, ...]]
    neg_unit: Optional[tuple[int, ...]]  # some closed walk with gain = 1, cost < 0


def closed_walk_profile(g: Graph, v: int, k: int) -> ClosedWalkProfile:
    upper, lower = POS_INF, NEG_INF
    upper_w = lower_w = neg = None
    for ids, at, summ in iter_walks(g, v, k):
        if at != v or summ.length == 0:
            continue
        if summ.gain < 1:
            val = Ext(phi(summ))
            if val < upper:
                upper, upper_w = val, ids
        elif summ.gain > 1:
            val = Ext(phi(summ))
            if val > lower:
                lower, lower_w = val, ids
        elif summ.cost < 0 and neg is None:
            neg = ids
    return ClosedWalkProfile(upper, upper_w, lower, lower_w, neg)


@dataclass
class ShostakResult:
    """Closed-form per-vertex bounds from exhaustive simple path/cycle enumeration."""

    x_le: list  # list[Ext], per-vertex upper formula value
    x_ge: list  # list[Ext], per-vertex lower formula value
    neg_unit_cycle: Optional[tuple[int, ...]]
    witnesses_le: list  # per-vertex Optional[(path ids, cycle ids)]

    @property
    def infeasible(self) -> bool:
        if self.neg_unit_cycle is not None:
            return True
        return any(a < b for a, b in zip(self.x_le, self.x_ge))


def _iter_simple_paths(g: Graph, s: int) -> Iterator[tuple[tuple[int, ...], int, WalkSummary, bool]]:
    """All simple paths starting at s, plus simple cycles at s flagged closed.

    Yields (edge ids, end vertex, summary, closed). The empty path at s is
    included (closed=False). Interior vertices never repeat; the walk may
    return to s exactly once, which closes it.
    """

    def rec(at, ids, summ, visited):
        yield ids, at, summ, False
        for eid in g.out_edges[at]:
            e = g.edges[eid]
            nxt = compose(summ, _edge_summary(e))
            if e.v == s:
                yield ids + (eid,), s, nxt, True
            elif e.v not in visited:
                visited.add(e.v)
                yield from rec(e.v, ids + (eid,), nxt, visited)
                visited.remove(e.v)

    yield from rec(s, (), EMPTY_SUMMARY, {s})


def shostak_enumerate(g: Graph, limit: int = 8) -> ShostakResult:
    """Evaluate the closed-form bounds by exhaustive enumeration.

    x_le[v] = min over simple paths P: v->w (the trivial path and cycles
    through v count) of c(P) + gamma(P) * (min phi over gamma<1 simple cycles
    at w). x_ge[v] mirrors it along reversed transport with gamma>1 cycles.
    Also finds a negative unit-gain simple cycle if one exists.
    """
    if g.n > limit:
        raise SizeLimitExceeded(f"n={g.n} exceeds enumeration limit {limit}")
    if g.m > 2 * g.n * g.n:
        raise SizeLimitExceeded(f"m={g.m} exceeds 2*n^2 guard")

    best_up = [POS_INF] * g.n
    best_up_w: list = [None] * g.n
    best_lo = [NEG_INF] * g.n
    neg_unit = None
    for w in range(g.n):
        for ids, _at, summ, closed in _iter_simple_paths(g, w):
            if not closed:
                continue
            if summ.gain < 1:
                val = Ext(phi(summ))
                if val < best_up[w]:
                    best_up[w] = val
                    best_up_w[w] = ids
            elif summ.gain > 1:
                val = Ext(phi(summ))
                if val > best_lo[w]:
                    best_lo[w] = val
            elif summ.cost < 0 and neg_unit is None:
                neg_unit = ids

    # Transport along open simple paths only (the trivial path included).
    # A closed transporting path would itself be a cycle and is accounted for
    # as one; keeping it out pins the formula values on infeasible inputs.
    x_le = [POS_INF] * g.n
    witnesses: list = [None] * g.n
    for v in range(g.n):
        for ids, at, summ, closed in _iter_simple_paths(g, v):
            if closed:
                continue
            cand = summ.cost + summ.gain * best_up[at]
            if cand < x_le[v]:
                x_le[v] = cand
                witnesses[v] = (ids, best_up_w[at])

    x_ge = [NEG_INF] * g.n
    for w in range(g.n):
        if best_lo[w].is_neg_inf:
            continue
        for ids, at, summ, closed in _iter_simple_paths(g, w):
            if closed:
                continue
            cand = (best_lo[w] - summ.cost) / summ.gain
            if cand > x_ge[at]:
                x_ge[at] = cand

    return ShostakResult(x_le, x_ge, neg_unit, witnesses)


def naive_dapsp(n: int, edges: list, gamma: Rational, targets=None) -> list:
    """All-pairs discounted distances over walks of <= n edges by plain DP.

    edges is a list of (u, v, cost). For each target t, runs the capped
    recursion delta(s) <- min(delta(s), c(su) + gamma*delta(u)) for n rounds,
    synchronously. Returns an n x len(targets) matrix of Ext values (all n
    targets by default); diagonal entries account for the empty walk.
    """
    out_adj: list[list[tuple[int, Rational]]] = [[] for _ in range(n)]
    for u, v, c in edges:
        out_adj[u].append((v, Q(c)))
    cols = list(range(n)) if targets is None else list(targets)
    matrix = []
    for t in cols:
        d = [POS_INF] * n
        d[t] = Ext(0)
        for _ in range(n):
            prev = d
            d = list(prev)
            for u in range(n):
                for v, c in out_adj[u]:
                    cand = c + gamma * prev[v]
                    if cand < d[u]:
                        d[u] = cand
        matrix.append(d)
    # matrix[ti][s] currently holds delta(s, targets[ti]); transpose to [s][ti]
    return [[matrix[ti][s] for ti in range(len(cols))] for s in range(n)]


def enum_delta(n: int, edges: list, gamma: Rational, s: int, k: int) -> list:
    """Discounted distances from s over walks of <= k edges, by enumeration."""
    out_adj: list[list[tuple[int, Rational]]] = [[] for _ in range(n)]
    for u, v, c in edges:
        out_adj[u].append((v, Q(c)))
    best = [POS_INF] * n
    best[s] = Ext(0)

    def rec(at, depth, cost, disc):
        if Ext(cost) < best[at]:
            best[at] = Ext(cost)
        if depth == k:
            return
        for v, c in out_adj[at]:
            rec(v, depth + 1, cost + disc * c, disc * gamma)

    rec(s, 0, Q(0), Q(1))
    return best
