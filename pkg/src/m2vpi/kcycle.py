"""phi_{v,k}: the best gain < 1 cycle bound at a vertex, length-capped.

phi_{v,k} = min over closed walks C through v with at most k edges and
gain(C) < 1 of phi(C) = cost(C)/(1 - gain(C)). Enumerating closed walks is
out of the question, so the value is found by parametric search: maintain an
open interval (a, b) known to contain phi_{v,k}, advance a level-by-level
line DP whose per-vertex state is a single (cost, gain) pair valid on the
whole interval, and shrink the interval by threshold queries (locate_cycle)
at the DP's envelope breakpoints. Walks are never stored; witnesses are
re-derived from (v, k, alpha) parameters on demand.

Along the way the search may trip over proof of infeasibility (a negative
unit-gain walk, or a gain > 1 bound exceeding a gain < 1 bound); that comes
back as a certificate instead of a value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import instrument
from .certificates import Certificate, NegBicycleCert, NegUnitGainCert
from .core import Ext, Graph, POS_INF, Q, Rational, Walk, phi
from .locate import locate_cycle
from .reconstruct import reconstruct_walk


@dataclass
class KCycleResult:
    v: int
    k: int
    value: Optional[Ext]  # phi_{v,k}; None exactly when certificate is set
    witness_alpha: Optional[Rational]
    witness: Optional[Walk]
    certificate: Optional[Certificate]
    queries: int

    @property
    def infeasible(self) -> bool:
        return self.certificate is not None

    def materialize_witness(self, g: Graph) -> Walk:
        """Rebuild the optimal cycle from (v, k, alpha); exact checks included."""
        if self.value is None or not self.value.is_finite:
            raise ValueError("no finite value, nothing to materialize")
        w = reconstruct_walk(g, self.v, self.v, self.k, self.witness_alpha)
        assert w.summary.gain < 1
        assert phi(w.summary) == self.value.finite()
        return w


def _zero_cost(g: Graph, reciprocal: bool) -> Graph:
    spec = [
        (e.u, e.v, 0, (1 / e.gain) if reciprocal else e.gain) for e in g.edges
    ]
    return Graph.build(g.n, spec)


def _interior(a, b) -> Rational:
    if a is None and b is None:
        return Q(0)
    if a is None:
        return b - 1
    if b is None:
        return a + 1
    return (a + b) / 2


def _envelope_breakpoints(cand: list) -> list:
    """x-coordinates where the lower envelope of y = slope*x + icept changes."""
    by = sorted(cand, key=lambda t: (-t[0], t[1]))
    lines = []
    for s, i, _ in by:
        if lines and lines[-1][0] == s:
            continue  # parallel and not below: never on the envelope
        lines.append((s, i))
    stack = []  # [slope, icept, left boundary of its winning range]
    for s, i in lines:
        while True:
            if not stack:
                stack.append((s, i, None))
                break
            s0, i0, x0 = stack[-1]
            x = (i - i0) / (s0 - s)
            if x0 is not None and x <= x0:
                stack.pop()
                continue
            stack.append((s, i, x))
            break
    return [t[2] for t in stack if t[2] is not None]


def _select_line(cand: list, a) -> tuple:
    # The line minimal throughout (a, b). (a, b) contains no envelope
    # breakpoint, so minimality at a single spot implies it everywhere
    # inside; at a itself several lines may tie, and the smaller slope wins
    # just to the right. With a = -inf the largest slope is lowest. The tie
    # field keeps the choice deterministic among identical lines.
    if a is None:
        return min(cand, key=lambda t: (-t[0], t[1], t[2]))
    return min(cand, key=lambda t: (t[1] + t[0] * a, t[0], t[2]))


def phi_vk(g: Graph, v: int, k: int, materialize: bool = True) -> KCycleResult:
    """Compute phi_{v,k} exactly, or return an infeasibility certificate.

    O(m k^2 log m) time, O(n + m) space. With materialize=False the witness
    walk is left to materialize_witness (solvers keep only the parameters).
    """
    if not (0 <= v < g.n):
        raise ValueError("vertex out of range")
    if k < 1:
        raise ValueError("need k >= 1")
    instrument.bump("kcycle_calls")
    queries = 0

    # Extreme-gain closed walks bound the problem from both sides.
    ids_min = reconstruct_walk(_zero_cost(g, False), v, v, k, 1).edge_ids
    c_min = g.walk(ids_min, start=v)
    if c_min.summary.gain >= 1:
        return KCycleResult(v, k, POS_INF, None, None, None, queries)
    cmin_handle = ("walk", c_min)
    cmin_phi = phi(c_min.summary)

    ids_max = reconstruct_walk(_zero_cost(g, True), v, v, k, 1).edge_ids
    c_max = g.walk(ids_max, start=v)
    have_cmax = c_max.summary.gain > 1
    cmax_handle = ("walk", c_max) if have_cmax else None
    cmax_phi = phi(c_max.summary) if have_cmax else None

    def handle_walk(handle) -> Walk:
        kind, data = handle
        if kind == "walk":
            return data
        out_xi, out_phi, low = data
        w = reconstruct_walk(g, v, v, k, out_xi)
        assert (w.summary.gain < 1) == low
        assert phi(w.summary) == out_phi
        return w

    def bicycle(lo_handle, lo_phi, hi_handle, hi_phi) -> KCycleResult:
        lo_w = handle_walk(lo_handle)
        hi_w = handle_walk(hi_handle)
        assert lo_w.summary.gain < 1 and hi_w.summary.gain > 1
        assert hi_phi > lo_phi
        cert = NegBicycleCert(
            cycle_le=lo_w, cycle_ge=hi_w, path=g.walk((), start=v)
        )
        return KCycleResult(v, k, None, None, None, cert, queries)

    if have_cmax and cmax_phi > cmin_phi:
        return bicycle(cmin_handle, cmin_phi, cmax_handle, cmax_phi)

    # Invariant tag: with a pinned c_max the interval satisfies
    # a < phi(c_max) <= phi(c_min) < b; without one, every gain > 1 cycle
    # bound is already <= a.
    a: Optional[Rational] = None  # None = -inf
    b: Optional[Rational] = None  # None = +inf
    P: list = [None] * g.n
    P[v] = (Q(0), Q(1))

    def finish(value: Rational) -> KCycleResult:
        assert (a is None or a < value) and (b is None or value < b)
        wit = None
        if materialize:
            w = reconstruct_walk(g, v, v, k, value)
            assert w.summary.gain < 1 and phi(w.summary) == value
            wit = w
        return KCycleResult(v, k, Ext(value), value, wit, None, queries)

    for _ in range(k):
        cand: list = [None] * g.n
        pts = set()
        for w in range(g.n):
            cw = []
            pw = P[w]
            if pw is not None:
                cw.append((pw[1], pw[0], -1))  # stay on the level below
            for eid in g.out_edges[w]:
                e = g.edges[eid]
                pu = P[e.v]
                if pu is not None:
                    cw.append((e.gain * pu[1], e.cost + e.gain * pu[0], eid))
            cand[w] = cw
            if len(cw) > 1:
                for x in _envelope_breakpoints(cw):
                    if (a is None or x > a) and (b is None or x < b):
                        pts.add(x)
        xs = sorted(pts)
        lo, hi = 0, len(xs)
        while lo < hi:
            mid = (lo + hi) // 2
            gq = xs[mid]
            out = locate_cycle(g, v, k, gq)
            queries += 1
            if out.tag == "equal":
                return finish(gq)
            if out.tag == "neg_unit":
                wneg = out.materialize(g)
                return KCycleResult(
                    v, k, None, None, None, NegUnitGainCert(wneg), queries
                )
            if out.tag == "below":
                b = gq
                hi = mid
                cmin_phi = out.witness_phi()
                cmin_handle = ("query", (gq, cmin_phi, True))
                if have_cmax and cmin_phi < cmax_phi:
                    return bicycle(cmin_handle, cmin_phi, cmax_handle, cmax_phi)
            elif out.tag == "above":
                assert have_cmax, "a gain > 1 bound above a certified ceiling"
                a = gq
                lo = mid + 1
                cmax_phi = out.witness_phi()
                cmax_handle = ("query", (gq, cmax_phi, False))
                if cmin_phi < cmax_phi:
                    return bicycle(cmin_handle, cmin_phi, cmax_handle, cmax_phi)
            else:  # between: every gain > 1 bound is <= gq < phi_{v,k}
                a = gq
                lo = mid + 1
                have_cmax = False
                cmax_handle = None
                cmax_phi = None
        newP: list = [None] * g.n
        for w in range(g.n):
            if cand[w]:
                s, i, _ = _select_line(cand[w], a)
                newP[w] = (i, s)
        if newP == P:
            break  # level fixed point: deeper levels repeat it exactly
        P = newP

    cp, gp = P[v]

    def materialize_pkv() -> Walk:
        w = reconstruct_walk(g, v, v, k, _interior(a, b))
        assert w.summary.cost == cp and w.summary.gain == gp
        return w

    if gp < 1:
        php = cp / (1 - gp)
        if not have_cmax:
            return finish(php)
        assert php <= cmax_phi
        if php < cmax_phi:
            pw = materialize_pkv()
            return bicycle(("walk", pw), php, cmax_handle, cmax_phi)
        # phi(P) lands exactly on the pinned lower bound; one more query
        # settles whether the true optimum sits at, below, or above it.
        out = locate_cycle(g, v, k, php)
        queries += 1
        if out.tag == "equal":
            return finish(php)
        if out.tag == "neg_unit":
            return KCycleResult(
                v, k, None, None, None, NegUnitGainCert(out.materialize(g)), queries
            )
        if out.tag == "below":
            h = ("query", (php, out.witness_phi(), True))
            return bicycle(h, out.witness_phi(), cmax_handle, cmax_phi)
        if out.tag == "above":
            h = ("query", (php, out.witness_phi(), False))
            return bicycle(("walk", materialize_pkv()), php, h, out.witness_phi())
        raise AssertionError("tag 'between' is impossible at phi(P)")
    if gp > 1:
        assert have_cmax, "a gain > 1 optimum under a certified gain ceiling"
        php = cp / (1 - gp)
        assert php > cmin_phi
        return bicycle(cmin_handle, cmin_phi, ("walk", materialize_pkv()), php)
    assert cp < 0, "a unit-gain optimum can only win with negative cost"
    return KCycleResult(
        v, k, None, None, None, NegUnitGainCert(materialize_pkv()), queries
    )
