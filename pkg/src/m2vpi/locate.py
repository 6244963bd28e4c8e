"""Location procedures: compare thresholds against the maximal solution.

locate_cycle answers a one-vertex query about closed walks of bounded
length. locate_global takes a whole threshold vector and either certifies
that no x^max_v lies strictly below its threshold, or returns walk evidence
for one that does, or exposes an infeasibility certificate it stumbled on.

Both are exact and deterministic: ties are broken by fixed rules (edge ids,
then vertex indices), which the callers rely on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from . import instrument
from .certificates import Certificate, NegBicycleCert, NegUnitGainCert
from .core import Ext, Graph, Q, Rational, Walk, phi
from .reconstruct import reconstruct_walk


@dataclass(frozen=True)
class CycleLocateOutcome:
    """Result of locate_cycle(g, v, k, xi).

    tag meanings, with Q the lex-minimal (cost + gain*xi, gain) closed walk
    through v of length <= k:

    * 'below':    gain(Q) < 1 and value < xi, so phi_{v,k} <= phi(Q) < xi.
    * 'above':    gain(Q) > 1 and value < xi, so phi(Q) > xi is a lower
                  bound from a gain > 1 cycle.
    * 'neg_unit': gain(Q) = 1 and cost(Q) < 0, an infeasibility certificate.
    * 'equal':    gain(Q) < 1 and value = xi, so phi_{v,k} = xi exactly.
    * 'between':  the best is the trivial pair (gain 1, value xi): every
                  gain > 1 cycle bound is <= xi and phi_{v,k} > xi.

    y and gain are the final lex pair; the witness walk has
    cost = y - gain*xi and can be rebuilt on demand.
    """

    tag: str
    v: int
    k: int
    xi: Rational
    y: Rational
    gain: Rational
    relaxations: int

    @property
    def witness_cost(self) -> Rational:
        return self.y - self.gain * self.xi

    def witness_phi(self) -> Rational:
        """phi of the witness closed walk; gain must not be 1."""
        if self.gain == 1:
            raise ArithmeticError("witness has gain 1, phi undefined")
        return self.witness_cost / (1 - self.gain)

    def materialize(self, g: Graph) -> Walk:
        w = reconstruct_walk(g, self.v, self.v, self.k, self.xi)
        assert w.summary.gain == self.gain
        assert w.summary.cost == self.witness_cost
        return w


def locate_cycle(g: Graph, v: int, k: int, xi) -> CycleLocateOutcome:
    """Classify xi against the closed walks through v with <= k edges.

    Runs k synchronous lex-min passes of (cost + gain*xi, gain) pairs toward
    v, in O(mk) time and O(n) space.
    """
    if not (0 <= v < g.n):
        raise ValueError("vertex out of range")
    if k < 1:
        raise ValueError("need k >= 1")
    xi = Q(xi)
    tails, heads, costs, gains = g.arrays()
    n, m = g.n, g.m
    cur: list[Optional[tuple]] = [None] * n
    cur[v] = (xi, Q(1))
    relax = 0
    for _ in range(k):
        new = list(cur)
        relax += m
        for i in range(m):
            prev = cur[heads[i]]
            if prev is None:
                continue
            u = tails[i]
            cand = (costs[i] + gains[i] * prev[0], gains[i] * prev[1])
            old = new[u]
            if old is None or cand < old:
                new[u] = cand
        if new == cur:
            break
        cur = new
    y, gain = cur[v]
    assert y <= xi, "the trivial pair bounds the minimum"
    if y < xi:
        if gain < 1:
            tag = "below"
        elif gain > 1:
            tag = "above"
        else:
            tag = "neg_unit"
    else:
        assert gain <= 1, "a gain > 1 tie would lose to the trivial pair"
        tag = "equal" if gain < 1 else "between"
    if tag == "neg_unit":
        assert y - gain * xi < 0
    return CycleLocateOutcome(tag, v, k, xi, y, gain, relax)


@dataclass(frozen=True)
class ViolationWitness:
    """Evidence that x^max_source < threshold.

    path runs source -> w (simple, possibly empty), cycle is closed at w
    with gain < 1; then x_source <= cost(path) + gain(path)*phi(cycle),
    which is strictly below threshold.
    """

    source: int
    threshold: Rational
    path: Walk
    cycle: Walk

    def bound(self) -> Rational:
        return self.path.summary.cost + self.path.summary.gain * phi(self.cycle.summary)


@dataclass(frozen=True)
class LocateResult:
    kind: str  # 'no_violation' | 'violation' | 'infeasible'
    witness: Optional[ViolationWitness]
    infeasibility: Optional[Certificate]
    phases: int
    relaxations: int

    @property
    def below(self) -> bool:
        return self.kind == "violation"


def _normalize_thresholds(g: Graph, thresholds: Sequence) -> list:
    if len(thresholds) != g.n:
        raise ValueError("need one threshold per vertex")
    xi = []
    for t in thresholds:
        if t is None:
            xi.append(None)
            continue
        e = Ext.of(t)
        if e.is_pos_inf:
            raise ValueError("threshold +inf is never strictly violated; drop it")
        xi.append(None if e.is_neg_inf else e.finite())
    return xi


def _cycle_edges(p: list, cyc: list, w_pos: int) -> list:
    # cyc lists the cycle vertices in parent-following order (z_{i+1} is the
    # tail of p[z_i]); the corresponding closed walk in g starting at
    # cyc[w_pos] uses those parent edges in reverse order.
    r = len(cyc)
    return [p[cyc[(w_pos - 1 - t) % r]] for t in range(r)]


def _find_cycles(p: list, tails: list, n: int) -> list:
    """Cycles of the parent graph, in deterministic discovery order."""
    color = [0] * n
    cycles = []
    for v0 in range(n):
        if color[v0]:
            continue
        path = []
        v = v0
        while True:
            if color[v] == 2:
                break
            if color[v] == 1:
                cycles.append(path[path.index(v):])
                break
            color[v] = 1
            path.append(v)
            e = p[v]
            if e is None:
                break
            v = tails[e]
        for w in path:
            color[w] = 2
    return cycles


def locate_global(g: Graph, thresholds: Sequence) -> LocateResult:
    """Does any x^max_v sit strictly below thresholds[v]?

    thresholds entries are rationals, Ext values, or None for -inf (vertices
    with nothing asserted). Runs at most n synchronous phases of lower-bound
    propagation; parent pointers are scanned for cycles each phase, and a
    gain < 1 cycle yields a ViolationWitness while a gain = 1 cycle yields a
    negative-unit-gain certificate. Gain > 1 cycles carry no violation
    information and are skipped.
    """
    res = _locate_global_impl(g, thresholds)
    instrument.bump("locate_calls")
    instrument.bump("edge_relaxations", res.relaxations)
    return res


def _locate_global_impl(g: Graph, thresholds: Sequence) -> LocateResult:
    xi = _normalize_thresholds(g, thresholds)
    n, m = g.n, g.m
    if all(t is None for t in xi):
        return LocateResult("no_violation", None, None, 0, 0)
    tails, heads, costs, gains = g.arrays()
    y = list(xi)
    p: list[Optional[int]] = [None] * n
    relax = 0
    for j in range(1, n + 1):
        imp_val: list[Optional[Rational]] = [None] * n
        imp_eid = [0] * n
        relax += m
        for i in range(m):
            yu = y[tails[i]]
            if yu is None:
                continue
            cand = (yu - costs[i]) / gains[i]
            w = heads[i]
            if imp_val[w] is None or cand >= imp_val[w]:
                imp_val[w] = cand
                imp_eid[w] = i
        y_new = list(y)
        p_new = list(p)
        improved = [False] * n
        for w in range(n):
            v = imp_val[w]
            if v is not None and (y[w] is None or v > y[w]):
                y_new[w] = v
                p_new[w] = imp_eid[w]
                improved[w] = True
        if y_new == y:
            break
        for cyc in _find_cycles(p_new, tails, n):
            if not any(improved[z] for z in cyc):
                # Unchanged parents: this cycle persisted from an earlier
                # phase, where it was already inspected.
                cyc_gain = Q(1)
                for z in cyc:
                    cyc_gain *= gains[p_new[z]]
                assert cyc_gain > 1, "a gain <= 1 cycle would have terminated the scan"
                continue
            cyc_gain = Q(1)
            for z in cyc:
                cyc_gain *= gains[p_new[z]]
            if cyc_gain > 1:
                continue
            hot = [i for i, z in enumerate(cyc) if improved[z]]
            if cyc_gain == 1:
                wpos = min(hot, key=lambda i: cyc[i])
                walk = g.walk(_cycle_edges(p_new, cyc, wpos), start=cyc[wpos])
                assert walk.summary.gain == 1 and walk.summary.cost < 0
                return LocateResult(
                    "infeasible", None, NegUnitGainCert(walk), j, relax
                )
            wpos = min(hot, key=lambda i: cyc[i])
            w = cyc[wpos]
            cwalk = g.walk(_cycle_edges(p_new, cyc, wpos), start=w)
            assert cwalk.summary.gain < 1
            phi_c = phi(cwalk.summary)
            assert y[w] is not None and y[w] > phi_c
            # Follow the previous phase's parents from w; they either reach
            # a threshold vertex (a violation witness) or run into a gain > 1
            # parent cycle (an infeasible bicycle).
            chain = []
            pos = {w: 0}
            at = w
            while True:
                e = p[at]
                if e is None:
                    path = g.walk(list(reversed(chain)), start=at)
                    assert path.end == w
                    bound = path.summary.cost + path.summary.gain * phi_c
                    assert xi[at] is not None and bound < xi[at]
                    witness = ViolationWitness(at, xi[at], path, cwalk)
                    return LocateResult("violation", witness, None, j, relax)
                nxt = tails[e]
                chain.append(e)
                if nxt in pos:
                    q = pos[nxt]
                    conn = g.walk(list(reversed(chain[:q])), start=nxt)
                    upcyc = g.walk(list(reversed(chain[q:])), start=nxt)
                    assert upcyc.summary.gain > 1, (
                        "a gain <= 1 parent cycle would have terminated earlier"
                    )
                    cert = NegBicycleCert(cycle_le=cwalk, cycle_ge=upcyc, path=conn)
                    assert phi(upcyc.summary) > (
                        conn.summary.cost + conn.summary.gain * phi_c
                    )
                    return LocateResult("infeasible", None, cert, j, relax)
                pos[nxt] = len(chain)
                at = nxt
        y = y_new
        p = p_new
    return LocateResult("no_violation", None, None, min(j, n) if n else 0, relax)


def locate_value(g: Graph, v: int, xi) -> LocateResult:
    """Is x^max_v < xi? Single-vertex wrapper around locate_global."""
    if not (0 <= v < g.n):
        raise ValueError("vertex out of range")
    thresholds: list = [None] * g.n
    thresholds[v] = Q(xi)
    return locate_global(g, thresholds)
