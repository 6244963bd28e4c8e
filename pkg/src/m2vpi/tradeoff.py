"""Space-time trade-off solver over a compressed sampled instance.

Truncated sampling phases handle bounds carried by short cycles; longer
cycles are delegated to a dense instance on a sampled vertex set S.  For
each target t in S a parametric scan maintains, per length bound j <= h,
the summary of a v -> t walk of at most j edges minimizing
cost + gain * x^max_t, without knowing x^max_t: the candidate lines'
envelope breakpoints are binary-searched with locate_value until the
interval known to contain x^max_t is crossing-free, where a single line is
minimal throughout.  The compressed instance (one edge per ordered sample
pair) is solved recursively and its maxima fold back into the sampled
bounds before relaxation and verification.  This mode never returns
certificates; infeasible inputs are declared without one.
"""

import math
import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import Ext, Graph, POS_INF, Q, Rational, Walk
from .locate import locate_value
from .solver import (
    NotFeasible,
    NotMaximal,
    SolveOutcome,
    _gain_cycle_exists,
    _phi_cache_for,
    _propagate_record,
    _reverse_of,
    _sample_phases,
    _unit_gain_certificate,
    phase_schedule,
    solve_simple,
    verify_solution,
)

__all__ = [
    "CompressedInstance",
    "InfeasibleDetected",
    "build_compressed",
    "rederive_edge_walk",
    "sample_size",
    "solve_tradeoff",
]


class InfeasibleDetected(Exception):
    """A location query ran into a negative unit-gain cycle."""

    def __init__(self, certificate):
        super().__init__("negative unit-gain cycle found during compression")
        self.certificate = certificate


@dataclass(frozen=True)
class CompressedInstance:
    """Dense instance on the sampled vertices.

    vertices lists the sample in ascending order (its position is the
    compact index); summaries maps an ordered pair (s, t) of originals to
    the (cost, gain) of a minimizing s -> t walk of at most h edges, with
    no entry when no such walk exists.  intervals[t] is the final
    localization interval for x^max_t (None bounds meaning unbounded);
    together with h it allows re-deriving a witnessing walk for any edge,
    see rederive_edge_walk.
    """

    vertices: tuple
    summaries: dict
    intervals: dict
    h: int

    def graph(self) -> Graph:
        index = {v: i for i, v in enumerate(self.vertices)}
        spec = [
            (index[s], index[t], c, gn)
            for (s, t), (c, gn) in sorted(self.summaries.items())
        ]
        return Graph.build(len(self.vertices), spec)


def sample_size(n: int, h: int) -> int:
    """Number of sampled vertices, ceil(3 (n/h) ln n) capped at n."""
    if n <= 1:
        return 0
    return min(n, math.ceil(3 * (n / h) * math.log(n)))


def _ix(a, b) -> Rational:
    """x-coordinate where lines a and b (cost, gain pairs) cross."""
    return (a[0] - b[0]) / (b[1] - a[1])


def _envelope_breakpoints(lines: Sequence[tuple]) -> list:
    """Breakpoints of the pointwise minimum of the lines y = cost + gain*x.

    The minimum of affine functions is concave, so the envelope runs
    through lines of strictly decreasing slope; equal slopes keep the
    smallest intercept, and a line is dropped when the next one takes over
    no later than the line itself did.
    """
    best: dict = {}
    for c, gn in lines:
        cur = best.get(gn)
        if cur is None or c < cur:
            best[gn] = c
    ordered = [(best[gn], gn) for gn in sorted(best, reverse=True)]
    hull: list = []
    for line in ordered:
        while len(hull) >= 2 and _ix(hull[-2], line) <= _ix(hull[-2], hull[-1]):
            hull.pop()
        hull.append(line)
    return [_ix(hull[i], hull[i + 1]) for i in range(len(hull) - 1)]


def _test_point(lo: Optional[Rational], hi: Optional[Rational]) -> Rational:
    """A point strictly inside the interval (None meaning unbounded)."""
    if lo is None and hi is None:
        return Q(0)
    if lo is None:
        return hi - 1
    if hi is None:
        return lo + 1
    return (lo + hi) / 2


def _scan_lines(g: Graph, level: list) -> list:
    """Candidate lines per vertex for the next length bound.

    Position 0, when the vertex already has a walk, carries it over
    unchanged; the rest prepend an out-edge to the tail's walk, in edge id
    order.  The order is part of the contract: argmin ties resolve to the
    first line, and rederive_edge_walk replays the same order.
    """
    lines: list = [None] * g.n
    for v in range(g.n):
        cand = []
        if level[v] is not None:
            cand.append(level[v])
        for eid in g.out_edges[v]:
            e = g.edges[eid]
            prev = level[e.v]
            if prev is not None:
                cand.append((e.cost + e.gain * prev[0], e.gain * prev[1]))
        lines[v] = cand
    return lines


def build_compressed(g: Graph, sample: Sequence[int], h: int) -> CompressedInstance:
    """One edge per ordered sample pair, summarizing the best short walk.

    Runs the per-target parametric scan: each length bound recomputes the
    candidate lines and their envelope breakpoints from scratch, narrows
    the interval around x^max_t by binary search over the breakpoints
    (locate_value answers each comparison), then picks per vertex the line
    minimal on the final crossing-free interval.  Only the interval and the
    current walk summaries survive between bounds.  Raises
    InfeasibleDetected when a location query surfaces a negative unit-gain
    cycle.  Summaries always correspond to realizable walks; minimality is
    only guaranteed when the system is feasible.
    """
    if not 1 <= h <= g.n:
        raise ValueError("h out of range")
    targets = sorted(set(sample))
    summaries: dict = {}
    intervals: dict = {}
    for t in targets:
        if not 0 <= t < g.n:
            raise ValueError("sample vertex out of range")
        lo: Optional[Rational] = None
        hi: Optional[Rational] = None
        level: list = [None] * g.n
        level[t] = (Q(0), Q(1))
        for _ in range(h):
            lines = _scan_lines(g, level)
            points: set = set()
            for cand in lines:
                if len(cand) > 1:
                    points.update(_envelope_breakpoints(cand))
            xs = sorted(
                x
                for x in points
                if (lo is None or x > lo) and (hi is None or x < hi)
            )
            while xs:
                k = len(xs) // 2
                res = locate_value(g, t, xs[k])
                if res.kind == "infeasible":
                    raise InfeasibleDetected(res.infeasibility)
                if res.below:
                    hi = xs[k]
                    xs = xs[:k]
                else:
                    lo = xs[k]
                    xs = xs[k + 1 :]
            tau = _test_point(lo, hi)
            nxt: list = [None] * g.n
            for v in range(g.n):
                best = None
                pick = None
                for line in lines[v]:
                    val = line[0] + line[1] * tau
                    if best is None or val < best:
                        best = val
                        pick = line
                nxt[v] = pick
            level = nxt
        intervals[t] = (lo, hi)
        for s in targets:
            if level[s] is not None:
                summaries[(s, t)] = level[s]
    return CompressedInstance(tuple(targets), summaries, intervals, h)


def rederive_edge_walk(g: Graph, ci: CompressedInstance, s: int, t: int) -> Optional[Walk]:
    """Rebuild a walk of G realizing the summary of compressed edge (s, t).

    The stored interval contains x^max_t and excludes every candidate-line
    crossing met during the scan, so replaying the scan with scalar
    comparisons at its test point makes identical choices; parent pointers
    then spell out the walk.  Returns None when the edge is absent.
    """
    if (s, t) not in ci.summaries:
        return None
    tau = _test_point(*ci.intervals[t])
    level: list = [None] * g.n
    level[t] = (Q(0), Q(1))
    choices = []
    for _ in range(ci.h):
        nxt: list = [None] * g.n
        taken: list = [None] * g.n
        for v in range(g.n):
            best = None
            pick = None
            eid_pick = None
            if level[v] is not None:
                best = level[v][0] + level[v][1] * tau
                pick = level[v]
                eid_pick = -1
            for eid in g.out_edges[v]:
                e = g.edges[eid]
                prev = level[e.v]
                if prev is None:
                    continue
                line = (e.cost + e.gain * prev[0], e.gain * prev[1])
                val = line[0] + line[1] * tau
                if best is None or val < best:
                    best = val
                    pick = line
                    eid_pick = eid
            nxt[v] = pick
            taken[v] = eid_pick
        level = nxt
        choices.append(taken)
    ids = []
    v = s
    for j in range(ci.h - 1, -1, -1):
        eid = choices[j][v]
        if eid != -1:
            ids.append(eid)
            v = g.edges[eid].v
    walk = g.walk(ids, start=s)
    assert (walk.summary.cost, walk.summary.gain) == ci.summaries[(s, t)]
    return walk


def solve_tradeoff(g: Graph, h: int, seed: int = 0) -> SolveOutcome:
    """Las Vegas solve with truncated phases plus a compressed dense stage.

    Phases run only while their cycle-length cap stays below roughly h, so
    per-attempt sampling work scales with h; bounds carried by longer
    cycles come from the compressed instance, solved recursively with
    solve_simple and folded back in before relaxation.  With h >= n the
    phases already cover every cycle length and the compression stage is
    skipped.  Verification decides the outcome: a verified candidate is the
    maximal solution; a candidate violating an inequality, a crossing of
    upper and lower bounds, a negative unit-gain walk in the unbounded
    part, or an infeasible compression declares Infeasible (never with a
    certificate in this mode); a merely non-maximal candidate reruns with
    fresh randomness.
    """
    if not 1 <= h <= g.n:
        raise ValueError("h out of range")
    n = g.n
    gr = _reverse_of(g)
    cache_f = _phi_cache_for(g)
    cache_r = _phi_cache_for(gr)
    full = phase_schedule(n)
    cut = 0
    while (1 << cut) < h and cut < len(full) - 1:
        cut += 1
    schedule = full[: cut + 1]
    attempt = 0
    while True:
        attempt += 1
        rng = random.Random(f"{seed}:{attempt}")

        vals_f, _, counts, cert = _sample_phases(g, rng, cache_f, schedule)
        if cert is not None:
            return SolveOutcome(False, None, None, seed, attempt, tuple(counts))
        vals_r, _, _, cert = _sample_phases(gr, rng, cache_r, schedule)
        if cert is not None:
            return SolveOutcome(False, None, None, seed, attempt, tuple(counts))

        if h < n:
            size = sample_size(n, h)
            sample = sorted(rng.sample(range(n), size))
            dense_seed = rng.randrange(1 << 62)
            if sample:
                try:
                    ci = build_compressed(g, sample, h)
                except InfeasibleDetected:
                    return SolveOutcome(False, None, None, seed, attempt, tuple(counts))
                dense = solve_simple(ci.graph(), seed=dense_seed)
                if not dense.feasible:
                    # Every compressed edge is a realizable chain of original
                    # inequalities, so the original system inherits this.
                    return SolveOutcome(False, None, None, seed, attempt, tuple(counts))
                for i, s in enumerate(ci.vertices):
                    b = dense.x[i]
                    if b.is_finite:
                        val = b.finite()
                        if vals_f[s] is None or val < vals_f[s]:
                            vals_f[s] = val

        y_fwd, _ = _propagate_record(g, vals_f, 3 * n)
        y_rev, _ = _propagate_record(gr, vals_r, 3 * n)
        crossed = any(
            y_fwd[v] is not None and y_rev[v] is not None and y_fwd[v] < -y_rev[v]
            for v in range(n)
        )
        if crossed:
            return SolveOutcome(False, None, None, seed, attempt, tuple(counts))

        unbounded = [y_fwd[v] is None for v in range(n)]
        if any(unbounded):
            members = [v for v in range(n) if unbounded[v]]
            inner = [e for e in g.edges if unbounded[e.u] and unbounded[e.v]]
            if any(unbounded[e.u] and not unbounded[e.v] for e in g.edges):
                continue
            if _gain_cycle_exists(inner, members, above_one=False):
                continue
            if _unit_gain_certificate(g, unbounded) is not None:
                return SolveOutcome(False, None, None, seed, attempt, tuple(counts))
        bounded = [v for v in range(n) if not unbounded[v]]
        if bounded:
            index = {v: i for i, v in enumerate(bounded)}
            spec = [
                (index[e.u], index[e.v], e.cost, e.gain)
                for e in g.edges
                if not unbounded[e.u] and not unbounded[e.v]
            ]
            sub = Graph.build(len(bounded), spec)
            verdict = verify_solution(sub, [y_fwd[v] for v in bounded])
            if isinstance(verdict, NotFeasible):
                return SolveOutcome(False, None, None, seed, attempt, tuple(counts))
            if isinstance(verdict, NotMaximal):
                continue
        x = tuple(POS_INF if unbounded[v] else Ext(y_fwd[v]) for v in range(n))
        return SolveOutcome(True, x, None, seed, attempt, tuple(counts))
