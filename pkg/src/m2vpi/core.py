"""Graph substrate for monotone two-variable-per-inequality systems.

A system is a directed multigraph in which every edge e = uv carries a cost
c(e) and a positive gain gamma(e), and encodes the constraint

    x_u <= c(e) + gamma(e) * x_v.

This module holds the exact arithmetic (rationals extended with +/-infinity),
the walk algebra (costs and gains compose along walks), cycle bounds, and
synchronous bound propagation. Everything downstream builds on these pieces.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

try:
    # gmpy2's mpq has the same semantics as Fraction (always normalized,
    # positive denominator) and is considerably faster in the hot loops.
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover - gmpy2 is normally available
    Q = Fraction

Rational = Q

RationalLike = Union[int, Fraction, str]

_SCALAR_TYPES = (int, Fraction) if Q is Fraction else (int, Fraction, type(Q(0)))


class NegativeUnitGain(Exception):
    """A closed walk with gain exactly 1 and negative cost was encountered.

    Such a walk is an infeasibility certificate on its own, so callers
    usually convert this into a result rather than letting it escape.
    """

    def __init__(self, summary: "WalkSummary", walk: Optional["Walk"] = None):
        super().__init__(f"negative unit-gain closed walk: cost={summary.cost}")
        self.summary = summary
        self.walk = walk


class ParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


_FINITE = 0
_POS = 1
_NEG = -1


class Ext:
    """A rational extended with +infinity / -infinity.

    Arithmetic follows the order rules (finite + inf = inf, positive * inf =
    inf, ...). Indeterminate forms such as inf - inf or 0 * inf raise
    ArithmeticError instead of producing a value silently.
    """

    __slots__ = ("kind", "value")

    def __init__(self, value: RationalLike = 0, kind: int = _FINITE):
        self.kind = kind
        self.value = Q(value) if kind == _FINITE else None

    @staticmethod
    def of(x: Union["Ext", RationalLike]) -> "Ext":
        if isinstance(x, Ext):
            return x
        return Ext(x)

    @property
    def is_finite(self) -> bool:
        return self.kind == _FINITE

    @property
    def is_pos_inf(self) -> bool:
        return self.kind == _POS

    @property
    def is_neg_inf(self) -> bool:
        return self.kind == _NEG

    def finite(self) -> Rational:
        """The underlying rational; raises if infinite."""
        if self.kind != _FINITE:
            raise ArithmeticError(f"expected a finite value, got {self}")
        return self.value

    def __add__(self, other):
        other = Ext.of(other)
        if self.kind == _FINITE and other.kind == _FINITE:
            return Ext(self.value + other.value)
        if self.kind == _FINITE:
            return other
        if other.kind == _FINITE or other.kind == self.kind:
            return self
        raise ArithmeticError("inf - inf")

    __radd__ = __add__

    def __neg__(self):
        if self.kind == _FINITE:
            return Ext(-self.value)
        return Ext(0, -self.kind)

    def __sub__(self, other):
        return self + (-Ext.of(other))

    def __rsub__(self, other):
        return Ext.of(other) + (-self)

    def __mul__(self, other):
        other = Ext.of(other)
        if self.kind == _FINITE and other.kind == _FINITE:
            return Ext(self.value * other.value)
        a, b = self, other
        if a.kind == _FINITE:
            a, b = b, a
        # a is infinite
        sign = b.value > 0 if b.kind == _FINITE else b.kind > 0
        if b.kind == _FINITE and b.value == 0:
            raise ArithmeticError("0 * inf")
        return Ext(0, a.kind if sign else -a.kind)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Ext.of(other)
        if other.kind != _FINITE:
            raise ArithmeticError("division by an infinite value")
        if other.value == 0:
            raise ZeroDivisionError("division by zero")
        if self.kind == _FINITE:
            return Ext(self.value / other.value)
        return Ext(0, self.kind if other.value > 0 else -self.kind)

    def _key(self):
        if self.kind == _FINITE:
            return (0, self.value)
        return (self.kind, 0)

    def __lt__(self, other):
        other = Ext.of(other)
        return self._key() < other._key()

    def __le__(self, other):
        other = Ext.of(other)
        return self._key() <= other._key()

    def __gt__(self, other):
        other = Ext.of(other)
        return self._key() > other._key()

    def __ge__(self, other):
        other = Ext.of(other)
        return self._key() >= other._key()

    def __eq__(self, other):
        if isinstance(other, _SCALAR_TYPES):
            other = Ext(other)
        if not isinstance(other, Ext):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.kind == _POS:
            return "inf"
        if self.kind == _NEG:
            return "-inf"
        return str(self.value)


POS_INF = Ext(0, _POS)
NEG_INF = Ext(0, _NEG)

Bounds = list  # list[Ext], one entry per vertex


@dataclass(frozen=True)
class Edge:
    id: int
    u: int
    v: int
    cost: Rational
    gain: Rational

    def __post_init__(self):
        if self.gain <= 0:
            raise ValueError(f"edge {self.id}: gain must be positive, got {self.gain}")


@dataclass(frozen=True)
class WalkSummary:
    """(cost, gain, length) of a walk; the empty walk is (0, 1, 0)."""

    cost: Rational
    gain: Rational
    length: int

    def __post_init__(self):
        if self.gain <= 0:
            raise ValueError("walk gain must be positive")


EMPTY_SUMMARY = WalkSummary(Q(0), Q(1), 0)


def compose(a: WalkSummary, b: WalkSummary) -> WalkSummary:
    """Summary of the concatenation: cost a.cost + a.gain*b.cost, gain product."""
    return WalkSummary(a.cost + a.gain * b.cost, a.gain * b.gain, a.length + b.length)


def cycle_bound(s: WalkSummary) -> Ext:
    """The bound phi = cost/(1 - gain) implied by a closed walk.

    For gain < 1 this is an upper bound on x at the walk's start vertex, for
    gain > 1 a lower bound. gain = 1 with nonnegative cost implies nothing
    (+inf); gain = 1 with negative cost raises NegativeUnitGain, since that
    closed walk certifies infeasibility by itself.
    """
    if s.length < 1:
        raise ValueError("cycle_bound needs a nonempty closed walk")
    if s.gain == 1:
        if s.cost < 0:
            raise NegativeUnitGain(s)
        return POS_INF
    return Ext(s.cost / (1 - s.gain))


def phi(s: WalkSummary) -> Rational:
    """cost/(1 - gain) as a plain rational; caller guarantees gain != 1."""
    return s.cost / (1 - s.gain)


class Walk:
    """A walk stored as a sequence of edge ids with its summary cached.

    The empty walk needs an anchor vertex, hence start is always stored.
    """

    __slots__ = ("edge_ids", "start", "end", "summary")

    def __init__(self, g: "Graph", edge_ids: Sequence[int], start: Optional[int] = None):
        self.edge_ids = tuple(edge_ids)
        if not self.edge_ids:
            if start is None:
                raise ValueError("an empty walk needs an explicit start vertex")
            self.start = start
            self.end = start
            self.summary = EMPTY_SUMMARY
            return
        edges = [g.edges[i] for i in self.edge_ids]
        if start is not None and edges[0].u != start:
            raise ValueError("walk start does not match first edge tail")
        for a, b in zip(edges, edges[1:]):
            if a.v != b.u:
                raise ValueError(f"edges {a.id} and {b.id} do not chain")
        self.start = edges[0].u
        self.end = edges[-1].v
        s = EMPTY_SUMMARY
        for e in edges:
            s = compose(s, WalkSummary(e.cost, e.gain, 1))
        self.summary = s

    @property
    def is_closed(self) -> bool:
        return self.start == self.end

    def __len__(self):
        return len(self.edge_ids)

    def __repr__(self):
        return f"Walk({self.start}->{self.end}, edges={list(self.edge_ids)})"


class Graph:
    """Immutable directed multigraph with per-edge cost and gain.

    Vertices are 0-indexed internally. Edge ids equal input positions and
    double as the fixed tie-breaking order used by the location procedures.
    """

    def __init__(self, n: int, edges: Sequence[Edge], dmdp: bool = False):
        if n < 1:
            raise ValueError("need at least one vertex")
        self.n = n
        self.edges = tuple(edges)
        self.m = len(self.edges)
        self.dmdp = dmdp
        for e in self.edges:
            if not (0 <= e.u < n and 0 <= e.v < n):
                raise ValueError(f"edge {e.id}: endpoint out of range")
            if dmdp and e.gain >= 1:
                raise ValueError(f"edge {e.id}: dmdp mode requires gain < 1")
        out: list[list[int]] = [[] for _ in range(n)]
        inc: list[list[int]] = [[] for _ in range(n)]
        for e in self.edges:
            out[e.u].append(e.id)
            inc[e.v].append(e.id)
        self.out_edges = tuple(tuple(ids) for ids in out)
        self.in_edges = tuple(tuple(ids) for ids in inc)
        self._arrays = None

    @staticmethod
    def build(n: int, spec: Iterable[tuple], dmdp: bool = False) -> "Graph":
        """Build from (u, v, cost, gain) tuples, 0-indexed vertices."""
        edges = [
            Edge(i, u, v, Q(c), Q(g))
            for i, (u, v, c, g) in enumerate(spec)
        ]
        return Graph(n, edges, dmdp=dmdp)

    def reverse(self) -> "Graph":
        """The reverse instance: edge uv becomes vu with c' = c/g, g' = 1/g.

        x_u <= c + g*x_v is equivalent to -x_v <= c/g + (1/g)*(-x_u), so the
        reverse instance is the same system in the variables z = -x: z is
        feasible for the reverse instance iff -z is feasible here.  Reversing
        a walk P gives a reverse-instance walk P' with c'(P') = c(P)/gamma(P)
        and gamma'(P') = 1/gamma(P); cycle bounds negate, phi'(C') = -phi(C),
        and gain < 1 cycles there are gain > 1 cycles here.  Consequently an
        upper bound y on z_v computed in the reverse instance is the lower
        bound x_v >= -y, and any infeasibility certificate of the reverse
        instance maps to one of this instance by reversing each walk's edge-id
        sequence.  Edge ids are kept.
        """
        edges = [
            Edge(e.id, e.v, e.u, e.cost / e.gain, 1 / e.gain) for e in self.edges
        ]
        return Graph(self.n, edges, dmdp=False)

    def walk(self, edge_ids: Sequence[int], start: Optional[int] = None) -> Walk:
        return Walk(self, edge_ids, start=start)

    def summary_of(self, edge_ids: Sequence[int]) -> WalkSummary:
        s = EMPTY_SUMMARY
        for i in edge_ids:
            e = self.edges[i]
            s = compose(s, WalkSummary(e.cost, e.gain, 1))
        return s

    def arrays(self):
        """Parallel (tails, heads, costs, gains) lists, cached.

        The synchronous relaxation loops run once per edge per step; plain
        lists keep them free of attribute lookups.
        """
        if self._arrays is None:
            self._arrays = (
                [e.u for e in self.edges],
                [e.v for e in self.edges],
                [e.cost for e in self.edges],
                [e.gain for e in self.edges],
            )
        return self._arrays


def propagate(g: Graph, bounds: Bounds, steps: int) -> Bounds:
    """Tighten upper bounds through walks of length <= steps.

    result_s = min over walks P from s with <= steps edges of
    c(P) + gamma(P) * bounds_end(P). Each step is a full synchronous pass: the
    previous vector is frozen and every edge relaxes against it, so exactly
    the walks of length <= k are accounted for after k steps (in-place
    relaxation would mix in longer walks).
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    y = list(bounds)
    for _ in range(steps):
        prev = y
        y = list(prev)
        for e in g.edges:
            cand = e.cost + e.gain * prev[e.v]
            if cand < y[e.u]:
                y[e.u] = cand
    return y


@dataclass(frozen=True)
class Feasible:
    pass


@dataclass(frozen=True)
class Violated:
    edge_id: int


def evaluate_solution(g: Graph, x: Bounds) -> Union[Feasible, Violated]:
    """Check every inequality x_u <= c + gamma*x_v exactly; x must be finite.

    Returns the smallest violated edge id for determinism.
    """
    for v in x:
        if not Ext.of(v).is_finite:
            raise ValueError("evaluate_solution expects finite values")
    for e in g.edges:
        if Ext.of(x[e.u]) > e.cost + e.gain * Ext.of(x[e.v]):
            return Violated(e.id)
    return Feasible()


def parse_rational(tok: str) -> Rational:
    return Q(Fraction(tok))


def format_rational(q) -> str:
    return str(q)


def parse_instance(text: str) -> Graph:
    """Parse the instance text format.

    Line 1: ``m2vpi <n> <m>`` or ``dmdp <n> <m>`` (dmdp validates gain < 1).
    Then m lines ``<u> <v> <c> <g>`` with 1-indexed vertices and rationals
    written ``p/q`` or as integers. ``#`` starts a comment.
    """
    header = None
    rows = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 3 or parts[0] not in ("m2vpi", "dmdp"):
                raise ParseError(line_no, "expected header 'm2vpi <n> <m>' or 'dmdp <n> <m>'")
            try:
                n, m = int(parts[1]), int(parts[2])
            except ValueError:
                raise ParseError(line_no, "n and m must be integers") from None
            if n < 1 or m < 0:
                raise ParseError(line_no, "need n >= 1 and m >= 0")
            header = (parts[0], n, m)
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ParseError(line_no, "expected '<u> <v> <c> <g>'")
        try:
            u, v = int(parts[0]), int(parts[1])
            c, gn = parse_rational(parts[2]), parse_rational(parts[3])
        except (ValueError, ZeroDivisionError):
            raise ParseError(line_no, f"malformed edge line {line!r}") from None
        if not (1 <= u <= header[1] and 1 <= v <= header[1]):
            raise ParseError(line_no, "vertex index out of range")
        if gn <= 0:
            raise ParseError(line_no, "gain must be positive")
        if header[0] == "dmdp" and gn >= 1:
            raise ParseError(line_no, "dmdp instance requires gain < 1")
        rows.append((u - 1, v - 1, c, gn))
    if header is None:
        raise ParseError(0, "empty instance")
    if len(rows) != header[2]:
        raise ParseError(0, f"header declares m={header[2]} but found {len(rows)} edges")
    return Graph.build(header[1], rows, dmdp=(header[0] == "dmdp"))


def format_instance(g: Graph) -> str:
    lines = [f"{'dmdp' if g.dmdp else 'm2vpi'} {g.n} {g.m}"]
    for e in g.edges:
        lines.append(f"{e.u + 1} {e.v + 1} {format_rational(e.cost)} {format_rational(e.gain)}")
    return "\n".join(lines) + "\n"
