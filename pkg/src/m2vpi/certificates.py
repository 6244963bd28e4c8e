"""Infeasibility certificates and their exact verification.

Two shapes of evidence close a system:

* a closed walk with gain exactly 1 and negative cost: following it around
  forces x at its start below itself by a fixed negative amount;
* a bicycle: a gain > 1 closed walk forces a lower bound phi at its vertex,
  a gain < 1 closed walk forces an upper bound phi at another vertex, and a
  connecting walk transports the upper bound back so the two contradict.

verify_certificate re-derives everything from edge ids with exact
arithmetic, so a certificate is meaningful independently of the solver run
that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .core import Graph, Walk, phi


@dataclass(frozen=True)
class NegUnitGainCert:
    """A closed walk with gain 1 and cost < 0."""

    walk: Walk


@dataclass(frozen=True)
class NegBicycleCert:
    """Contradicting cycle bounds joined by a walk.

    cycle_ge (gain > 1) forces x >= phi(cycle_ge) at path.start, and
    cycle_le (gain < 1) forces x <= phi(cycle_le) at path.end; the
    certificate is valid when phi(cycle_ge) > cost(path) + gain(path) *
    phi(cycle_le).
    """

    cycle_le: Walk
    cycle_ge: Walk
    path: Walk


Certificate = Union[NegUnitGainCert, NegBicycleCert]


def _rebuild(g: Graph, w: Walk) -> Walk:
    if any(not (0 <= i < g.m) for i in w.edge_ids):
        raise ValueError("edge id out of range")
    return g.walk(w.edge_ids, start=w.start)


def verify_certificate(g: Graph, cert: Certificate) -> bool:
    """Exact re-check of a certificate against g. Never raises."""
    try:
        if isinstance(cert, NegUnitGainCert):
            w = _rebuild(g, cert.walk)
            s = w.summary
            return w.is_closed and s.length >= 1 and s.gain == 1 and s.cost < 0
        if isinstance(cert, NegBicycleCert):
            lo = _rebuild(g, cert.cycle_le)
            hi = _rebuild(g, cert.cycle_ge)
            p = _rebuild(g, cert.path)
            if not (lo.is_closed and lo.summary.length >= 1 and lo.summary.gain < 1):
                return False
            if not (hi.is_closed and hi.summary.length >= 1 and hi.summary.gain > 1):
                return False
            if p.start != hi.start or p.end != lo.start:
                return False
            transported = p.summary.cost + p.summary.gain * phi(lo.summary)
            return phi(hi.summary) > transported
        return False
    except (ValueError, IndexError):
        return False
