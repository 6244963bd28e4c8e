"""Coarse work counters for benchmark reporting.

Solver modules bump these at aggregation points (once per sweep or phase,
never inside inner loops), so the overhead is negligible and the counts
reflect the dominant work terms: edge relaxations performed, locate calls
answered, k-cycle evaluations requested.
"""

from collections import Counter

__all__ = ["bump", "reset", "snapshot"]

_COUNTS: Counter = Counter()


def bump(key: str, amount: int = 1) -> None:
    _COUNTS[key] += amount


def snapshot() -> dict:
    return {k: int(v) for k, v in _COUNTS.items()}


def reset() -> None:
    _COUNTS.clear()
