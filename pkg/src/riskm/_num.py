"""Shared tolerance, errors and small numeric helpers."""

from __future__ import annotations

import bisect
from collections.abc import Iterable, Sequence

EPS = 1e-9


class DomainError(ValueError):
    """Input outside the domain of an operation, or an invalid object."""


def close(a: float, b: float, tol: float = EPS) -> bool:
    return abs(a - b) <= tol


def cluster(values: Iterable[float], tol: float = EPS) -> list[float]:
    """Sorted representatives of ``values`` with near-duplicates merged.

    Consecutive sorted values closer than ``tol`` collapse onto the first one.
    """
    out: list[float] = []
    for v in sorted(values):
        if not out or v - out[-1] > tol:
            out.append(v)
    return out


def snap(v: float, reps: Sequence[float], tol: float = EPS) -> float:
    """Return the representative in ``reps`` within ``tol`` of ``v`` (else ``v``)."""
    i = bisect.bisect_left(reps, v - tol)
    if i < len(reps) and abs(reps[i] - v) <= tol:
        return reps[i]
    return v


def snap_index(v: float, reps: Sequence[float], tol: float = EPS) -> int:
    i = bisect.bisect_left(reps, v - tol)
    if i < len(reps) and abs(reps[i] - v) <= tol:
        return i
    raise KeyError(v)


def lerp(t0: float, t1: float, v0: float, v1: float, t: float) -> float:
    if t1 == t0:
        return v0
    return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
