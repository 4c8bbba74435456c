"""Piece lists ``(t0, t1, v0, v1)`` partitioning [0, 1], shared by PLRV and MonoFn."""

from __future__ import annotations

import bisect
import math
from collections.abc import Iterable, Sequence

from ._num import EPS, DomainError, lerp

Piece = tuple[float, float, float, float]


def validate(raw: Iterable[Sequence[float]]) -> list[Piece]:
    pieces = [tuple(float(c) for c in p) for p in raw]
    if not pieces:
        raise DomainError("at least one piece is required")
    out: list[Piece] = []
    for k, p in enumerate(pieces):
        if len(p) != 4:
            raise DomainError(f"piece {k} must have 4 entries (t0, t1, v0, v1)")
        if not all(math.isfinite(c) for c in p):
            raise DomainError(f"piece {k} has non-finite entries")
        t0, t1, v0, v1 = p
        if k == 0:
            if abs(t0) > EPS:
                raise DomainError("pieces must start at 0")
            t0 = 0.0
        else:
            prev = out[-1][1]
            if t0 > prev + EPS:
                raise DomainError(f"gap between pieces {k - 1} and {k}")
            if t0 < prev - EPS:
                raise DomainError(f"overlap between pieces {k - 1} and {k}")
            t0 = prev
        if k == len(pieces) - 1:
            if abs(t1 - 1.0) > EPS:
                raise DomainError("pieces must end at 1")
            t1 = 1.0
        if not t1 > t0:
            raise DomainError(f"piece {k} has t1 <= t0")
        out.append((t0, t1, v0, v1))
    return out


def merge(pieces: Sequence[Piece], tol: float = EPS) -> tuple[Piece, ...]:
    """Merge adjacent pieces that are continuous and collinear."""
    out: list[Piece] = []
    for p in pieces:
        if out:
            t0, t1, v0, v1 = out[-1]
            s0, s1, w0, w1 = p
            if abs(v1 - w0) <= tol and abs(lerp(t0, s1, v0, w1, t1) - v1) <= tol:
                out[-1] = (t0, s1, v0, w1)
                continue
        out.append(p)
    return tuple(out)


def knots(pieces: Sequence[Piece]) -> list[float]:
    return [p[0] for p in pieces] + [pieces[-1][1]]


def locate(pieces: Sequence[Piece], t: float, side: str) -> int:
    """Index of the piece that governs ``t`` from the given side.

    ``side='left'`` picks the piece with t0 < t <= t1 (left limit),
    ``side='right'`` the piece with t0 <= t < t1 (right limit).  Knots
    within EPS of ``t`` are treated as hits.
    """
    ends = [p[1] for p in pieces]
    if side == "left":
        i = bisect.bisect_left(ends, t - EPS)
        return min(i, len(pieces) - 1)
    starts = [p[0] for p in pieces]
    i = bisect.bisect_right(starts, t + EPS) - 1
    return max(i, 0)


def value_at(pieces: Sequence[Piece], t: float, side: str) -> float:
    t0, t1, v0, v1 = pieces[locate(pieces, t, side)]
    if abs(t - t0) <= EPS:
        return v0
    if abs(t - t1) <= EPS:
        return v1
    return lerp(t0, t1, v0, v1, t)


def integral(pieces: Sequence[Piece], a: float = 0.0, b: float = 1.0) -> float:
    total = 0.0
    for t0, t1, v0, v1 in pieces:
        lo, hi = max(t0, a), min(t1, b)
        if hi > lo:
            total += 0.5 * (lerp(t0, t1, v0, v1, lo) + lerp(t0, t1, v0, v1, hi)) * (hi - lo)
    return total


def refine(breaks: Iterable[float]) -> list[float]:
    """Sorted, de-duplicated breakpoints in [0, 1] (always containing 0 and 1)."""
    pts = sorted({0.0, 1.0, *(min(max(b, 0.0), 1.0) for b in breaks)})
    out = [pts[0]]
    for t in pts[1:]:
        if t - out[-1] > EPS:
            out.append(t)
        elif t == 1.0:
            out[-1] = 1.0
    return out


def restrict(pieces: Sequence[Piece], s0: float, s1: float) -> tuple[float, float]:
    """Values at the ends of [s0, s1], a sub-interval of a single piece."""
    t0, t1, v0, v1 = pieces[locate(pieces, 0.5 * (s0 + s1), "right")]
    return lerp(t0, t1, v0, v1, s0), lerp(t0, t1, v0, v1, s1)


def product_integral(
    a: Sequence[Piece], b: Sequence[Piece], lo: float = 0.0, hi: float = 1.0
) -> float:
    """Exact integral of the product of two piece lists over [lo, hi]."""
    grid = refine([*knots(a), *knots(b), lo, hi])
    total = 0.0
    for s0, s1 in zip(grid, grid[1:]):
        if s0 < lo - EPS or s1 > hi + EPS:
            continue
        a0, a1 = restrict(a, s0, s1)
        b0, b1 = restrict(b, s0, s1)
        am, bm = 0.5 * (a0 + a1), 0.5 * (b0 + b1)
        # Simpson's rule is exact for the quadratic product.
        total += (s1 - s0) * (a0 * b0 + 4.0 * am * bm + a1 * b1) / 6.0
    return total
