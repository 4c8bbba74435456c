"""Functions given by knots with one-sided limits and segments in between.

A :class:`KnotFunction` stores, at every knot ``t``, the left limit, the
value and the right limit, so jumps on either side are explicit.  Between two
knots the function is linear (from the right limit of the first knot to the
left limit of the next) unless a :class:`Curve` is attached to the segment.
"""

from __future__ import annotations

import bisect
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ._num import EPS, DomainError, lerp


@dataclass(frozen=True)
class Curve:
    """Sum of terms ``c * (a + b*t)**e`` with real exponents ``e >= 0``.

    Terms are given as ``(c, e)`` or ``(c, e, a, b)``; the short form means
    ``a = 0, b = 1``.  The base ``a + b*t`` must stay non-negative on the
    segment the curve is attached to whenever ``e`` is not an integer.
    """

    terms: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        merged: dict[tuple[float, float, float], float] = {}
        for term in self.terms:
            c, e, a, b = (tuple(float(v) for v in term) + (0.0, 1.0))[:4]
            if e < 0:
                raise DomainError("curve exponents must be non-negative")
            key = (e, 0.0, 0.0) if e == 0 else (e, a, b)
            merged[key] = merged.get(key, 0.0) + c
        object.__setattr__(
            self,
            "terms",
            tuple((c, e, a, b) for (e, a, b), c in sorted(merged.items()) if c != 0.0),
        )

    def __call__(self, t: float) -> float:
        return sum(c * (1.0 if e == 0 else (a + b * t) ** e) for c, e, a, b in self.terms)

    def primitive(self, t: float) -> float:
        total = 0.0
        for c, e, a, b in self.terms:
            if e == 0:
                total += c * t
            else:
                total += c * (a + b * t) ** (e + 1) / ((e + 1) * b)
        return total

    def derivative(self, t: float) -> float:
        total = 0.0
        for c, e, a, b in self.terms:
            if e == 0:
                continue
            base = a + b * t
            if e < 1 and base == 0:
                return math.copysign(math.inf, c * b)
            total += c * e * b * base ** (e - 1)
        return total

    def second_derivative(self, t: float) -> float:
        total = 0.0
        for c, e, a, b in self.terms:
            if e in (0.0, 1.0):
                continue
            base = a + b * t
            if e < 2 and base == 0:
                return math.copysign(math.inf, c * e * (e - 1))
            total += c * e * (e - 1) * b * b * base ** (e - 2)
        return total

    def is_affine(self) -> bool:
        return all(abs(c) <= EPS for c, e, _, _ in self.terms if e not in (0.0, 1.0))

    def slope(self) -> float:
        return sum(c * b for c, e, _, b in self.terms if e == 1.0)

    def shifted(self, const: float = 0.0, sign: float = 1.0, reflect: float | None = None) -> Curve:
        """``const + sign * self(t)``, or ``const + sign * self(reflect - t)``."""
        terms = []
        for c, e, a, b in self.terms:
            if reflect is not None:
                a, b = a + b * reflect, -b
            terms.append((sign * c, e, a, b))
        if const:
            terms.append((const, 0.0))
        return Curve(tuple(terms))

    def to_json(self) -> dict:
        return {"terms": [list(t) for t in self.terms]}


@dataclass(frozen=True)
class Knot:
    t: float
    left: float
    value: float
    right: float


class KnotFunction:
    """Piecewise function with explicit one-sided limits at its knots."""

    def __init__(self, knots: Sequence[Knot], curves: Sequence[Curve | None] | None = None):
        knots = tuple(knots)
        if len(knots) < 2:
            raise DomainError("at least two knots are required")
        for k in knots:
            if not all(math.isfinite(v) for v in (k.t, k.left, k.value, k.right)):
                raise DomainError("knots must be finite")
        for a, b in zip(knots, knots[1:]):
            if not b.t > a.t + EPS:
                raise DomainError("knots must be strictly increasing")
        curves = tuple(curves) if curves is not None else (None,) * (len(knots) - 1)
        if len(curves) != len(knots) - 1:
            raise DomainError("need one segment per pair of consecutive knots")
        for j, c in enumerate(curves):
            if c is None:
                continue
            a, b = knots[j], knots[j + 1]
            scale = 1e-7 * max(1.0, abs(a.right), abs(b.left))
            if abs(c(a.t) - a.right) > scale or abs(c(b.t) - b.left) > scale:
                raise DomainError(f"curve on segment {j} does not match its knot limits")
        self.knots: tuple[Knot, ...] = knots
        self.curves: tuple[Curve | None, ...] = curves
        self._ts = [k.t for k in knots]

    # -- evaluation -------------------------------------------------------
    @property
    def lo(self) -> float:
        return self.knots[0].t

    @property
    def hi(self) -> float:
        return self.knots[-1].t

    def knot_index(self, t: float) -> int | None:
        i = bisect.bisect_left(self._ts, t - EPS)
        if i < len(self._ts) and abs(self._ts[i] - t) <= EPS:
            return i
        return None

    def segment_index(self, t: float) -> int:
        """Index j of the segment (t_j, t_{j+1}) containing ``t``."""
        j = bisect.bisect_right(self._ts, t) - 1
        return min(max(j, 0), len(self.knots) - 2)

    def segment_value(self, j: int, t: float) -> float:
        c = self.curves[j]
        if c is not None:
            return c(t)
        a, b = self.knots[j], self.knots[j + 1]
        return lerp(a.t, b.t, a.right, b.left, t)

    def __call__(self, t: float) -> float:
        if t < self.lo - EPS:
            return self.knots[0].left
        if t > self.hi + EPS:
            return self.knots[-1].right
        i = self.knot_index(t)
        if i is not None:
            return self.knots[i].value
        return self.segment_value(self.segment_index(t), t)

    def left_limit(self, t: float) -> float:
        if t <= self.lo + EPS:
            return self.knots[0].left
        if t > self.hi + EPS:
            return self.knots[-1].right
        i = self.knot_index(t)
        if i is not None:
            return self.knots[i].left
        return self.segment_value(self.segment_index(t), t)

    def right_limit(self, t: float) -> float:
        if t < self.lo - EPS:
            return self.knots[0].left
        if t >= self.hi - EPS:
            return self.knots[-1].right
        i = self.knot_index(t)
        if i is not None:
            return self.knots[i].right
        return self.segment_value(self.segment_index(t), t)

    def vectorized(self, ts: np.ndarray) -> np.ndarray:
        """Pointwise values on an array (knot values at knots)."""
        ts = np.asarray(ts, dtype=float)
        out = np.empty_like(ts)
        out[ts < self.lo] = self.knots[0].left
        out[ts > self.hi] = self.knots[-1].right
        for j, c in enumerate(self.curves):
            a, b = self.knots[j], self.knots[j + 1]
            m = (ts > a.t) & (ts < b.t)
            if c is None:
                out[m] = a.right + (b.left - a.right) * (ts[m] - a.t) / (b.t - a.t)
            else:
                out[m] = sum(
                    cf * (1.0 if e == 0 else (ca + cb * ts[m]) ** e) for cf, e, ca, cb in c.terms
                )
        for k in self.knots:
            out[np.abs(ts - k.t) <= 1e-12] = k.value
        return out

    # -- calculus ---------------------------------------------------------
    def segment_integral(self, j: int, a: float, b: float) -> float:
        c = self.curves[j]
        if c is not None:
            return c.primitive(b) - c.primitive(a)
        return 0.5 * (self.segment_value(j, a) + self.segment_value(j, b)) * (b - a)

    def integral(self, a: float, b: float) -> float:
        total = 0.0
        for j in range(len(self.knots) - 1):
            lo, hi = max(a, self._ts[j]), min(b, self._ts[j + 1])
            if hi > lo:
                total += self.segment_integral(j, lo, hi)
        return total

    def segment_slope(self, j: int) -> float | None:
        """Slope of segment j, or None when it is curved."""
        c = self.curves[j]
        if c is not None:
            return c.slope() if c.is_affine() else None
        a, b = self.knots[j], self.knots[j + 1]
        return (b.left - a.right) / (b.t - a.t)

    # -- structure --------------------------------------------------------
    @staticmethod
    def _same_slope(s1: float, s2: float) -> bool:
        return abs(s1 - s2) <= EPS * max(1.0, abs(s1), abs(s2))

    def is_continuous_at(self, i: int) -> bool:
        k = self.knots[i]
        return abs(k.left - k.value) <= EPS and abs(k.right - k.value) <= EPS

    def is_affine_on(self, c: float, d: float) -> bool:
        """True when the function agrees with one affine map on all of [c, d]."""
        if d - c <= EPS:
            return True
        j0, j1 = self.segment_index(c + EPS), self.segment_index(d - EPS)
        slopes = [self.segment_slope(j) for j in range(j0, j1 + 1)]
        if any(s is None for s in slopes):
            return False
        if any(not self._same_slope(slopes[0], s) for s in slopes[1:]):
            return False
        for i, k in enumerate(self.knots):
            if c + EPS < k.t < d - EPS and not self.is_continuous_at(i):
                return False
            if abs(k.t - c) <= EPS and abs(k.value - k.right) > EPS:
                return False
            if abs(k.t - d) <= EPS and abs(k.value - k.left) > EPS:
                return False
        return True

    def affine_runs(self) -> list[tuple[float, float]]:
        """Maximal open intervals on which the function is continuous and affine."""
        runs: list[tuple[float, float]] = []
        prev: float | None = None
        for j in range(len(self.knots) - 1):
            s = self.segment_slope(j)
            if s is None:
                prev = None
                continue
            if prev is not None and self.is_continuous_at(j) and self._same_slope(prev, s):
                runs[-1] = (runs[-1][0], self._ts[j + 1])
            else:
                runs.append((self._ts[j], self._ts[j + 1]))
            prev = s
        return runs

    def to_json(self) -> dict:
        out: dict = {
            "knots": [
                {"t": k.t, "left": k.left, "value": k.value, "right": k.right} for k in self.knots
            ]
        }
        if any(c is not None for c in self.curves):
            out["segments"] = [None if c is None else c.to_json() for c in self.curves]
        return out

    def __repr__(self) -> str:
        return f"{type(self).__name__}({len(self.knots)} knots)"


class ValueMap(KnotFunction):
    """Increasing piecewise-linear map on the real line (jumps allowed).

    Outside ``[lo, hi]`` it is extended by the left limit of the first knot
    and the right limit of the last one.
    """

    def __init__(self, knots: Sequence[Knot]):
        super().__init__(knots)
        prev = -math.inf
        for k in self.knots:
            if not (prev - EPS <= k.left <= k.value + EPS and k.value <= k.right + EPS):
                raise DomainError(f"map is not increasing at {k.t}")
            prev = k.right

    @classmethod
    def from_points(cls, xs: Sequence[float], ys: Sequence[float]) -> ValueMap:
        """Continuous map through the points (xs[i], ys[i])."""
        return cls([Knot(x, y, y, y) for x, y in zip(xs, ys)])

    @classmethod
    def from_monofn(cls, g) -> ValueMap:
        """The left-continuous function ``g`` on [0, 1] viewed as a value map."""
        ps = g.pieces
        ks = [Knot(0.0, ps[0][2], ps[0][2], ps[0][2])]
        for prev, nxt in zip(ps, ps[1:]):
            ks.append(Knot(prev[1], prev[3], prev[3], nxt[2]))
        ks.append(Knot(1.0, ps[-1][3], ps[-1][3], ps[-1][3]))
        return cls(ks)

    @classmethod
    def identity(cls, lo: float = 0.0, hi: float = 1.0) -> ValueMap:
        return cls([Knot(lo, lo, lo, lo), Knot(hi, hi, hi, hi)])
