"""Closed index sets, left-continuous monotone functions and the maps between them.

``v_map`` sends a closed set K to ``p -> sup((0, p) & K)`` and ``psi`` sends a
monotone function to its set of points of strict increase.  Closed sets are
compared modulo the boundary points {0, 1}.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from . import _pieces
from ._knots import Knot, KnotFunction, ValueMap
from ._num import EPS, DomainError, close

__all__ = [
    "ClosedSet",
    "MonoFn",
    "gaps",
    "v_map",
    "psi",
    "precedes",
    "factor",
    "lc_normalize",
    "var_additivity_condition",
]


class ClosedSet:
    """Finite union of disjoint closed subintervals of [0, 1]."""

    __slots__ = ("intervals",)

    def __init__(self, intervals: Iterable[Sequence[float]] = ()):
        ivs = []
        for iv in intervals:
            a, b = (float(v) for v in iv)
            if a > b + EPS:
                raise DomainError(f"interval [{a}, {b}] has a > b")
            if a < -EPS or b > 1 + EPS:
                raise DomainError(f"interval [{a}, {b}] is not inside [0, 1]")
            a, b = min(max(a, 0.0), 1.0), min(max(b, a, 0.0), 1.0)
            ivs.append((a, b))
        ivs.sort()
        merged: list[tuple[float, float]] = []
        for a, b in ivs:
            if merged and a <= merged[-1][1] + EPS:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        self.intervals: tuple[tuple[float, float], ...] = tuple(merged)

    @classmethod
    def points(cls, *ps: float) -> ClosedSet:
        return cls([(p, p) for p in ps])

    @classmethod
    def interval(cls, a: float, b: float) -> ClosedSet:
        return cls([(a, b)])

    @classmethod
    def full(cls) -> ClosedSet:
        return cls([(0.0, 1.0)])

    @classmethod
    def complement_of(cls, opens: Iterable[tuple[float, float]]) -> ClosedSet:
        """[0, 1] minus a union of disjoint open intervals."""
        out = []
        cursor = 0.0
        for a, b in sorted(opens):
            if a >= cursor - EPS:
                out.append((cursor, max(a, cursor)))
            cursor = max(cursor, b)
        if cursor <= 1.0:
            out.append((cursor, 1.0))
        return cls(out)

    def canonical(self) -> tuple[tuple[float, float], ...]:
        """Intervals with the isolated boundary points {0} and {1} dropped."""
        return tuple(
            (a, b)
            for a, b in self.intervals
            if not (b - a <= EPS and (a <= EPS or b >= 1 - EPS))
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ClosedSet):
            return NotImplemented
        x, y = self.canonical(), other.canonical()
        return len(x) == len(y) and all(
            close(a, c) and close(b, d) for (a, b), (c, d) in zip(x, y)
        )

    __hash__ = None  # type: ignore[assignment]

    def __contains__(self, p: float) -> bool:
        return any(a - EPS <= p <= b + EPS for a, b in self.intervals)

    def issubset(self, other: ClosedSet) -> bool:
        """Containment modulo {0, 1}."""
        return all(
            any(c - EPS <= a and b <= d + EPS for c, d in other.intervals)
            for a, b in self.canonical()
        )

    def is_empty(self) -> bool:
        return not self.canonical()

    def gaps(self) -> list[tuple[float, float]]:
        return gaps(self)

    def endpoints(self) -> list[float]:
        return sorted({v for iv in self.intervals for v in iv})

    def to_json(self) -> dict:
        return {"intervals": [[a, b] for a, b in self.intervals]}

    @classmethod
    def from_json(cls, obj: dict) -> ClosedSet:
        if not isinstance(obj, dict) or "intervals" not in obj:
            raise DomainError("closed set JSON needs an 'intervals' list")
        return cls(obj["intervals"])

    def __repr__(self) -> str:
        body = " u ".join(f"{{{a:g}}}" if a == b else f"[{a:g},{b:g}]" for a, b in self.intervals)
        return f"ClosedSet({body or 'empty'})"


@dataclass(frozen=True, eq=False)
class MonoFn:
    """Increasing piecewise-linear function on [0, 1] in the class of
    functions right-continuous at 0 and left-continuous on (0, 1].

    Jumps live between pieces; the value at an interior knot is the left
    limit and the value at 0 is the right limit.
    """

    pieces: tuple[tuple[float, float, float, float], ...]

    def __post_init__(self) -> None:
        ps = _pieces.validate(self.pieces)
        prev = None
        for t0, t1, v0, v1 in ps:
            if v1 < v0 - EPS or (prev is not None and v0 < prev - EPS):
                raise DomainError("monotone function must be increasing")
            prev = v1
        object.__setattr__(self, "pieces", _pieces.merge(ps))

    @classmethod
    def identity(cls) -> MonoFn:
        return cls(((0.0, 1.0, 0.0, 1.0),))

    @classmethod
    def constant(cls, c: float) -> MonoFn:
        return cls(((0.0, 1.0, c, c),))

    @classmethod
    def step(cls, breaks: Sequence[float], levels: Sequence[float]) -> MonoFn:
        """levels[0] on [0, breaks[0]], levels[i] on (breaks[i-1], breaks[i]], ..."""
        if len(levels) != len(breaks) + 1:
            raise DomainError("need one more level than breaks")
        ts = [0.0, *breaks, 1.0]
        return cls(tuple((ts[i], ts[i + 1], v, v) for i, v in enumerate(levels)))

    def __call__(self, p: float) -> float:
        return _pieces.value_at(self.pieces, p, "left")

    def left(self, p: float) -> float:
        return _pieces.value_at(self.pieces, p, "left")

    def right(self, p: float) -> float:
        return _pieces.value_at(self.pieces, p, "right")

    def knots(self) -> list[float]:
        return _pieces.knots(self.pieces)

    def integral(self, a: float = 0.0, b: float = 1.0) -> float:
        return _pieces.integral(self.pieces, a, b)

    def is_step(self) -> bool:
        return all(abs(v1 - v0) <= EPS for _, _, v0, v1 in self.pieces)

    def equals(self, other: MonoFn, tol: float = EPS) -> bool:
        """Equality almost everywhere."""
        grid = _pieces.refine([*self.knots(), *other.knots()])
        for s0, s1 in zip(grid, grid[1:]):
            a = _pieces.restrict(self.pieces, s0, s1)
            b = _pieces.restrict(other.pieces, s0, s1)
            if abs(a[0] - b[0]) > tol or abs(a[1] - b[1]) > tol:
                return False
        return True

    def to_json(self) -> dict:
        return {"pieces": [{"t0": a, "t1": b, "v0": c, "v1": d} for a, b, c, d in self.pieces]}

    @classmethod
    def from_json(cls, obj: dict) -> MonoFn:
        return cls(_pieces_from_json(obj))

    def __repr__(self) -> str:
        return f"MonoFn({list(self.pieces)})"


def _pieces_from_json(obj: dict) -> tuple:
    if not isinstance(obj, dict) or "pieces" not in obj:
        raise DomainError("expected an object with a 'pieces' list")
    try:
        return tuple((p["t0"], p["t1"], p["v0"], p["v1"]) for p in obj["pieces"])
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed piece: {exc}") from None


def gaps(K: ClosedSet) -> list[tuple[float, float]]:
    """Maximal open intervals of (0, 1) not meeting K, in order."""
    out = []
    cursor = 0.0
    for a, b in K.intervals:
        if a > cursor + EPS:
            out.append((cursor, a))
        cursor = max(cursor, b)
    if cursor < 1.0 - EPS:
        out.append((cursor, 1.0))
    return out


def v_map(K: ClosedSet) -> MonoFn:
    """The function ``p -> sup((0, p) & K)`` with ``sup {} = 0``."""
    pieces = []
    cursor, level = 0.0, 0.0
    for a, b in K.intervals:
        if a > cursor + EPS:
            pieces.append((cursor, a, level, level))
            cursor = a
        if b > cursor + EPS:
            pieces.append((cursor, b, cursor, b))
            cursor = b
        level = b
    if cursor < 1.0 - EPS:
        pieces.append((cursor, 1.0, level, level))
    return MonoFn(tuple(pieces))


def flat_intervals(g: MonoFn) -> list[tuple[float, float]]:
    """Maximal open intervals on which ``g`` is constant."""
    out: list[tuple[float, float]] = []
    last = None
    for t0, t1, v0, v1 in g.pieces:
        if abs(v1 - v0) > EPS:
            last = None
            continue
        if out and last is not None and abs(v0 - last) <= EPS and out[-1][1] == t0:
            out[-1] = (out[-1][0], t1)
        else:
            out.append((t0, t1))
        last = v1
    return out


def psi(g: MonoFn) -> ClosedSet:
    """Points of strict increase of ``g`` (on the left or on the right)."""
    return ClosedSet.complement_of(flat_intervals(g))


def precedes(f: MonoFn, g: MonoFn) -> bool:
    """The preorder ``f <~ g``: every g-comonotonic vector is f-comonotonic."""
    return psi(f).issubset(psi(g))


def factor(f: MonoFn, g: MonoFn) -> ValueMap | None:
    """Increasing map ``h`` with ``LC(h o g) = f``, or None when ``f`` is not ``<~ g``."""
    if not precedes(f, g):
        return None
    grid = _pieces.refine([*f.knots(), *g.knots()])
    slots: dict[float, dict[str, float]] = {}
    reps: list[float] = []

    def slot(u: float) -> dict[str, float]:
        for r in reps:
            if abs(r - u) <= EPS:
                return slots[r]
        reps.append(u)
        slots[u] = {}
        return slots[u]

    for s0, s1 in zip(grid, grid[1:]):
        g0, g1 = _pieces.restrict(g.pieces, s0, s1)
        f0, f1 = _pieces.restrict(f.pieces, s0, s1)
        if g1 - g0 > EPS:
            slot(g0).setdefault("right", f0)
            slot(g1)["left"] = f1
        else:
            slot(g0)["value"] = f1
    knots = []
    for u in sorted(reps):
        d = slots[u]
        value = d.get("value", d.get("left", d.get("right")))
        knots.append(Knot(u, d.get("left", value), value, d.get("right", value)))
    if len(knots) == 1:
        u = knots[0]
        knots.append(Knot(u.t + 1.0, u.right, u.right, u.right))
    return ValueMap(knots)


def lc_normalize(raw: KnotFunction | Sequence[Sequence[float]]) -> MonoFn:
    """The unique member of the left-continuous class equal to ``raw`` a.e."""
    if isinstance(raw, KnotFunction):
        if raw.lo > EPS or raw.hi < 1 - EPS:
            raise DomainError("function must be defined on [0, 1]")
        pieces = []
        for j in range(len(raw.knots) - 1):
            a, b = raw.knots[j], raw.knots[j + 1]
            if raw.curves[j] is not None and raw.segment_slope(j) is None:
                raise DomainError("only piecewise-linear input can be normalised")
            pieces.append((a.t, b.t, a.right, b.left))
    else:
        pieces = [tuple(p) for p in raw]
    try:
        return MonoFn(tuple(pieces))
    except DomainError as exc:
        raise DomainError(f"not increasing almost everywhere: {exc}") from None


def var_additivity_condition(K: ClosedSet, p: float, side: str) -> bool:
    """Whether K accumulates at ``p`` from the left (side='left') or right.

    For finite unions of intervals this reads: some [a, b] in K has
    a < p <= b (left) or a <= p < b (right).
    """
    if side == "left":
        if not 0 < p <= 1:
            raise DomainError("p must lie in (0, 1] for the left condition")
        return any(a < p - EPS and p <= b + EPS for a, b in K.intervals)
    if side == "right":
        if not 0 <= p < 1:
            raise DomainError("p must lie in [0, 1) for the right condition")
        return any(a <= p + EPS and p < b - EPS for a, b in K.intervals)
    raise DomainError("side must be 'left' or 'right'")
