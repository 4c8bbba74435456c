"""Bounded random variables on ([0, 1], Lebesgue) stored as linear pieces.

Everything here is exact up to the global tolerance ``EPS``: quantiles come
from the monotone rearrangement of the pieces, sums are taken on the common
refinement of the piece boundaries and Expected Shortfall integrates the
piecewise-linear quantile function in closed form.
"""

from __future__ import annotations

import bisect
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass

from . import _pieces
from ._knots import ValueMap
from ._num import EPS, DomainError, cluster, lerp, snap
from .indexsets import MonoFn, _pieces_from_json

__all__ = [
    "PLRV",
    "Event",
    "ValueMap",
    "quantile_left",
    "quantile_right",
    "quantile_fn",
    "var",
    "var_plus",
    "es",
    "ess_sup",
    "ess_inf",
    "mean",
    "sum_rv",
    "apply_increasing",
    "apply_affine",
    "is_comonotonic",
    "distributional_transform",
]


@dataclass(frozen=True, eq=False)
class PLRV:
    """Random variable ``omega -> value`` on [0, 1], linear on each piece.

    Piece ``(t0, t1, v0, v1)`` maps ``[t0, t1)`` linearly from ``v0`` to
    ``v1``.  Values at piece boundaries are immaterial.
    """

    pieces: tuple[tuple[float, float, float, float], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pieces", _pieces.merge(_pieces.validate(self.pieces)))

    @classmethod
    def constant(cls, c: float) -> PLRV:
        return cls(((0.0, 1.0, c, c),))

    @classmethod
    def identity(cls) -> PLRV:
        return cls(((0.0, 1.0, 0.0, 1.0),))

    @classmethod
    def steps(cls, breaks: Sequence[float], values: Sequence[float]) -> PLRV:
        """Piecewise-constant variable: values[i] between consecutive breaks."""
        ts = [0.0, *breaks, 1.0]
        if len(values) != len(ts) - 1:
            raise DomainError("need one value per cell")
        return cls(tuple((ts[i], ts[i + 1], v, v) for i, v in enumerate(values)))

    @classmethod
    def _build(cls, raw: Iterable[tuple[float, float, float, float]]) -> PLRV:
        return cls(tuple(p for p in raw if p[1] - p[0] > 1e-15))

    def __call__(self, omega: float) -> float:
        return _pieces.value_at(self.pieces, omega, "right")

    def knots(self) -> list[float]:
        return _pieces.knots(self.pieces)

    def __add__(self, other: PLRV | float) -> PLRV:
        if isinstance(other, PLRV):
            return sum_rv([self, other])
        return apply_affine(self, 1.0, float(other))

    __radd__ = __add__

    def __neg__(self) -> PLRV:
        return apply_affine(self, -1.0, 0.0)

    def __sub__(self, other: PLRV | float) -> PLRV:
        return self + (-other)

    def __mul__(self, c: float) -> PLRV:
        return apply_affine(self, float(c), 0.0)

    __rmul__ = __mul__

    def equals(self, other: PLRV, tol: float = EPS) -> bool:
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
    def from_json(cls, obj: dict) -> PLRV:
        return cls(_pieces_from_json(obj))

    def __repr__(self) -> str:
        return f"PLRV({list(self.pieces)})"


class Event:
    """Finite union of subintervals of [0, 1], modulo null sets."""

    __slots__ = ("intervals",)

    def __init__(self, intervals: Iterable[Sequence[float]] = ()):
        ivs = sorted((float(a), float(b)) for a, b in intervals)
        merged: list[tuple[float, float]] = []
        for a, b in ivs:
            if b < a - EPS or a < -EPS or b > 1 + EPS:
                raise DomainError(f"bad event interval ({a}, {b})")
            if b - a <= EPS:
                continue
            if merged and a <= merged[-1][1] + EPS:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        self.intervals: tuple[tuple[float, float], ...] = tuple(merged)

    @property
    def measure(self) -> float:
        return sum(b - a for a, b in self.intervals)

    def complement(self) -> Event:
        out, cursor = [], 0.0
        for a, b in self.intervals:
            out.append((cursor, a))
            cursor = b
        out.append((cursor, 1.0))
        return Event(out)

    def __contains__(self, omega: float) -> bool:
        return any(a < omega < b for a, b in self.intervals)

    def boundaries(self) -> list[float]:
        return [v for iv in self.intervals for v in iv]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Event):
            return NotImplemented
        diff = _pieces.refine([*self.boundaries(), *other.boundaries()])
        for s0, s1 in zip(diff, diff[1:]):
            m = 0.5 * (s0 + s1)
            if (m in self) != (m in other):
                return False
        return True

    __hash__ = None  # type: ignore[assignment]

    def to_json(self) -> dict:
        return {"intervals": [[a, b] for a, b in self.intervals]}

    @classmethod
    def from_json(cls, obj: dict) -> Event:
        return cls(obj["intervals"])

    def __repr__(self) -> str:
        return f"Event({list(self.intervals)})"


# -- distribution -----------------------------------------------------------


@dataclass(frozen=True)
class _Law:
    """Value levels with atom masses and the mass spread over each gap."""

    levels: list[float]
    atoms: list[float]
    spread: list[float]  # spread[k]: continuous mass on (levels[k], levels[k+1])

    def cdf_left(self, k: int) -> float:
        """P(X < levels[k])."""
        return sum(self.atoms[:k]) + sum(self.spread[:k])


def _law(x: PLRV) -> _Law:
    levels = cluster(v for p in x.pieces for v in p[2:])
    atoms = [0.0] * len(levels)
    spread = [0.0] * max(len(levels) - 1, 0)
    for t0, t1, v0, v1 in x.pieces:
        i = bisect.bisect_left(levels, snap(v0, levels) - EPS / 2)
        j = bisect.bisect_left(levels, snap(v1, levels) - EPS / 2)
        if i == j:
            atoms[i] += t1 - t0
            continue
        i, j = min(i, j), max(i, j)
        width = levels[j] - levels[i]
        for k in range(i, j):
            spread[k] += (t1 - t0) * (levels[k + 1] - levels[k]) / width
    return _Law(levels, atoms, spread)


def quantile_fn(x: PLRV) -> MonoFn:
    """The left-continuous quantile function (monotone rearrangement of ``x``)."""
    law = _law(x)
    pieces = []
    p = 0.0
    for k, v in enumerate(law.levels):
        if law.atoms[k] > 0:
            pieces.append((p, p + law.atoms[k], v, v))
            p += law.atoms[k]
        if k < len(law.spread) and law.spread[k] > 0:
            pieces.append((p, p + law.spread[k], v, law.levels[k + 1]))
            p += law.spread[k]
    pieces = [q for q in pieces if q[1] - q[0] > 1e-15]
    t0, _, v0, v1 = pieces[-1]
    pieces[-1] = (t0, 1.0, v0, v1)
    return MonoFn(tuple(pieces))


def quantile_left(x: PLRV, p: float) -> float:
    """``inf{v : P(x <= v) >= p}`` for p in (0, 1]."""
    if not 0 < p <= 1:
        raise DomainError("p must lie in (0, 1]")
    return quantile_fn(x).left(p)


def quantile_right(x: PLRV, p: float) -> float:
    """``inf{v : P(x <= v) > p}`` for p in [0, 1)."""
    if not 0 <= p < 1:
        raise DomainError("p must lie in [0, 1)")
    return quantile_fn(x).right(p)


var = quantile_left
var_plus = quantile_right


def ess_sup(x: PLRV) -> float:
    return max(max(p[2], p[3]) for p in x.pieces)


def ess_inf(x: PLRV) -> float:
    return min(min(p[2], p[3]) for p in x.pieces)


def mean(x: PLRV) -> float:
    return _pieces.integral(x.pieces)


def es(x: PLRV, p: float) -> float:
    """Expected Shortfall ``1/(1-p) * int_p^1 VaR_q(x) dq``; ess-sup at p = 1."""
    if not 0 < p <= 1:
        raise DomainError("p must lie in (0, 1]")
    if p >= 1 - 1e-15:
        return ess_sup(x)
    return quantile_fn(x).integral(p, 1.0) / (1.0 - p)


# -- algebra ----------------------------------------------------------------


def common_cells(
    xs: Sequence[PLRV], extra: Iterable[float] = ()
) -> list[tuple[float, float, list[tuple[float, float]]]]:
    """Common refinement: (s0, s1, [(x_i(s0+), x_i(s1-)) for each x_i])."""
    grid = _pieces.refine([*(t for x in xs for t in x.knots()), *extra])
    return [
        (s0, s1, [_pieces.restrict(x.pieces, s0, s1) for x in xs])
        for s0, s1 in zip(grid, grid[1:])
    ]


def sum_rv(xs: Sequence[PLRV]) -> PLRV:
    """Pointwise sum on the common refinement of piece boundaries."""
    if not xs:
        raise DomainError("cannot sum an empty list")
    if len(xs) == 1:
        return xs[0]
    cells = common_cells(xs)
    return PLRV._build(
        (s0, s1, sum(v[0] for v in vals), sum(v[1] for v in vals)) for s0, s1, vals in cells
    )


def apply_affine(x: PLRV, a: float, b: float) -> PLRV:
    return PLRV(tuple((t0, t1, a * v0 + b, a * v1 + b) for t0, t1, v0, v1 in x.pieces))


def apply_increasing(x: PLRV, f: ValueMap | MonoFn | Callable[[float], float]) -> PLRV:
    """Pointwise composition ``f(x)`` for an increasing piecewise-linear ``f``.

    A plain callable is treated as affine on each piece of ``x`` (it is only
    evaluated at piece ends) and must be increasing there.
    """
    if isinstance(f, MonoFn):
        f = ValueMap.from_monofn(f)
    if not isinstance(f, ValueMap):
        out = []
        for t0, t1, v0, v1 in x.pieces:
            w0, w1 = f(v0), f(v1)
            if (w1 - w0) * (v1 - v0) < -EPS:
                raise DomainError("map is not increasing on the range of x")
            out.append((t0, t1, w0, w1))
        return PLRV(tuple(out))
    if any(c is not None for c in f.curves):
        raise DomainError("only piecewise-linear maps can be composed exactly")
    ts = [k.t for k in f.knots]
    out = []
    for t0, t1, v0, v1 in x.pieces:
        if abs(v1 - v0) <= EPS:
            w = f(v0)
            out.append((t0, t1, w, w))
            continue
        lo, hi = min(v0, v1), max(v0, v1)
        cuts = [u for u in ts if lo + EPS < u < hi - EPS]
        vals = [v0, *(cuts if v1 > v0 else cuts[::-1]), v1]
        omegas = [t0, *(t0 + (u - v0) / (v1 - v0) * (t1 - t0) for u in vals[1:-1]), t1]
        for k in range(len(vals) - 1):
            a, b = vals[k], vals[k + 1]
            if b > a:
                wa, wb = f.right_limit(a), f.left_limit(b)
            else:
                wa, wb = f.left_limit(a), f.right_limit(b)
            out.append((omegas[k], omegas[k + 1], wa, wb))
    return PLRV._build(out)


def distributional_transform(x: PLRV) -> PLRV:
    """Uniform variable ``U`` with ``Q_x(U) = x`` a.s.

    Ties inside a flat region of ``x`` are ranked by ascending omega, so
    ``{U > p}`` is the canonical nested family of p-tail events of ``x``.
    """
    law = _law(x)
    levels = law.levels
    lower = [law.cdf_left(k) for k in range(len(levels))]
    upper = [lower[k] + law.atoms[k] for k in range(len(levels))]
    used = [0.0] * len(levels)
    out = []
    for t0, t1, v0, v1 in x.pieces:
        i = bisect.bisect_left(levels, snap(v0, levels) - EPS / 2)
        j = bisect.bisect_left(levels, snap(v1, levels) - EPS / 2)
        if i == j:
            start = lower[i] + used[i]
            used[i] += t1 - t0
            out.append((t0, t1, start, start + (t1 - t0)))
            continue
        step = 1 if j > i else -1
        ks = list(range(i, j + step, step))
        omegas = [t0 + (levels[k] - v0) / (v1 - v0) * (t1 - t0) for k in ks]
        omegas[0], omegas[-1] = t0, t1
        for a, b, wa, wb in zip(ks, ks[1:], omegas, omegas[1:]):
            ua = upper[a] if step > 0 else lower[a]
            ub = lower[b] if step > 0 else upper[b]
            out.append((wa, wb, ua, ub))
    return PLRV._build(out)


# -- comonotonicity ---------------------------------------------------------

Cell = tuple[float, float, float, float, list[tuple[float, float]]]


def monotone_in_reference(cells: Sequence[Cell], tol: float = EPS) -> bool:
    """Whether every component is an increasing function of the reference.

    Each cell is ``(s0, s1, r0, r1, comps)``: on omega in [s0, s1] the
    reference moves linearly from r0 to r1 and component i from comps[i][0]
    to comps[i][1].  Decided exactly by merging all cells into elementary
    reference intervals and atoms and chaining them in reference order.
    """
    if not cells:
        return True
    scale = max(
        [1.0]
        + [abs(v) for c in cells for v in (c[2], c[3])]
        + [abs(v) for c in cells for pair in c[4] for v in pair]
    )
    tol = tol * scale
    flat, moving = [], []
    for s0, s1, r0, r1, comps in cells:
        if abs(r1 - r0) <= tol:
            if any(abs(b - a) > tol for a, b in comps):
                return False
            flat.append((r0, [a for a, _ in comps]))
        elif r1 > r0:
            moving.append((r0, r1, comps))
        else:
            moving.append((r1, r0, [(b, a) for a, b in comps]))
    levels = cluster([r for r, _ in flat] + [v for lo, hi, _ in moving for v in (lo, hi)], tol)
    n = len(levels)
    atom: list[list[float] | None] = [None] * n
    segs: list[tuple[list[float], list[float]] | None] = [None] * max(n - 1, 0)

    def same(a: list[float], b: list[float]) -> bool:
        return all(abs(x - y) <= tol for x, y in zip(a, b))

    for r, vals in flat:
        k = bisect.bisect_left(levels, r - tol)
        if atom[k] is None:
            atom[k] = vals
        elif not same(atom[k], vals):
            return False
    for lo, hi, comps in moving:
        i = bisect.bisect_left(levels, lo - tol)
        j = bisect.bisect_left(levels, hi - tol)
        for k in range(i, j):
            a = [lerp(lo, hi, c0, c1, levels[k]) for c0, c1 in comps]
            b = [lerp(lo, hi, c0, c1, levels[k + 1]) for c0, c1 in comps]
            if segs[k] is None:
                segs[k] = (a, b)
            elif not (same(segs[k][0], a) and same(segs[k][1], b)):
                return False
    chain: list[list[float]] = []
    for k in range(n):
        if atom[k] is not None:
            chain.append(atom[k])
        if k < n - 1 and segs[k] is not None:
            chain.extend(segs[k])
    return all(
        all(b >= a - tol for a, b in zip(lo, hi)) for lo, hi in zip(chain, chain[1:])
    )


def comonotone_cells(xs: Sequence[PLRV], extra: Iterable[float] = ()) -> list[Cell]:
    """Cells of the common refinement with the sum of ``xs`` as reference."""
    out = []
    for s0, s1, vals in common_cells(xs, extra):
        out.append((s0, s1, sum(v[0] for v in vals), sum(v[1] for v in vals), vals))
    return out


def is_comonotonic(xs: Sequence[PLRV]) -> bool:
    """Whether all components are increasing functions of one common variable."""
    if len(xs) <= 1:
        return True
    return monotone_in_reference(comonotone_cells(xs))
