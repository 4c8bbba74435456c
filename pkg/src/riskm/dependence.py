"""Tail events, p-/K-concentration, g-comonotonicity, ordinal-sum generation
and counterexamples for non-additive distortion riskmetrics.

Canonical tail events come from the distributional transform ``U`` of the
sum ``S``: ``A_p = {U > p}`` is a p-tail event of ``S`` for every p, and a
vector is p-concentrated exactly when ``A_p`` is a p-tail event of every
component.
"""

from __future__ import annotations

import random
from collections.abc import Sequence
from dataclasses import dataclass, field

from ._num import EPS, DomainError
from .distortion import choquet, is_k_additive
from ._knots import KnotFunction
from .indexsets import ClosedSet, MonoFn, flat_intervals, gaps, psi, v_map
from .randvar import (
    PLRV,
    Event,
    apply_increasing,
    common_cells,
    distributional_transform,
    monotone_in_reference,
    sum_rv,
)

__all__ = [
    "TailCertificate",
    "ConcentrationReport",
    "GapCopula",
    "GapCopulaSpec",
    "CounterexampleSearchExhausted",
    "tail_event",
    "is_tail_event",
    "is_p_concentrated",
    "p_concentration_levels",
    "is_k_concentrated",
    "witness_z",
    "is_g_comonotonic",
    "generate",
    "leak_vector",
    "counterexample",
    "additivity_gap",
    "order_counterexample",
]

COPULAS = ("comonotone", "countermonotone", "independent", "swap-blocks")
SEARCH_LIMIT = 64


class CounterexampleSearchExhausted(RuntimeError):
    """The bounded search found no pair with a nonzero additivity gap."""


@dataclass(frozen=True)
class TailCertificate:
    p: float
    event: Event
    verdicts: tuple[bool, ...]

    @property
    def common(self) -> bool:
        return all(self.verdicts)

    def to_json(self) -> dict:
        return {"p": self.p, "event": self.event.to_json(), "verdicts": list(self.verdicts)}


@dataclass
class ConcentrationReport:
    """Certificates for the checked levels and, on failure, what failed."""

    certificates: list[TailCertificate] = field(default_factory=list)
    failing_level: float | None = None
    failing_layer: tuple[float, float] | None = None

    @property
    def refutation(self) -> str | None:
        if self.failing_level is not None:
            return f"no common tail event at p={self.failing_level:.17g}"
        if self.failing_layer is not None:
            a, b = self.failing_layer
            return f"not comonotonic on the layer between levels {a:.17g} and {b:.17g}"
        return None

    def to_json(self) -> dict:
        return {
            "certificates": [c.to_json() for c in self.certificates],
            "refutation": self.refutation,
        }


# -- tail events --------------------------------------------------------------


def _upper_event(u: PLRV, p: float) -> Event:
    """``{u > p}`` for a piecewise-linear ``u``."""
    out = []
    for t0, t1, u0, u1 in u.pieces:
        above0, above1 = u0 > p + EPS, u1 > p + EPS
        if above0 and above1 or (abs(u1 - u0) <= EPS and u0 > p + EPS):
            out.append((t0, t1))
        elif above0 != above1 and abs(u1 - u0) > EPS:
            cross = t0 + (p - u0) / (u1 - u0) * (t1 - t0)
            out.append((t0, cross) if above0 else (cross, t1))
        elif not above0 and not above1 and max(u0, u1) > p:
            cross = t0 + (p - u0) / (u1 - u0) * (t1 - t0) if abs(u1 - u0) > EPS else t1
            out.append((t0, cross) if u0 > u1 else (cross, t1))
    return Event(out)


def tail_event(x: PLRV, p: float) -> Event:
    """Canonical p-tail event of ``x`` (measure ``1 - p``)."""
    if not 0 < p < 1:
        raise DomainError("p must lie in (0, 1)")
    return _upper_event(distributional_transform(x), p)


def is_tail_event(x: PLRV, event: Event) -> bool:
    """``ess inf`` of ``x`` on the event is at least its ``ess sup`` off the event."""
    inside, outside = [], []
    for s0, s1, ((v0, v1),) in common_cells([x], event.boundaries()):
        (inside if 0.5 * (s0 + s1) in event else outside).extend((v0, v1))
    if not inside or not outside:
        return True
    scale = max(1.0, max(abs(v) for v in inside + outside))
    return min(inside) >= max(outside) - EPS * scale


def is_p_concentrated(xs: Sequence[PLRV], p: float) -> tuple[bool, TailCertificate]:
    """Whether all components share a common p-tail event."""
    if not 0 < p < 1:
        raise DomainError("p must lie in (0, 1)")
    u = distributional_transform(sum_rv(xs))
    return _certify(xs, u, p)


def p_concentration_levels(
    xs: Sequence[PLRV], ps: Sequence[float]
) -> list[tuple[bool, TailCertificate]]:
    """``is_p_concentrated`` at several levels, sharing one transform of the sum."""
    if any(not 0 < p < 1 for p in ps):
        raise DomainError("p must lie in (0, 1)")
    u = distributional_transform(sum_rv(xs))
    return [_certify(xs, u, p) for p in ps]


def _certify(xs: Sequence[PLRV], u: PLRV, p: float) -> tuple[bool, TailCertificate]:
    event = _upper_event(u, p)
    verdicts = tuple(is_tail_event(x, event) for x in xs)
    return all(verdicts), TailCertificate(p, event, verdicts)


def _layer_comonotone(xs: Sequence[PLRV], u: PLRV, a: float, b: float) -> bool:
    """Conditional comonotonicity of ``xs`` on ``{a < u <= b}``."""
    lo, hi = _upper_event(u, a), _upper_event(u, b)
    extra = [*u.knots(), *lo.boundaries(), *hi.boundaries()]
    cells = []
    for s0, s1, vals in common_cells(xs, extra):
        m = 0.5 * (s0 + s1)
        if m in lo and m not in hi:
            cells.append((s0, s1, sum(v[0] for v in vals), sum(v[1] for v in vals), vals))
    return monotone_in_reference(cells)


def is_k_concentrated(xs: Sequence[PLRV], K: ClosedSet) -> tuple[bool, ConcentrationReport]:
    """p-concentration for every p in K, decided by a finite check.

    Interval endpoints get a common-tail test; every nondegenerate interval
    [a, b] additionally needs comonotonicity on the layer ``A_a - A_b``.
    """
    report = ConcentrationReport()
    if len(xs) <= 1:
        return True, report
    u = distributional_transform(sum_rv(xs))
    for p in K.endpoints():
        if not EPS < p < 1 - EPS:
            continue
        ok, cert = _certify(xs, u, p)
        report.certificates.append(cert)
        if not ok:
            report.failing_level = p
            return False, report
    for a, b in K.intervals:
        if b - a > EPS and not _layer_comonotone(xs, u, a, b):
            report.failing_layer = (a, b)
            return False, report
    return True, report


def witness_z(xs: Sequence[PLRV], K: ClosedSet) -> PLRV:
    """``Z = sup{q in K : omega in A_q}``, i.e. ``v_map(K)`` applied to ``U``.

    ``Z`` has quantile function ``v_map(K)`` and is comonotonic with every
    component of a K-concentrated vector.
    """
    ok, _ = is_k_concentrated(xs, K)
    if not ok:
        raise DomainError("not K-concentrated")
    u = distributional_transform(sum_rv(xs))
    return apply_increasing(u, v_map(K))


def is_g_comonotonic(xs: Sequence[PLRV], g: MonoFn) -> bool:
    """g-comonotonicity, decided through concentration on ``psi(g)``."""
    return is_k_concentrated(xs, psi(g))[0]


# -- ordinal-sum generation ---------------------------------------------------


@dataclass(frozen=True)
class GapCopula:
    interval: tuple[float, float]
    copula: str
    param: float | None = None

    def __post_init__(self) -> None:
        if self.copula not in COPULAS:
            raise DomainError(f"unknown gap copula {self.copula!r}; choose from {COPULAS}")


@dataclass(frozen=True)
class GapCopulaSpec:
    gaps: tuple[GapCopula, ...] = ()

    @classmethod
    def uniform(cls, K: ClosedSet, copula: str, param: float | None = None) -> GapCopulaSpec:
        return cls(tuple(GapCopula(g, copula, param) for g in gaps(K)))

    def to_json(self) -> dict:
        return {
            "gaps": [
                {"interval": list(g.interval), "copula": g.copula, "param": g.param}
                for g in self.gaps
            ]
        }

    @classmethod
    def from_json(cls, obj: dict) -> GapCopulaSpec:
        try:
            return cls(
                tuple(
                    GapCopula(
                        (float(e["interval"][0]), float(e["interval"][1])),
                        e["copula"],
                        e.get("param"),
                    )
                    for e in obj["gaps"]
                )
            )
        except (KeyError, TypeError, IndexError) as exc:
            raise DomainError(f"malformed gap copula spec: {exc}") from None


def _indecomposable_perm(n: int, rng: random.Random) -> list[int]:
    """Random permutation of range(n) fixing no proper initial segment."""
    while True:
        perm = list(range(n))
        rng.shuffle(perm)
        if all(max(perm[:k]) != k - 1 for k in range(1, n)):
            return perm


def _gap_map(a: float, b: float, gc: GapCopula, rng: random.Random) -> list[tuple]:
    """Pieces of a measure-preserving rearrangement of (a, b)."""
    if gc.copula == "comonotone":
        return [(a, b, a, b)]
    if gc.copula == "countermonotone":
        return [(a, b, b, a)]
    if gc.copula == "swap-blocks":
        s = 0.5 if gc.param is None else float(gc.param)
        if not 0 < s < 1:
            raise DomainError("swap-blocks parameter must lie in (0, 1)")
        m = a + s * (b - a)
        return [(a, m, b - (m - a), b), (m, b, a, b - (m - a))]
    n = 4 if gc.param is None else int(gc.param)
    if n < 2:
        raise DomainError("independent copula needs at least 2 blocks")
    w = (b - a) / n
    perm = _indecomposable_perm(n, rng)
    return [(a + i * w, a + (i + 1) * w, a + perm[i] * w, a + (perm[i] + 1) * w) for i in range(n)]


def generate(
    K: ClosedSet,
    spec: GapCopulaSpec,
    marginals: Sequence[MonoFn] | None = None,
    seed: int = 0,
    dim: int | None = None,
) -> list[PLRV]:
    """K-concentrated vector from an ordinal sum of gap copulas.

    Component 0 uses the identity coupling everywhere; on each gap of K the
    other components are rearranged according to the gap's copula.  Each
    component is then pushed through its marginal quantile function
    (uniform by default).
    """
    dim = dim if dim is not None else (len(marginals) if marginals else 2)
    if marginals is not None and len(marginals) != dim:
        raise DomainError("need one marginal per component")
    todo = list(spec.gaps)
    chosen: list[tuple[float, float, GapCopula]] = []
    for a, b in gaps(K):
        match = [g for g in todo if abs(g.interval[0] - a) <= 1e-9 and abs(g.interval[1] - b) <= 1e-9]
        if not match:
            raise DomainError(f"gap copula spec has no entry for gap ({a:.17g}, {b:.17g})")
        todo.remove(match[0])
        chosen.append((a, b, match[0]))
    if todo:
        raise DomainError(f"gap copula spec has entries that are not gaps of K: {todo[0].interval}")
    rng = random.Random(seed)
    comps = []
    for j in range(dim):
        pieces: list[tuple] = []
        cursor = 0.0
        for a, b, gc in chosen:
            if a > cursor:
                pieces.append((cursor, a, cursor, a))
            pieces.extend([(a, b, a, b)] if j == 0 else _gap_map(a, b, gc, rng))
            cursor = b
        if cursor < 1.0:
            pieces.append((cursor, 1.0, cursor, 1.0))
        u = PLRV._build(pieces)
        comps.append(u if marginals is None else apply_increasing(u, marginals[j]))
    return comps


def leak_vector(K: ClosedSet, seed: int = 0, width: float = 0.05) -> list[PLRV]:
    """Uniform pair that is concentrated except across one point of K.

    Two small blocks straddling a point ``p`` of K in (0, 1) are swapped in
    the second component, so the pair is not p-concentrated.
    """
    pts = [v for iv in K.canonical() for v in iv if EPS < v < 1 - EPS]
    if not pts:
        raise DomainError("K has no point in (0, 1) to leak across")
    rng = random.Random(seed)
    p = rng.choice(pts)
    w = min(width, p, 1 - p) * rng.uniform(0.5, 1.0)
    x = PLRV.identity()
    y = PLRV._build(
        [(0.0, p - w, 0.0, p - w), (p - w, p, p, p + w), (p, p + w, p - w, p), (p + w, 1.0, p + w, 1.0)]
    )
    return [x, y]


# -- counterexamples ----------------------------------------------------------


def additivity_gap(h: KnotFunction, xs: Sequence[PLRV]) -> float:
    """``sum I_h(x_i) - I_h(sum x_i)``."""
    return sum(choquet(h, x) for x in xs) - choquet(h, sum_rv(xs))


def _window_pair(c: float, d: float, mode: str) -> tuple[PLRV, PLRV]:
    """X = Y outside (c, d) (0 below, 3 above); inside they move oppositely."""
    below = [(0.0, c, 0.0, 0.0)] if c > 0 else []
    above = [(d, 1.0, 3.0, 3.0)] if d < 1 else []
    if mode == "reflect":
        xi, yi = [(c, d, 1.0, 2.0)], [(c, d, 2.0, 1.0)]
    else:
        m = 0.5 * (c + d)
        xi = [(c, m, 1.0, 1.0), (m, d, 2.0, 2.0)]
        yi = [(c, m, 2.0, 2.0), (m, d, 1.0, 1.0)]
    return PLRV._build(below + xi + above), PLRV._build(below + yi + above)


def _windows(h: KnotFunction, K: ClosedSet, seed: int):
    rng = random.Random(seed)
    bad = [(a, b) for a, b in gaps(K) if not h.is_affine_on(1.0 - b, 1.0 - a)]
    kinks = sorted(1.0 - k.t for k in h.knots)
    for a, b in bad:
        yield a, b, "reflect"
        yield a, b, "swap"
    for a, b in bad:
        for k in kinks:
            if not a - EPS <= k <= b + EPS:
                continue
            if k > a + EPS:
                yield a, k, "swap"
            if k < b - EPS:
                yield k, b, "swap"
            r = min(k - a, b - k)
            if r > EPS:
                yield k - r, k + r, "swap"
                yield k - r / 2, k + r / 2, "swap"
    while bad:
        a, b = rng.choice(bad)
        c, d = sorted(rng.uniform(a, b) for _ in range(2))
        if d - c > 1e-6:
            yield c, d, rng.choice(("swap", "reflect"))


def counterexample(h: KnotFunction, K: ClosedSet, seed: int = 0) -> tuple[PLRV, PLRV] | None:
    """A K-concentrated pair on which ``I_h`` is not additive, or None if
    ``I_h`` is K-additive.

    The pair agrees outside a window (c, d) inside a gap of K and moves in
    opposite directions inside it, so K-concentration is untouched while the
    gap isolates a second difference of the conjugate distortion.
    """
    if is_k_additive(h, K):
        return None
    for n, (c, d, mode) in enumerate(_windows(h, K, seed)):
        if n >= SEARCH_LIMIT:
            break
        pair = _window_pair(c, d, mode)
        if abs(additivity_gap(h, pair)) > 1e-9 and is_k_concentrated(pair, K)[0]:
            return pair
    raise CounterexampleSearchExhausted(
        f"no additivity violation found after {SEARCH_LIMIT} candidate pairs"
    )


def order_counterexample(f: MonoFn, g: MonoFn) -> tuple[PLRV, PLRV] | None:
    """A g-comonotonic pair that is not f-comonotonic, or None if f <~ g.

    On a maximal flat interval (c, d) of g over which f still increases, the
    second component runs through f backwards.
    """
    pf = psi(f)
    for c, d in flat_intervals(g):
        if any(a < d - EPS and b > c + EPS for a, b in pf.canonical()):
            x = apply_increasing(PLRV.identity(), f)
            u = PLRV._build([(0.0, c, 0.0, c), (c, d, d, c), (d, 1.0, d, 1.0)])
            return x, apply_increasing(u, f)
    return None
