"""Distortion functions and signed Choquet integrals.

A distortion ``h`` on [0, 1] has bounded variation and ``h(0) = 0``; the
riskmetric is ``I_h(X) = int_{-inf}^0 (h(P(X>x)) - h(1)) dx + int_0^inf h(P(X>x)) dx``.
Jumps are kept explicit: a jump on the right of ``t`` (value != right) puts
mass on the left quantile at ``1 - t``, a jump on the left of ``t``
(value != left) on the right quantile at ``1 - t``.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from ._knots import Curve, Knot, KnotFunction
from ._num import EPS, DomainError
from ._pieces import restrict
from .indexsets import ClosedSet, MonoFn, gaps, var_additivity_condition
from .randvar import PLRV, quantile_fn

__all__ = [
    "DistortionFn",
    "AccumulationFlag",
    "conjugate",
    "decompose",
    "choquet",
    "is_k_additive",
    "additivity_core",
    "is_concave",
    "builtin",
    "BUILTINS",
]


class DistortionFn(KnotFunction):
    """Bounded-variation distortion on [0, 1] with ``h(0) = 0``."""

    def __init__(self, knots: Sequence[Knot], curves: Sequence[Curve | None] | None = None):
        knots = list(knots)
        if not knots or abs(knots[0].t) > EPS or abs(knots[-1].t - 1.0) > EPS:
            raise DomainError("distortion knots must start at 0 and end at 1")
        first, last = knots[0], knots[-1]
        if abs(first.value) > EPS:
            raise DomainError("distortion must satisfy h(0) = 0")
        knots[0] = Knot(0.0, 0.0, 0.0, first.right)
        knots[-1] = Knot(1.0, last.left, last.value, last.value)
        super().__init__(knots, curves)

    @classmethod
    def from_points(cls, ts: Sequence[float], vs: Sequence[float]) -> DistortionFn:
        """Continuous piecewise-linear distortion through (ts[i], vs[i])."""
        return cls([Knot(t, v, v, v) for t, v in zip(ts, vs)])

    @classmethod
    def from_weight(cls, g: MonoFn) -> DistortionFn:
        """Distortion whose conjugate is ``q -> int_0^q g``.

        For a risk spectrum ``g`` this gives ``I_h = rho_g``.
        """
        prim = [0.0]
        for q0, q1, g0, g1 in g.pieces:
            prim.append(prim[-1] + 0.5 * (g0 + g1) * (q1 - q0))
        total = prim[-1]
        knots, curves = [], []
        for k, (q0, q1, g0, g1) in enumerate(reversed(g.pieces)):
            idx = len(g.pieces) - 1 - k
            lo, hi = 1.0 - q1, 1.0 - q0
            v_lo, v_hi = total - prim[idx + 1], total - prim[idx]
            knots.append(Knot(lo, v_lo, v_lo, v_lo))
            slope = (g1 - g0) / (q1 - q0)
            if abs(slope) <= EPS:
                curves.append(None)
            else:
                # h(t) = total - prim(q0) - g0 (u - q0) - slope (u - q0)^2 / 2, u = 1 - t
                curves.append(
                    Curve(
                        (
                            (total - prim[idx], 0.0),
                            (-g0, 1.0, 1.0 - q0, -1.0),
                            (-0.5 * slope, 2.0, 1.0 - q0, -1.0),
                        )
                    )
                )
        knots.append(Knot(1.0, total, total, total))
        knots[0] = Knot(0.0, 0.0, 0.0, 0.0)
        return cls(knots, curves)

    def to_json(self) -> dict:
        return super().to_json()

    @classmethod
    def from_json(cls, obj: dict) -> DistortionFn:
        if not isinstance(obj, dict):
            raise DomainError("distortion JSON must be an object")
        if "builtin" in obj:
            return builtin(obj["builtin"], **(obj.get("params") or {}))
        if "knots" not in obj:
            raise DomainError("distortion JSON needs 'knots' or 'builtin'")
        knots = []
        for k in obj["knots"]:
            try:
                t, value = float(k["t"]), float(k["value"])
            except (KeyError, TypeError, ValueError):
                raise DomainError("each knot needs numeric 't' and 'value'") from None
            knots.append(Knot(t, float(k.get("left", value)), value, float(k.get("right", value))))
        curves = None
        if obj.get("segments") is not None:
            curves = [
                None if seg is None else Curve(tuple(tuple(term) for term in seg["terms"]))
                for seg in obj["segments"]
            ]
        return cls(knots, curves)


@dataclass(frozen=True)
class AccumulationFlag:
    """K must accumulate at ``p`` from ``side`` for additivity."""

    p: float
    side: str

    def satisfied_by(self, K: ClosedSet) -> bool:
        return var_additivity_condition(K, self.p, self.side)

    def to_json(self) -> dict:
        return {"p": self.p, "side": self.side}


def conjugate(h: KnotFunction) -> KnotFunction:
    """``t -> h(1) - h(1 - t)``; left and right jumps swap roles."""
    top = h(1.0)
    knots = [Knot(1.0 - k.t, top - k.right, top - k.value, top - k.left) for k in reversed(h.knots)]
    curves = [
        None if c is None else c.shifted(const=top, sign=-1.0, reflect=1.0)
        for c in reversed(h.curves)
    ]
    return KnotFunction(knots, curves)


def decompose(h: DistortionFn) -> tuple[DistortionFn, DistortionFn, DistortionFn]:
    """Split ``h`` into (continuous part, left-jump part, right-jump part)."""
    lk, rk, ck = [], [], []
    cum_l = cum_r = 0.0
    for k in h.knots:
        jl = k.value - k.left if k.t > 0 else 0.0
        jr = k.right - k.value if k.t < 1 else 0.0
        lk.append(Knot(k.t, cum_l, cum_l + jl, cum_l + jl))
        rk.append(Knot(k.t, cum_r, cum_r, cum_r + jr))
        ck.append(
            Knot(
                k.t,
                k.left - cum_l - cum_r,
                k.value - cum_l - jl - cum_r,
                k.right - cum_l - jl - cum_r - jr,
            )
        )
        cum_l += jl
        cum_r += jr
    curves = []
    offset = 0.0
    for j, c in enumerate(h.curves):
        k = h.knots[j]
        offset = ck[j].right - k.right
        curves.append(None if c is None else c.shifted(const=offset))
    return (
        DistortionFn(ck, curves),
        DistortionFn(lk),
        DistortionFn(rk),
    )


def choquet(h: KnotFunction, x: PLRV) -> float:
    """Exact signed Choquet integral ``I_h(x)``."""
    q = quantile_fn(x)
    qknots = q.knots()
    total = 0.0
    ts = [k.t for k in h.knots]
    for j in range(len(ts) - 1):
        a, b = ts[j], ts[j + 1]
        cuts = sorted({a, b, *(1.0 - u for u in qknots if a + EPS < 1.0 - u < b - EPS)})
        for s0, s1 in zip(cuts, cuts[1:]):
            # Q(1 - s) is linear on (s0, s1): lo_val at s1, hi_val at s0
            lo_val, hi_val = restrict(q.pieces, 1.0 - s1, 1.0 - s0)
            slope = (lo_val - hi_val) / (s1 - s0)
            total += (
                lo_val * h.segment_value(j, s1)
                - hi_val * h.segment_value(j, s0)
                - slope * h.segment_integral(j, s0, s1)
            )
    for k in h.knots:
        if k.t > 0 and k.value != k.left:
            total += (k.value - k.left) * q.right(1.0 - k.t)
        if k.t < 1 and k.right != k.value:
            total += (k.right - k.value) * q.left(1.0 - k.t)
    return total


def is_k_additive(h: KnotFunction, K: ClosedSet) -> bool:
    """Whether ``h`` is affine on the closure of ``1 - B`` for every gap B of K."""
    return all(h.is_affine_on(1.0 - b, 1.0 - a) for a, b in gaps(K))


def additivity_core(h: KnotFunction) -> tuple[ClosedSet, list[AccumulationFlag]]:
    """Smallest K for the continuous part, plus accumulation requirements at jumps.

    ``is_k_additive(h, K)`` holds exactly when K contains the core (modulo
    {0, 1}) and every flag is satisfied by K.
    """
    core = ClosedSet.complement_of([(1.0 - d, 1.0 - c) for c, d in h.affine_runs()])
    flags = []
    for k in h.knots:
        if k.t < 1 and abs(k.right - k.value) > EPS:
            flags.append(AccumulationFlag(1.0 - k.t, "left"))
        if k.t > 0 and abs(k.value - k.left) > EPS:
            flags.append(AccumulationFlag(1.0 - k.t, "right"))
    flags.sort(key=lambda f: (f.p, f.side))
    return core, flags


def is_concave(h: KnotFunction) -> bool:
    """Concavity on the closed interval [0, 1], jumps included."""
    n = len(h.knots)
    for i, k in enumerate(h.knots):
        if 0 < i < n - 1 and not h.is_continuous_at(i):
            return False
    if h.knots[0].right < h.knots[0].value - EPS or h.knots[-1].left < h.knots[-1].value - EPS:
        return False
    prev = None
    for j, c in enumerate(h.curves):
        a, b = h.knots[j].t, h.knots[j + 1].t
        if c is None:
            start = end = h.segment_slope(j)
        else:
            samples = [a + (b - a) * i / 64 for i in range(1, 64)]
            if any(c.second_derivative(t) > EPS for t in samples):
                return False
            start, end = c.derivative(a), c.derivative(b)
        if prev is not None and start > prev + EPS * max(1.0, abs(prev)):
            return False
        prev = end
    return True


# -- built-in distortions ---------------------------------------------------


def _step(at: float, closed_left: bool) -> DistortionFn:
    """Unit step at ``at``; ``closed_left`` puts the jump on the left of the knot."""
    if at <= EPS:
        return DistortionFn([Knot(0.0, 0.0, 0.0, 1.0), Knot(1.0, 1.0, 1.0, 1.0)])
    if at >= 1 - EPS:
        return DistortionFn([Knot(0.0, 0.0, 0.0, 0.0), Knot(1.0, 0.0, 1.0 if closed_left else 0.0, 1.0)])
    mid = Knot(at, 0.0, 1.0, 1.0) if closed_left else Knot(at, 0.0, 0.0, 1.0)
    return DistortionFn([Knot(0.0, 0.0, 0.0, 0.0), mid, Knot(1.0, 1.0, 1.0, 1.0)])


def _var(p: float) -> DistortionFn:
    if not 0 < p <= 1:
        raise DomainError("VaR level must lie in (0, 1]")
    return _step(1.0 - p, closed_left=False)


def _var_plus(p: float) -> DistortionFn:
    if not 0 <= p < 1:
        raise DomainError("VaR+ level must lie in [0, 1)")
    return _step(1.0 - p, closed_left=True)


def _es(p: float) -> DistortionFn:
    if not 0 <= p <= 1:
        raise DomainError("ES level must lie in [0, 1]")
    if p >= 1 - EPS:
        return _var(1.0)
    if p <= EPS:
        return _mean()
    return DistortionFn.from_points([0.0, 1.0 - p, 1.0], [0.0, 1.0, 1.0])


def _mean() -> DistortionFn:
    return DistortionFn.from_points([0.0, 1.0], [0.0, 1.0])


def _mean_median_dev() -> DistortionFn:
    return DistortionFn.from_points([0.0, 0.5, 1.0], [0.0, 0.5, 0.0])


def _gini_shortfall(alpha: float, lam: float) -> DistortionFn:
    if not 0 < alpha < 1 or lam < 0:
        raise DomainError("Gini Shortfall needs alpha in (0, 1) and lambda >= 0")
    s = 1.0 - alpha
    curve = Curve(((1.0 / s + 2.0 * lam / s, 1.0), (-2.0 * lam / s**2, 2.0)))
    return DistortionFn(
        [Knot(0.0, 0.0, 0.0, 0.0), Knot(s, 1.0, 1.0, 1.0), Knot(1.0, 1.0, 1.0, 1.0)],
        [curve, None],
    )


def _maxvar(alpha: float) -> DistortionFn:
    if alpha < 1:
        raise DomainError("MAXVAR needs alpha >= 1")
    if alpha == 1:
        return _mean()
    return DistortionFn(
        [Knot(0.0, 0.0, 0.0, 0.0), Knot(1.0, 1.0, 1.0, 1.0)], [Curve(((1.0, 1.0 / alpha),))]
    )


BUILTINS = {
    "var": _var,
    "var_plus": _var_plus,
    "es": _es,
    "mean": _mean,
    "ess_sup": lambda: _var(1.0),
    "ess_inf": lambda: _var_plus(0.0),
    "mean_median_dev": _mean_median_dev,
    "gini_shortfall": _gini_shortfall,
    "maxvar": _maxvar,
}


def builtin(name: str, **params: float) -> DistortionFn:
    """Named distortion, e.g. ``builtin("es", p=0.9)`` or ``builtin("gini_shortfall", alpha=.9, lam=.5)``."""
    try:
        make = BUILTINS[name]
    except KeyError:
        raise DomainError(f"unknown distortion {name!r}; choose from {sorted(BUILTINS)}") from None
    try:
        return make(**params)
    except TypeError as exc:
        raise DomainError(f"bad parameters for {name!r}: {exc}") from None
