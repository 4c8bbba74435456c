"""Spectral risk measures and their Expected-Shortfall mixture form.

``rho_g(X) = int_0^1 g(t) Q_X(t) dt`` for an increasing, non-negative risk
spectrum ``g`` integrating to one.  ``rho_g`` is additive on a vector exactly
when the vector is g-comonotonic; a step spectrum with jumps at
``alpha_1 < ... < alpha_n`` is the mixture ``lambda_0 E + sum lambda_i ES_{alpha_i}``.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from ._knots import KnotFunction
from ._num import EPS, DomainError
from ._pieces import product_integral
from .dependence import is_g_comonotonic
from .distortion import DistortionFn, conjugate
from .indexsets import MonoFn, _pieces_from_json, lc_normalize
from .randvar import PLRV, es, mean, quantile_fn

__all__ = [
    "Spectrum",
    "ESMixture",
    "rho",
    "is_additive_on",
    "es_mixture",
    "spectrum_of_distortion",
    "distortion_of_spectrum",
]


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Risk spectrum: increasing, ``g >= 0``, ``int g = 1``."""

    g: MonoFn

    def __post_init__(self) -> None:
        if self.g.pieces[0][2] < -EPS:
            raise DomainError("risk spectrum must be non-negative")
        total = self.g.integral()
        if abs(total - 1.0) > EPS:
            raise DomainError(f"risk spectrum must integrate to 1 (got {total:.17g})")

    @classmethod
    def from_pieces(cls, pieces: Sequence[Sequence[float]]) -> Spectrum:
        return cls(lc_normalize(pieces))

    @classmethod
    def step(cls, breaks: Sequence[float], levels: Sequence[float]) -> Spectrum:
        return cls(MonoFn.step(breaks, levels))

    @classmethod
    def uniform(cls) -> Spectrum:
        return cls(MonoFn.constant(1.0))

    @classmethod
    def es(cls, p: float) -> Spectrum:
        if not 0 <= p < 1:
            raise DomainError("ES level must lie in [0, 1)")
        if p <= EPS:
            return cls.uniform()
        return cls.step([p], [0.0, 1.0 / (1.0 - p)])

    def __call__(self, t: float) -> float:
        return self.g(t)

    def to_json(self) -> dict:
        return self.g.to_json()

    @classmethod
    def from_json(cls, obj: dict) -> Spectrum:
        """Piece list, or the step form ``{"breaks": [...], "levels": [...]}``."""
        if isinstance(obj, dict) and "breaks" in obj:
            try:
                return cls.step([float(b) for b in obj["breaks"]], [float(v) for v in obj["levels"]])
            except (KeyError, TypeError, ValueError) as exc:
                raise DomainError(f"malformed step spectrum: {exc}") from None
        return cls(lc_normalize(_pieces_from_json(obj)))


@dataclass(frozen=True)
class ESMixture:
    lambda0: float
    terms: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if self.lambda0 < -EPS:
            raise DomainError("lambda0 must be non-negative")
        prev = 0.0
        for alpha, lam in self.terms:
            if not prev < alpha < 1:
                raise DomainError("ES levels must be strictly increasing in (0, 1)")
            if lam <= 0:
                raise DomainError("ES weights must be positive")
            prev = alpha
        total = self.lambda0 + sum(lam for _, lam in self.terms)
        if abs(total - 1.0) > 1e-9:
            raise DomainError(f"mixture weights must sum to 1 (got {total:.17g})")

    def evaluate(self, x: PLRV) -> float:
        return self.lambda0 * mean(x) + sum(lam * es(x, alpha) for alpha, lam in self.terms)

    def spectrum(self) -> Spectrum:
        breaks = [alpha for alpha, _ in self.terms]
        levels = [self.lambda0]
        for alpha, lam in self.terms:
            levels.append(levels[-1] + lam / (1.0 - alpha))
        return Spectrum.step(breaks, levels)

    def to_json(self) -> dict:
        return {
            "lambda0": self.lambda0,
            "terms": [{"alpha": a, "lambda": lam} for a, lam in self.terms],
        }

    @classmethod
    def from_json(cls, obj: dict) -> ESMixture:
        try:
            terms = tuple((float(t["alpha"]), float(t["lambda"])) for t in obj["terms"])
            return cls(float(obj["lambda0"]), terms)
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed ES mixture: {exc}") from None


def _as_monofn(g: Spectrum | MonoFn) -> MonoFn:
    return g.g if isinstance(g, Spectrum) else g


def rho(g: Spectrum | MonoFn, x: PLRV) -> float:
    """``int_0^1 g(t) Q_x(t) dt``, exact."""
    return product_integral(_as_monofn(g).pieces, quantile_fn(x).pieces)


def is_additive_on(g: Spectrum | MonoFn, xs: Sequence[PLRV]) -> bool:
    """Additivity of ``rho_g`` on ``xs``, i.e. g-comonotonicity."""
    return is_g_comonotonic(xs, _as_monofn(g))


def es_mixture(g: Spectrum) -> ESMixture | None:
    """``lambda_0 = gamma_0`` and ``lambda_i = (gamma_i - gamma_{i-1})(1 - alpha_i)``.

    None when the spectrum is not a step function.
    """
    if not g.g.is_step():
        return None
    pieces = g.g.pieces
    terms = []
    for prev, cur in zip(pieces, pieces[1:]):
        jump = cur[2] - prev[3]
        if jump > EPS:
            terms.append((cur[0], jump * (1.0 - cur[0])))
    return ESMixture(pieces[0][2], tuple(terms))


def distortion_of_spectrum(g: Spectrum | MonoFn) -> DistortionFn:
    """Distortion with ``I_h = rho_g`` (its conjugate integrates ``g``)."""
    return DistortionFn.from_weight(_as_monofn(g))


def spectrum_of_distortion(h: KnotFunction) -> Spectrum | None:
    """The spectrum ``g = d(conjugate h)/dt``, or None if ``I_h`` is not spectral.

    Needs a continuous ``h`` whose conjugate has an increasing, piecewise
    linear derivative (segments at most quadratic) and ``h(1) = 1``.
    """
    hc = conjugate(h)
    if any(not hc.is_continuous_at(i) for i in range(len(hc.knots))):
        return None
    pieces = []
    for j, c in enumerate(hc.curves):
        a, b = hc.knots[j].t, hc.knots[j + 1].t
        if c is None:
            s = hc.segment_slope(j)
            pieces.append((a, b, s, s))
        elif all(e in (0.0, 1.0, 2.0) for _, e, _, _ in c.terms):
            pieces.append((a, b, c.derivative(a), c.derivative(b)))
        else:
            return None
    try:
        return Spectrum(MonoFn(tuple(pieces)))
    except DomainError:
        return None
