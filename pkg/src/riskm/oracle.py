"""Slow, direct evaluators used to cross-check the exact engines.

``choquet_numeric`` integrates ``h(P(X > v))`` over the value axis with the
trapezoid rule, computing survival probabilities straight from the pieces.
``choquet_discrete`` is the exact finite sum for atomic laws.
``concentration_grid`` screens K-concentration level by level.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ._knots import KnotFunction
from ._num import EPS, DomainError
from .dependence import p_concentration_levels
from .indexsets import ClosedSet
from .randvar import PLRV

__all__ = ["DiscreteRV", "choquet_numeric", "choquet_discrete", "concentration_grid", "survival"]


@dataclass(frozen=True)
class DiscreteRV:
    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.atoms:
            raise DomainError("need at least one atom")
        if any(p <= 0 for _, p in self.atoms):
            raise DomainError("atom probabilities must be positive")
        total = sum(p for _, p in self.atoms)
        if abs(total - 1.0) > EPS:
            raise DomainError(f"atom probabilities must sum to 1 (got {total:.17g})")

    @classmethod
    def from_step_plrv(cls, x: PLRV) -> DiscreteRV:
        """Atoms of a piecewise-constant variable."""
        mass: dict[float, float] = {}
        for t0, t1, v0, v1 in x.pieces:
            if abs(v1 - v0) > EPS:
                raise DomainError("variable is not piecewise constant")
            mass[v0] = mass.get(v0, 0.0) + (t1 - t0)
        return cls(tuple(sorted(mass.items())))


def survival(x: PLRV, vs: np.ndarray) -> np.ndarray:
    """``P(x > v)`` for every v in ``vs``, straight from the pieces."""
    vs = np.asarray(vs, dtype=float)
    out = np.zeros_like(vs)
    for t0, t1, v0, v1 in x.pieces:
        lo, hi = min(v0, v1), max(v0, v1)
        if hi - lo <= 0.0:
            out += (t1 - t0) * (lo > vs)
        else:
            out += (t1 - t0) * np.clip((hi - vs) / (hi - lo), 0.0, 1.0)
    return out


def choquet_numeric(h: KnotFunction, x: PLRV, grid_n: int = 1_000_000) -> float:
    """Trapezoid rule for ``m h(1) + int_m^M h(P(x > v)) dv`` on ``grid_n`` points."""
    if grid_n < 1000:
        raise DomainError("grid_n must be at least 1000")
    values = [v for _, _, v0, v1 in x.pieces for v in (v0, v1)]
    lo, hi = min(values), max(values)
    top = h(1.0)
    if hi - lo <= 0.0:
        return lo * top
    vs = np.linspace(lo, hi, grid_n)
    s = survival(x, vs)
    # snap survival probabilities onto the knots of h so jump values are read exactly
    for k in h.knots:
        s[np.abs(s - k.t) <= 1e-12] = k.t
    hv = h.vectorized(s)
    return lo * top + float(np.trapezoid(hv, vs))


def choquet_discrete(h: KnotFunction, x: DiscreteRV) -> float:
    """``sum_k v_(k) (h(S_k) - h(S_{k-1}))`` over values in decreasing order."""
    total, s_prev, h_prev = 0.0, 0.0, 0.0
    for v, p in sorted(x.atoms, reverse=True):
        s = min(s_prev + p, 1.0)
        hs = h(s)
        total += v * (hs - h_prev)
        s_prev, h_prev = s, hs
    return total


def concentration_grid(xs: Sequence[PLRV], K: ClosedSet, grid_n: int = 64) -> bool:
    """p-concentration on ``grid_n`` evenly spaced levels of every interval of K.

    A necessary condition for K-concentration; levels 0 and 1 are skipped.
    """
    if grid_n < 64:
        raise DomainError("grid_n must be at least 64")
    levels: set[float] = set()
    for a, b in K.intervals:
        if b - a <= EPS:
            levels.add(a)
        else:
            levels.update(float(p) for p in np.linspace(a, b, grid_n))
    checked = [p for p in sorted(levels) if EPS < p < 1 - EPS]
    return all(ok for ok, _ in p_concentration_levels(xs, checked))
