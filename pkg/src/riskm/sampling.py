"""Seeded random instances for property tests and the acceptance suite.

Points are drawn from a dyadic grid so that breakpoints coincide exactly
when they should.
"""

from __future__ import annotations

import random

from ._knots import Knot
from .dependence import COPULAS, GapCopula, GapCopulaSpec, generate
from .distortion import DistortionFn
from .indexsets import ClosedSet, MonoFn, gaps
from .randvar import PLRV
from .spectral import Spectrum

GRID = 256


def _grid_points(rng: random.Random, n: int, lo: int = 1, hi: int = GRID - 1) -> list[float]:
    return [v / GRID for v in sorted(rng.sample(range(lo, hi + 1), n))]


def closed_set(rng: random.Random, max_intervals: int = 8, proper: bool = False) -> ClosedSet:
    """Finite union of closed intervals, some of them singletons."""
    while True:
        n = rng.randint(1, max_intervals)
        pts = _grid_points(rng, 2 * n, 0, GRID)
        ivs = []
        for i in range(n):
            a, b = pts[2 * i], pts[2 * i + 1]
            ivs.append((a, a) if rng.random() < 0.3 else (a, b))
        K = ClosedSet(ivs)
        if not K.is_empty() and not (proper and K == ClosedSet.full()):
            return K


def monofn(rng: random.Random, n_pieces: int = 4, jumps: bool = True) -> MonoFn:
    """Increasing piecewise-linear function with optional jumps and flats."""
    ts = [0.0, *_grid_points(rng, n_pieces - 1), 1.0]
    level = rng.uniform(-2.0, 2.0)
    pieces = []
    for t0, t1 in zip(ts, ts[1:]):
        if jumps and pieces and rng.random() < 0.4:
            level += rng.uniform(0.0, 2.0)
        rise = 0.0 if rng.random() < 0.35 else rng.uniform(0.0, 3.0)
        pieces.append((t0, t1, level, level + rise))
        level += rise
    return MonoFn(tuple(pieces))


def plrv(rng: random.Random, n_pieces: int = 5) -> PLRV:
    ts = [0.0, *_grid_points(rng, n_pieces - 1), 1.0]
    pieces = []
    for t0, t1 in zip(ts, ts[1:]):
        v0 = rng.uniform(-3.0, 3.0)
        v1 = v0 if rng.random() < 0.3 else rng.uniform(-3.0, 3.0)
        pieces.append((t0, t1, v0, v1))
    return PLRV(tuple(pieces))


def _random_knot(rng: random.Random, t: float) -> Knot:
    value = rng.uniform(-1.0, 2.0)
    left = value if rng.random() < 0.7 else rng.uniform(-1.0, 2.0)
    right = value if rng.random() < 0.7 else rng.uniform(-1.0, 2.0)
    return Knot(t, left, value, right)


def distortion(rng: random.Random, n_knots: int = 4) -> DistortionFn:
    """Arbitrary piecewise-linear distortion, jumps allowed."""
    ts = [0.0, *_grid_points(rng, n_knots - 2), 1.0]
    knots = [_random_knot(rng, t) for t in ts]
    knots[0] = Knot(0.0, 0.0, 0.0, rng.choice([0.0, rng.uniform(-1.0, 1.0)]))
    return DistortionFn(knots)


def additive_distortion(rng: random.Random, K: ClosedSet, extra: int = 3) -> DistortionFn:
    """Distortion that is affine on the closure of ``1 - B`` for every gap B of K."""
    closures = [(1.0 - b, 1.0 - a) for a, b in gaps(K)]
    free = [
        v / GRID
        for v in range(1, GRID)
        if not any(c - 1e-12 <= v / GRID <= d + 1e-12 for c, d in closures)
    ]
    ts = sorted({0.0, 1.0, *(t for c, d in closures for t in (c, d))})
    ts = sorted({*ts, *rng.sample(free, min(extra, len(free)))})
    knots = []
    for t in ts:
        k = _random_knot(rng, t)
        if t == 0.0:
            k = Knot(0.0, 0.0, 0.0, k.right)
        if any(abs(t - c) <= 1e-12 for c, _ in closures):
            k = Knot(t, k.left, k.value, k.value)
        if any(abs(t - d) <= 1e-12 for _, d in closures):
            k = Knot(t, k.value, k.value, k.right)
        knots.append(k)
    return DistortionFn(knots)


def step_spectrum(rng: random.Random, max_steps: int = 5) -> Spectrum:
    n = rng.randint(0, max_steps)
    if n == 0:
        return Spectrum.uniform()
    breaks = _grid_points(rng, n)
    levels = [rng.choice([0.0, rng.uniform(0.0, 1.0)])]
    for _ in breaks:
        levels.append(levels[-1] + rng.uniform(0.05, 2.0))
    total = MonoFn.step(breaks, levels).integral()
    return Spectrum.step(breaks, [v / total for v in levels])


def spectrum(rng: random.Random, n_pieces: int = 4) -> Spectrum:
    """Non-negative increasing spectrum, possibly with sloped pieces."""
    g = monofn(rng, n_pieces)
    shift = -min(0.0, g.pieces[0][2])
    pieces = tuple((t0, t1, v0 + shift, v1 + shift) for t0, t1, v0, v1 in g.pieces)
    total = MonoFn(pieces).integral()
    if total <= 1e-6:
        return Spectrum.uniform()
    return Spectrum(MonoFn(tuple((t0, t1, v0 / total, v1 / total) for t0, t1, v0, v1 in pieces)))


def gap_spec(rng: random.Random, K: ClosedSet) -> GapCopulaSpec:
    entries = []
    for g in gaps(K):
        copula = rng.choice(COPULAS)
        param = None
        if copula == "independent":
            param = rng.randint(2, 5)
        elif copula == "swap-blocks":
            param = rng.choice([0.25, 0.5, 0.75])
        entries.append(GapCopula(g, copula, param))
    return GapCopulaSpec(tuple(entries))


def concentrated_vector(
    rng: random.Random, K: ClosedSet, dim: int | None = None, marginals: bool = True
) -> list[PLRV]:
    """K-concentrated vector from a random ordinal sum and random marginals."""
    dim = dim or rng.randint(2, 3)
    margs = [monofn(rng, rng.randint(1, 4)) for _ in range(dim)] if marginals else None
    return generate(K, gap_spec(rng, K), margs, seed=rng.randrange(2**31), dim=dim)
