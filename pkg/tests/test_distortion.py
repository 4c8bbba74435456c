import random

import pytest
from hypothesis import given, settings, strategies as st

from riskm import fixtures as fx
from riskm import sampling
from riskm._knots import Knot
from riskm._num import DomainError
from riskm.distortion import (
    DistortionFn,
    additivity_core,
    builtin,
    choquet,
    conjugate,
    decompose,
    is_concave,
    is_k_additive,
)
from riskm.indexsets import ClosedSet, MonoFn
from riskm.randvar import PLRV, apply_affine, apply_increasing, es, mean, quantile_left, quantile_right, sum_rv

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def grid(n=200):
    return [i / n for i in range(n + 1)]


# -- construction ------------------------------------------------------------


def test_distortion_requires_h0_zero():
    with pytest.raises(DomainError):
        DistortionFn([Knot(0.0, 0.0, 0.5, 0.5), Knot(1.0, 1.0, 1.0, 1.0)])
    with pytest.raises(DomainError):
        DistortionFn([Knot(0.1, 0.0, 0.0, 0.0), Knot(1.0, 1.0, 1.0, 1.0)])


def test_json_round_trip_and_builtins():
    h = builtin("gini_shortfall", alpha=0.8, lam=0.3)
    again = DistortionFn.from_json(h.to_json())
    assert all(again(t) == pytest.approx(h(t)) for t in grid())
    es9 = DistortionFn.from_json({"builtin": "es", "params": {"p": 0.9}})
    assert es9(0.05) == pytest.approx(0.5)
    plain = DistortionFn.from_json({"knots": [{"t": 0.0, "value": 0.0, "right": 0.0}, {"t": 1.0, "left": 1.0, "value": 1.0}]})
    assert plain(0.25) == pytest.approx(0.25)
    with pytest.raises(DomainError):
        builtin("nope")
    with pytest.raises(DomainError):
        builtin("es", q=0.5)


def test_gini_formula():
    alpha, lam = 0.7, 0.4
    h = builtin("gini_shortfall", alpha=alpha, lam=lam)
    for t in grid():
        want = min(t / (1 - alpha), 1.0) + 2 * lam * t * max(1 - t - alpha, 0.0) / (1 - alpha) ** 2
        assert h(t) == pytest.approx(want)


# -- conjugate and decomposition ----------------------------------------------


def test_conjugate_examples():
    ident = builtin("mean")
    assert all(conjugate(ident)(t) == pytest.approx(t) for t in grid())
    p = 0.3
    c = conjugate(builtin("var", p=p))
    assert c(p) == 1.0 and c(p - 0.01) == 0.0
    c = conjugate(builtin("es", p=p))
    assert all(c(t) == pytest.approx(max(t - p, 0.0) / (1 - p)) for t in grid())


def test_conjugate_is_pointwise_formula(rng):
    for _ in range(50):
        h = sampling.distortion(rng, 5)
        c = conjugate(h)
        for t in grid(64):
            assert c(t) == pytest.approx(h(1.0) - h(1.0 - t))


def test_decompose_examples():
    h = builtin("es", p=0.2)
    hc, hl, hr = decompose(h)
    assert all(hc(t) == pytest.approx(h(t)) and hl(t) == 0 and hr(t) == 0 for t in grid())
    hc, hl, hr = decompose(builtin("var", p=0.3))
    assert all(hc(t) == pytest.approx(0.0) and hl(t) == pytest.approx(0.0) for t in grid())
    assert hr(0.7) == 0.0 and hr(0.71) == 1.0
    h = DistortionFn([Knot(0.0, 0.0, 0.0, 0.0), Knot(0.5, 0.3, 0.5, 0.7), Knot(1.0, 1.0, 1.0, 1.0)])
    hc, hl, hr = decompose(h)
    assert hl(0.5) == pytest.approx(0.2) and hl.left_limit(0.5) == 0.0
    assert hr(0.5) == 0.0 and hr.right_limit(0.5) == pytest.approx(0.2)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_decomposition_sums_back(seed):
    h = sampling.distortion(random.Random(seed), 6)
    hc, hl, hr = decompose(h)
    assert all(hc.is_continuous_at(i) for i in range(1, len(hc.knots) - 1))
    for t in grid(128):
        assert hc(t) + hl(t) + hr(t) == pytest.approx(h(t))
        assert hc.left_limit(t) + hl.left_limit(t) + hr.left_limit(t) == pytest.approx(h.left_limit(t))


# -- Choquet integral ----------------------------------------------------------


def test_choquet_examples():
    assert choquet(builtin("es", p=0.9), fx.X_FIX) == pytest.approx(2.5)
    h = DistortionFn.from_weight(fx.WEIGHT_G)
    assert choquet(h, fx.X) == pytest.approx(2.375, abs=1e-12)
    assert choquet(h, fx.X + fx.Y) == pytest.approx(4.125, abs=1e-12)
    assert choquet(h, PLRV.constant(2.0)) == pytest.approx(2.0 * h(1.0))


def test_choquet_reproduces_quantiles_and_means(rng):
    for _ in range(30):
        x = sampling.plrv(rng)
        p = rng.uniform(0.05, 0.95)
        assert choquet(builtin("var", p=p), x) == pytest.approx(quantile_left(x, p))
        assert choquet(builtin("var_plus", p=p), x) == pytest.approx(quantile_right(x, p))
        assert choquet(builtin("es", p=p), x) == pytest.approx(es(x, p))
        assert choquet(builtin("mean"), x) == pytest.approx(mean(x))


def test_maxvar_on_uniform():
    assert choquet(builtin("maxvar", alpha=2.0), PLRV.identity()) == pytest.approx(2 / 3)


@settings(max_examples=60, deadline=None)
@given(seeds, st.floats(min_value=0, max_value=10), st.floats(min_value=-5, max_value=5))
def test_homogeneity_and_translation(seed, lam, c):
    rng = random.Random(seed)
    h, x = sampling.distortion(rng), sampling.plrv(rng)
    base = choquet(h, x)
    assert choquet(h, apply_affine(x, lam, 0.0)) == pytest.approx(lam * base, abs=1e-9 * max(1, lam))
    assert choquet(h, x + c) == pytest.approx(base + c * h(1.0), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_comonotonic_additivity(seed):
    rng = random.Random(seed)
    h = sampling.distortion(rng, 5)
    u = PLRV.identity()
    x = apply_increasing(u, sampling.monofn(rng, 3))
    y = apply_increasing(u, sampling.monofn(rng, 3))
    assert choquet(h, x + y) == pytest.approx(choquet(h, x) + choquet(h, y), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_monotonicity_for_increasing_h(seed):
    rng = random.Random(seed)
    g = sampling.monofn(rng, 4, jumps=False)
    lo, hi = g.pieces[0][2], g.pieces[-1][3]
    if hi - lo < 1e-6:
        return
    ts = sorted({0.0, 1.0, *(p[0] for p in g.pieces)})
    h = DistortionFn.from_points(ts, [(g(t) - lo) / (hi - lo) if t > 0 else 0.0 for t in ts])
    x = sampling.plrv(rng)
    y = x + PLRV(tuple((t0, t1, abs(v0), abs(v1)) for t0, t1, v0, v1 in sampling.plrv(rng).pieces))
    assert choquet(h, x) <= choquet(h, y) + 1e-9


@settings(max_examples=60, deadline=None)
@given(seeds, st.floats(min_value=0, max_value=1))
def test_convexity_for_concave_h(seed, a):
    rng = random.Random(seed)
    slopes = sorted((rng.uniform(0, 3) for _ in range(4)), reverse=True)
    ts = [0.0, 0.2, 0.5, 0.8, 1.0]
    vs = [0.0]
    for s, (t0, t1) in zip(slopes, zip(ts, ts[1:])):
        vs.append(vs[-1] + s * (t1 - t0))
    h = DistortionFn.from_points(ts, vs)
    assert is_concave(h)
    x, y = sampling.plrv(rng), sampling.plrv(rng)
    mix = sum_rv([apply_affine(x, a, 0.0), apply_affine(y, 1 - a, 0.0)])
    assert choquet(h, mix) <= a * choquet(h, x) + (1 - a) * choquet(h, y) + 1e-9


# -- K-additivity ----------------------------------------------------------------


def test_k_additivity_table():
    assert is_k_additive(builtin("mean_median_dev"), ClosedSet.points(0.5))
    alpha = 0.75
    gini = builtin("gini_shortfall", alpha=alpha, lam=0.5)
    assert is_k_additive(gini, ClosedSet.interval(alpha, 1.0))
    assert not is_k_additive(gini, ClosedSet.interval(alpha + 1e-3, 1.0))
    mv = builtin("maxvar", alpha=2.0)
    assert is_k_additive(mv, ClosedSet.full())
    assert not is_k_additive(mv, ClosedSet.interval(0.0, 0.999))
    p = 0.3
    assert not is_k_additive(builtin("var", p=p), ClosedSet.points(p))
    assert is_k_additive(builtin("var", p=p), ClosedSet.interval(p - 0.05, p))
    assert is_k_additive(builtin("var_plus", p=p), ClosedSet.interval(p, p + 0.05))
    assert not is_k_additive(builtin("var_plus", p=p), ClosedSet.interval(p - 0.05, p))


def test_full_set_always_additive(rng):
    for _ in range(100):
        assert is_k_additive(sampling.distortion(rng, 6), ClosedSet.full())


def test_cores():
    core, flags = additivity_core(builtin("es", p=0.9))
    assert core == ClosedSet.points(0.9) and flags == []
    core, flags = additivity_core(builtin("mean_median_dev"))
    assert core == ClosedSet.points(0.5) and flags == []
    core, flags = additivity_core(builtin("var", p=0.3))
    assert core == ClosedSet.points(0.3)
    assert [(f.p, f.side) for f in flags] == [(pytest.approx(0.3), "left")]
    core, _ = additivity_core(builtin("gini_shortfall", alpha=0.8, lam=0.2))
    assert core == ClosedSet.interval(0.8, 1.0)
    assert additivity_core(builtin("maxvar", alpha=3.0))[0] == ClosedSet.full()


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_core_characterises_additivity(seed):
    rng = random.Random(seed)
    h = sampling.distortion(rng, rng.randint(2, 6))
    core, flags = additivity_core(h)
    for _ in range(10):
        K = sampling.closed_set(rng)
        if rng.random() < 0.3:
            K = ClosedSet([*core.intervals, *K.intervals])
        expected = core.issubset(K) and all(f.satisfied_by(K) for f in flags)
        assert is_k_additive(h, K) == expected


def test_is_concave():
    assert is_concave(builtin("mean"))
    assert is_concave(builtin("es", p=0.4))
    assert is_concave(builtin("maxvar", alpha=2.0))
    assert not is_concave(DistortionFn.from_points([0.0, 0.5, 1.0], [0.0, 0.25, 1.0]))
    assert not is_concave(builtin("var", p=0.5))
    # weight increasing in the level gives a concave distortion
    assert is_concave(DistortionFn.from_weight(MonoFn(((0.0, 1.0, 0.0, 2.0),))))
