import random

import pytest
from hypothesis import given, settings, strategies as st

from riskm import fixtures as fx
from riskm import sampling
from riskm._knots import Knot, ValueMap
from riskm._num import DomainError
from riskm.indexsets import MonoFn
from riskm.randvar import (
    PLRV,
    Event,
    apply_affine,
    apply_increasing,
    distributional_transform,
    es,
    ess_inf,
    ess_sup,
    is_comonotonic,
    mean,
    quantile_fn,
    quantile_left,
    quantile_right,
    sum_rv,
    var,
    var_plus,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def brute_quantile(x: PLRV, p: float, side: str, n: int = 200_001) -> float:
    """Left/right quantile from sorted samples at cell midpoints."""
    vals = sorted(x((i + 0.5) / n) for i in range(n))
    k = p * n
    i = int(k - 1e-9) if side == "left" else int(k + 1e-9)
    return vals[min(max(i, 0), n - 1)]


# -- quantiles ---------------------------------------------------------------


def test_quantile_left_examples():
    assert quantile_left(PLRV.constant(5.0), 0.3) == 5.0
    assert quantile_left(fx.X, 5 / 6) == pytest.approx(3.0)
    assert quantile_left(PLRV.identity(), 0.25) == pytest.approx(0.25)
    assert quantile_left(fx.X, 1.0) == pytest.approx(3.0)


def test_quantile_right_examples():
    assert quantile_right(fx.X, 2 / 3) == pytest.approx(1.5)
    assert quantile_right(PLRV.identity(), 0.0) == 0.0
    assert quantile_right(PLRV.steps([0.5], [0.0, 1.0]), 0.5) == 1.0


def test_quantiles_match_brute_force():
    for p in (0.3, 2 / 3, 0.75, 5 / 6, 0.9):
        assert quantile_left(fx.X, p) == pytest.approx(brute_quantile(fx.X, p, "left"), abs=1e-3)


@pytest.mark.parametrize("p", [0.0, -0.1, 1.5])
def test_quantile_left_domain(p):
    with pytest.raises(DomainError):
        quantile_left(fx.X, p)


@pytest.mark.parametrize("p", [1.0, -0.1])
def test_quantile_right_domain(p):
    with pytest.raises(DomainError):
        quantile_right(fx.X, p)


def test_quantile_fn_examples():
    assert quantile_fn(PLRV.identity()).equals(MonoFn.identity())
    x = PLRV(((0.0, 0.5, 2.0, 2.0), (0.5, 1.0, 0.0, 1.0)))
    assert quantile_fn(x).equals(MonoFn(((0.0, 0.5, 0.0, 1.0), (0.5, 1.0, 2.0, 2.0))))
    q = quantile_fn(fx.X)
    assert q(0.5) == 0.0
    assert q(0.75) == pytest.approx(1.5 + 9 * (0.75 - 2 / 3))
    assert q(0.9) == pytest.approx(3.0)


def test_quantile_fn_matches_sorted_samples():
    x = PLRV(((0.0, 0.3, 2.0, 0.0), (0.3, 0.6, 1.0, 1.0), (0.6, 1.0, -1.0, 3.0)))
    q = quantile_fn(x)
    for p in (0.1, 0.25, 0.5, 0.7, 0.95):
        assert q(p) == pytest.approx(brute_quantile(x, p, "left"), abs=1e-3)
        assert quantile_right(x, p) == pytest.approx(brute_quantile(x, p, "right"), abs=1e-3)


def test_es_examples():
    assert es(fx.X_FIX, 0.9) == pytest.approx(2.5)
    assert es(fx.X_FIX, 0.95) == pytest.approx(3.0)
    assert es(PLRV.constant(1.7), 0.4) == pytest.approx(1.7)
    assert es(fx.X, 1.0) == ess_sup(fx.X) == pytest.approx(3.0)
    assert var(fx.X, 0.5) == quantile_left(fx.X, 0.5)
    assert var_plus(fx.X, 0.5) == quantile_right(fx.X, 0.5)
    assert ess_inf(fx.X) == 0.0


def test_mean():
    assert mean(PLRV.identity()) == pytest.approx(0.5)
    assert mean(fx.X1_FIX) == pytest.approx(0.05 * (1 + 2 + 3))


# -- algebra -----------------------------------------------------------------


def test_sum_examples():
    s = sum_rv([fx.X, fx.Y])
    assert s.equals(PLRV.steps([2 / 3, 5 / 6], [0.0, 3.0, 6.0]))
    assert sum_rv([fx.X, PLRV.constant(0.0)]).equals(fx.X)
    assert sum_rv([fx.X, apply_affine(fx.X, -1.0, 0.0)]).equals(PLRV.constant(0.0))
    with pytest.raises(DomainError):
        sum_rv([])


def test_apply_increasing_examples():
    x = PLRV.identity()
    assert apply_increasing(x, ValueMap.identity(0.0, 1.0)).equals(x)
    assert apply_increasing(x, lambda v: 2 * v + 1).equals(PLRV(((0.0, 1.0, 1.0, 3.0),)))


def test_apply_increasing_rejects_decreasing_map():
    with pytest.raises(DomainError):
        apply_increasing(PLRV.identity(), lambda v: -v)


def _assert_lc_law(x: PLRV, f: ValueMap, n: int = 1000) -> None:
    """Q_{f(x)} = f o Q_x almost everywhere, checked off the knots."""
    lhs = quantile_fn(apply_increasing(x, f))
    q = quantile_fn(x)
    for i in range(n):
        p = (i + 0.5) / n + 1e-7
        assert lhs(p) == pytest.approx(f(q(p)), abs=1e-9)


def test_lc_law_for_floor_map():
    floor = ValueMap(
        [Knot(0.0, 0.0, 0.0, 0.0), Knot(1.5, 0.0, 1.5, 1.5), Knot(3.0, 1.5, 3.0, 3.0), Knot(4.0, 3.0, 3.0, 3.0)]
    )
    y = apply_increasing(fx.X, floor)
    assert y.equals(PLRV.steps([2 / 3, 5 / 6], [0.0, 1.5, 3.0]))
    _assert_lc_law(fx.X, floor)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_lc_law_random(seed):
    rng = random.Random(seed)
    x = sampling.plrv(rng, rng.randint(1, 4))
    g = sampling.monofn(rng, rng.randint(1, 4))
    # stretch g's domain [0, 1] over [-3, 3], the value range of sampled variables
    f = ValueMap([Knot(6 * k.t - 3, k.left, k.value, k.right) for k in ValueMap.from_monofn(g).knots])
    _assert_lc_law(x, f)


def test_is_comonotonic_examples():
    assert is_comonotonic([fx.X_FIX, fx.X1_FIX])
    assert is_comonotonic([fx.X, PLRV.constant(2.0)])
    assert not is_comonotonic([fx.X, fx.Y])
    assert not is_comonotonic([fx.X_FIX, fx.X2_FIX])


def test_distributional_transform_is_uniform_and_recovers_x():
    x = PLRV(((0.0, 0.4, 1.0, 1.0), (0.4, 0.7, 3.0, 0.0), (0.7, 1.0, 1.0, 1.0)))
    u = distributional_transform(x)
    assert quantile_fn(u).equals(MonoFn.identity())
    q = quantile_fn(x)
    for i in range(1, 400):
        w = (i + 0.5) / 400
        assert q(u(w)) == pytest.approx(x(w), abs=1e-9) or q.right(u(w)) == pytest.approx(x(w), abs=1e-9)


# -- properties --------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_quantile_properties(seed):
    rng = random.Random(seed)
    x = sampling.plrv(rng, rng.randint(1, 6))
    ps = [i / 37 for i in range(1, 37)]
    lefts = [quantile_left(x, p) for p in ps]
    rights = [quantile_right(x, p) for p in ps]
    assert all(a <= b + 1e-9 for a, b in zip(lefts, rights))
    assert all(a <= b + 1e-9 for a, b in zip(lefts, lefts[1:]))
    assert all(a <= b + 1e-9 for a, b in zip(rights, rights[1:]))
    ess = [es(x, p) for p in ps]
    assert all(e >= v - 1e-9 for e, v in zip(ess, lefts))
    assert all(a <= b + 1e-9 for a, b in zip(ess, ess[1:]))


@settings(max_examples=60, deadline=None)
@given(seeds, st.floats(min_value=-5, max_value=5))
def test_translation_at_quantile_level(seed, c):
    rng = random.Random(seed)
    x = sampling.plrv(rng)
    assert quantile_fn(x + c).equals(
        MonoFn(tuple((t0, t1, v0 + c, v1 + c) for t0, t1, v0, v1 in quantile_fn(x).pieces)), 1e-9
    )


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_comonotonic_invariance_and_quantile_additivity(seed):
    rng = random.Random(seed)
    u = PLRV.identity()
    xs = [apply_increasing(u, sampling.monofn(rng, rng.randint(1, 4))) for _ in range(3)]
    assert is_comonotonic(xs)
    fs = [sampling.monofn(rng, 3) for _ in xs]
    transformed = [
        apply_increasing(x, ValueMap.from_monofn(f)) for x, f in zip(xs, fs)
    ]
    assert is_comonotonic(transformed)
    total = quantile_fn(sum_rv(xs))
    parts = [quantile_fn(x) for x in xs]
    for i in range(1, 200):
        p = i / 200 - 1e-7
        assert total(p) == pytest.approx(sum(q(p) for q in parts), abs=1e-9)


# -- representation ----------------------------------------------------------


def test_plrv_validation():
    with pytest.raises(DomainError):
        PLRV(((0.0, 0.5, 0.0, 1.0), (0.6, 1.0, 0.0, 1.0)))
    with pytest.raises(DomainError):
        PLRV(((0.0, 0.6, 0.0, 1.0), (0.5, 1.0, 0.0, 1.0)))
    with pytest.raises(DomainError):
        PLRV(((0.0, 1.0, 0.0, float("inf")),))
    with pytest.raises(DomainError):
        PLRV.from_json({"pieces": [{"t0": 0.0, "t1": 1.0, "v0": 0.0}]})


def test_plrv_json_round_trip():
    assert PLRV.from_json(fx.X_FIX.to_json()).equals(fx.X_FIX)


def test_collinear_pieces_merge():
    x = PLRV(((0.0, 0.5, 0.0, 0.5), (0.5, 1.0, 0.5, 1.0)))
    assert len(x.pieces) == 1


def test_event_basics():
    a = Event([(0.9, 1.0)])
    assert a.measure == pytest.approx(0.1)
    assert a.complement() == Event([(0.0, 0.9)])
    assert 0.95 in a and 0.5 not in a
    assert Event.from_json(a.to_json()) == a
