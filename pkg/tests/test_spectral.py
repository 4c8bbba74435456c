import random

import pytest
from hypothesis import given, settings, strategies as st

from riskm import fixtures as fx
from riskm import sampling
from riskm._num import DomainError
from riskm._pieces import product_integral
from riskm.dependence import generate, GapCopulaSpec
from riskm.distortion import builtin, choquet
from riskm.indexsets import ClosedSet, MonoFn, psi
from riskm.oracle import choquet_numeric
from riskm.randvar import PLRV, apply_affine, apply_increasing, es, mean, quantile_fn, sum_rv
from riskm.spectral import (
    ESMixture,
    Spectrum,
    distortion_of_spectrum,
    es_mixture,
    is_additive_on,
    rho,
    spectrum_of_distortion,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
HALF_HALF = Spectrum.step(fx.HALF_HALF_BREAKS, fx.HALF_HALF_LEVELS)


def test_rho_examples():
    assert rho(HALF_HALF, fx.X_FIX) == pytest.approx(2.75)
    assert rho(HALF_HALF, fx.X1_FIX + fx.X_FIX) == pytest.approx(5.5)
    assert rho(HALF_HALF, fx.X2_FIX + fx.X_FIX) == pytest.approx(5.125)
    h = distortion_of_spectrum(HALF_HALF)
    assert choquet_numeric(h, fx.X2_FIX + fx.X_FIX) == pytest.approx(5.125, abs=1e-4)
    assert rho(Spectrum.uniform(), fx.X) == pytest.approx(mean(fx.X))
    assert rho(Spectrum.es(0.9), fx.X_FIX) == pytest.approx(es(fx.X_FIX, 0.9))


def test_is_additive_on_examples():
    assert is_additive_on(HALF_HALF, [fx.X_FIX, fx.X1_FIX])
    assert not is_additive_on(HALF_HALF, [fx.X_FIX, fx.X2_FIX])
    assert not is_additive_on(HALF_HALF, [fx.X_FIX, fx.X3_FIX])
    assert is_additive_on(Spectrum.uniform(), [fx.X, fx.Y])


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_additivity_matches_g_comonotonicity(seed):
    rng = random.Random(seed)
    g = sampling.spectrum(rng)
    K = psi(g.g)
    xs = sampling.concentrated_vector(rng, K)
    assert is_additive_on(g, xs)
    assert rho(g, sum_rv(xs)) == pytest.approx(sum(rho(g, x) for x in xs), abs=1e-9)


def test_es_mixture_examples():
    m = es_mixture(HALF_HALF)
    assert m.lambda0 == pytest.approx(0.0)
    assert [a for a, _ in m.terms] == pytest.approx([0.9, 0.95])
    assert [lam for _, lam in m.terms] == pytest.approx([0.5, 0.5])
    assert es_mixture(Spectrum.uniform()) == ESMixture(1.0, ())
    m = es_mixture(Spectrum.es(0.3))
    assert m.lambda0 == pytest.approx(0.0)
    assert len(m.terms) == 1 and m.terms[0] == pytest.approx((0.3, 1.0))
    assert es_mixture(Spectrum.from_pieces([(0.0, 1.0, 0.0, 2.0)])) is None


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_es_mixture_evaluates_like_rho(seed):
    rng = random.Random(seed)
    g = sampling.step_spectrum(rng, rng.randint(0, 5))
    m = es_mixture(g)
    assert m.spectrum().g.equals(g.g, 1e-9)
    x = sampling.plrv(rng)
    assert m.evaluate(x) == pytest.approx(rho(g, x), abs=1e-9)


def test_es_mixture_validation_and_json():
    m = ESMixture(0.2, ((0.5, 0.3), (0.9, 0.5)))
    assert ESMixture.from_json(m.to_json()) == m
    with pytest.raises(DomainError):
        ESMixture(0.5, ((0.5, 0.3),))
    with pytest.raises(DomainError):
        ESMixture(0.0, ((0.9, 0.5), (0.5, 0.5)))
    with pytest.raises(DomainError):
        ESMixture(-0.1, ((0.5, 1.1),))
    with pytest.raises(DomainError):
        ESMixture.from_json({"terms": []})


def test_spectrum_validation_and_json():
    with pytest.raises(DomainError):
        Spectrum.step([0.5], [0.0, 1.0])
    with pytest.raises(DomainError):
        Spectrum.from_pieces([(0.0, 1.0, -1.0, 3.0)])
    with pytest.raises(DomainError):
        Spectrum.es(1.0)
    assert Spectrum.from_json(HALF_HALF.to_json()).g.equals(HALF_HALF.g)
    assert Spectrum.from_json({"breaks": [0.5], "levels": [0.0, 2.0]}).g.equals(Spectrum.es(0.5).g)
    with pytest.raises(DomainError):
        Spectrum.from_json({"breaks": [0.5]})


def test_distortion_round_trips():
    h = distortion_of_spectrum(Spectrum.es(0.9))
    assert all(h(t) == pytest.approx(builtin("es", p=0.9)(t)) for t in (0.0, 0.05, 0.1, 0.5, 1.0))
    g = spectrum_of_distortion(builtin("es", p=0.9))
    assert g.g.equals(Spectrum.es(0.9).g, 1e-9)
    assert spectrum_of_distortion(builtin("var", p=0.5)) is None
    # mean-median deviation is not monotone in the right way
    assert spectrum_of_distortion(builtin("mean_median_dev")) is None
    # MAXVAR's spectrum is unbounded near 1, outside the piecewise linear class
    assert spectrum_of_distortion(builtin("maxvar", alpha=2.0)) is None
    g = spectrum_of_distortion(distortion_of_spectrum(MonoFn(((0.0, 1.0, 0.0, 2.0),))))
    assert g is not None and g(0.5) == pytest.approx(1.0)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_spectrum_distortion_law(seed):
    rng = random.Random(seed)
    g = sampling.spectrum(rng)
    h = distortion_of_spectrum(g)
    back = spectrum_of_distortion(h)
    assert back is not None and back.g.equals(g.g, 1e-9)
    x = sampling.plrv(rng)
    assert choquet(h, x) == pytest.approx(rho(g, x), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(seeds, st.floats(min_value=0, max_value=5), st.floats(min_value=-3, max_value=3))
def test_coherence(seed, lam, c):
    rng = random.Random(seed)
    g = sampling.spectrum(rng)
    x, y = sampling.plrv(rng), sampling.plrv(rng)
    rx = rho(g, x)
    assert rho(g, apply_affine(x, lam, c)) == pytest.approx(lam * rx + c, abs=1e-9 * (1 + lam))
    assert rho(g, x + y) <= rx + rho(g, y) + 1e-9
    bumped = x + PLRV(tuple((t0, t1, abs(v0), abs(v1)) for t0, t1, v0, v1 in y.pieces))
    assert rho(g, bumped) >= rx - 1e-9


def test_hardy_littlewood():
    """E[Z X] is at most int Q_Z Q_X, with equality for comonotonic pairs."""
    rng = random.Random(3)
    K = ClosedSet.points(0.5)
    for _ in range(20):
        z_map, x_map = sampling.monofn(rng, 3), sampling.monofn(rng, 3)
        u, w = generate(K, GapCopulaSpec.uniform(K, "independent"), seed=rng.randrange(1000))
        z = apply_increasing(u, z_map)
        x = apply_increasing(w, x_map)
        bound = _product(quantile_fn(z), quantile_fn(x))
        assert _expect_product(z, x) <= bound + 1e-9
        zc = apply_increasing(u, z_map)
        xc = apply_increasing(u, x_map)
        assert _expect_product(zc, xc) == pytest.approx(bound, abs=1e-9)


def _product(f: MonoFn, g: MonoFn) -> float:
    return product_integral(f.pieces, g.pieces)


def _expect_product(a: PLRV, b: PLRV) -> float:
    # both live on the same sample space [0, 1]
    return product_integral(a.pieces, b.pieces)
