"""The nine acceptance checks, shared by ``riskm selftest`` and the test suite.

Each check returns a :class:`Outcome`; ``run_all`` runs them in order.
"""

from __future__ import annotations

import random
import time
from collections.abc import Callable
from dataclasses import dataclass

from . import fixtures as fx
from . import sampling
from .dependence import (
    CounterexampleSearchExhausted,
    additivity_gap,
    counterexample,
    is_g_comonotonic,
    is_k_concentrated,
    leak_vector,
)
from .distortion import DistortionFn, additivity_core, builtin, choquet, is_k_additive
from .indexsets import ClosedSet, psi, v_map
from .oracle import choquet_numeric, concentration_grid
from .randvar import es, sum_rv, var, var_plus
from .spectral import Spectrum, es_mixture, is_additive_on, rho

TOL = 1e-9


@dataclass
class Outcome:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number}. {self.title}: {self.detail} ({self.seconds:.2f}s)"


def _close(a: float, b: float, tol: float = TOL) -> bool:
    return abs(a - b) <= tol


def worked_example() -> tuple[bool, str]:
    h = DistortionFn.from_weight(fx.WEIGHT_G)
    vx, vs = choquet(h, fx.X), choquet(h, fx.X + fx.Y)
    ok = _close(vx, 2.375) and _close(vs, 4.125)
    return ok, f"rho_g(X)={vx:.12g}, rho_g(X+Y)={vs:.12g}"


def diversification_table() -> tuple[bool, str]:
    rho_half = Spectrum.step(fx.HALF_HALF_BREAKS, fx.HALF_HALF_LEVELS)
    s1, s2, s3 = (x + fx.X_FIX for x in (fx.X1_FIX, fx.X2_FIX, fx.X3_FIX))
    exact = {
        "ES.9(X1+X)": (es(s1, 0.9), 5.0),
        "ES.95(X1+X)": (es(s1, 0.95), 6.0),
        "rho(X1+X)": (rho(rho_half, s1), 5.5),
        "ES.9(X2+X)": (es(s2, 0.9), 5.0),
        "ES.95(X3+X)": (es(s3, 0.95), 6.0),
        "2rho(X)": (2 * rho(rho_half, fx.X_FIX), 5.5),
    }
    bad = [k for k, (got, want) in exact.items() if not _close(got, want)]
    # the reference table lists 5 and 4.5 here; the independent oracle decides instead
    disputed = {
        "ES.95(X2+X)": (es(s2, 0.95), choquet_numeric(builtin("es", p=0.95), s2), 5.0),
        "ES.9(X3+X)": (es(s3, 0.9), choquet_numeric(builtin("es", p=0.9), s3), 4.5),
    }
    for k, (got, oracle, listed) in disputed.items():
        if abs(got - oracle) > 1e-4 or abs(got - listed) <= 1e-4:
            bad.append(k)
    notes = ", ".join(f"{k}={got:.12g} (oracle {o:.6g}, listed {p:g})" for k, (got, o, p) in disputed.items())
    return not bad, ("exact cells match; " if not bad else f"mismatch {bad}; ") + notes


def additivity_sets(seed: int = 0) -> tuple[bool, str]:
    rng = random.Random(seed)
    p, delta = 0.3, 0.05
    h_var = builtin("var", p=p)
    core, flags = additivity_core(h_var)
    checks = {
        "VaR {p} false": not is_k_additive(h_var, ClosedSet.points(p)),
        "VaR [p-d,p] true": is_k_additive(h_var, ClosedSet.interval(p - delta, p)),
        "VaR core/flag": core == ClosedSet.points(p)
        and len(flags) == 1
        and _close(flags[0].p, p)
        and flags[0].side == "left",
        "mmd core": additivity_core(builtin("mean_median_dev"))[0] == ClosedSet.points(0.5)
        and is_k_additive(builtin("mean_median_dev"), ClosedSet.points(0.5)),
    }
    alpha = 0.8
    gini = builtin("gini_shortfall", alpha=alpha, lam=0.5)
    checks["Gini core"] = additivity_core(gini)[0] == ClosedSet.interval(alpha, 1.0)
    checks["Gini [a,1] true"] = is_k_additive(gini, ClosedSet.interval(alpha, 1.0))
    checks["Gini [a+1e-3,1] false"] = not is_k_additive(gini, ClosedSet.interval(alpha + 1e-3, 1.0))
    mv = builtin("maxvar", alpha=2.0)
    draws = [sampling.closed_set(rng, proper=True) for _ in range(100)]
    checks["MAXVAR proper K false"] = not any(is_k_additive(mv, K) for K in draws)
    checks["MAXVAR [0,1] true"] = is_k_additive(mv, ClosedSet.full())
    failed = [k for k, v in checks.items() if not v]
    return not failed, "all rows reproduced" if not failed else f"failed: {failed}"


def round_trip(seed: int = 0, n: int = 1000) -> tuple[bool, str]:
    rng = random.Random(seed)
    bad = 0
    for _ in range(n):
        K = sampling.closed_set(rng, max_intervals=8)
        if psi(v_map(K)) != K:
            bad += 1
    return bad == 0, f"{n - bad}/{n} sets satisfy I(V(K)) = K"


def equivalence(seed: int = 0, n: int = 500) -> tuple[bool, str]:
    rng = random.Random(seed)
    disagree = positives = 0
    for i in range(n):
        K = sampling.closed_set(rng)
        xs = sampling.concentrated_vector(rng, K)
        # alternate the set tested against so both verdicts occur
        if i % 3 == 1:
            target = sampling.closed_set(rng)
        elif i % 3 == 2 and any(0 < v < 1 for iv in K.canonical() for v in iv):
            target, xs = K, leak_vector(K, seed=i)
        else:
            target = K
        a = is_k_concentrated(xs, target)[0]
        b = is_g_comonotonic(xs, v_map(target))
        c = concentration_grid(xs, target)
        positives += a
        disagree += not (a == b == c)
    return disagree == 0, f"{disagree} disagreements over {n} vectors ({positives} concentrated)"


def spectral_additivity(seed: int = 0, n: int = 500) -> tuple[bool, str]:
    rng = random.Random(seed)
    bad = additive = 0
    for i in range(n):
        g = sampling.step_spectrum(rng) if i % 2 else sampling.spectrum(rng)
        K = sampling.closed_set(rng) if rng.random() < 0.6 else psi(g.g)
        xs = sampling.concentrated_vector(rng, K)
        add = is_additive_on(g, xs)
        gap = sum(rho(g, x) for x in xs) - rho(g, sum_rv(xs))
        additive += add
        if add != (abs(gap) <= TOL) or (not add and gap <= TOL):
            bad += 1
    return bad == 0, f"{bad} violations over {n} instances ({additive} additive)"


def es_mixtures(seed: int = 0, n: int = 1000) -> tuple[bool, str]:
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(n):
        g = sampling.step_spectrum(rng)
        x = sampling.plrv(rng)
        worst = max(worst, abs(es_mixture(g).evaluate(x) - rho(g, x)))
    half = es_mixture(Spectrum.step(fx.HALF_HALF_BREAKS, fx.HALF_HALF_LEVELS))
    ok_half = (
        _close(half.lambda0, 0.0)
        and len(half.terms) == 2
        and all(_close(a, b) and _close(lam, 0.5) for (a, lam), b in zip(half.terms, (0.9, 0.95)))
    )
    return worst <= TOL and ok_half, f"max reconstruction error {worst:.3g}; half-half split {'exact' if ok_half else 'wrong'}"


def counterexamples(seed: int = 0, n: int = 200, vectors_per_pair: int = 50) -> tuple[bool, str]:
    rng = random.Random(seed)
    fixed = [
        builtin("maxvar", alpha=2.0),
        builtin("gini_shortfall", alpha=0.7, lam=0.4),
        builtin("var", p=0.5),
        builtin("var_plus", p=0.25),
        builtin("mean_median_dev"),
    ]
    found = missing = 0
    while found < n:
        K = sampling.closed_set(rng, proper=True)
        h = rng.choice(fixed) if rng.random() < 0.2 else sampling.distortion(rng, rng.randint(2, 6))
        if is_k_additive(h, K):
            continue
        found += 1
        try:
            pair = counterexample(h, K, seed=found)
        except CounterexampleSearchExhausted:
            missing += 1
            continue
        if pair is None or abs(additivity_gap(h, pair)) <= TOL or not is_k_concentrated(pair, K)[0]:
            missing += 1
    worst, absent_bad = 0.0, 0
    for _ in range(n):
        K = sampling.closed_set(rng)
        h = sampling.additive_distortion(rng, K)
        absent_bad += counterexample(h, K) is not None
        for _ in range(vectors_per_pair):
            worst = max(worst, abs(additivity_gap(h, sampling.concentrated_vector(rng, K))))
    ok = missing == 0 and absent_bad == 0 and worst <= TOL
    return ok, (
        f"{n - missing}/{n} counterexamples verified; {n - absent_bad}/{n} additive pairs absent; "
        f"max gap on {n * vectors_per_pair} concentrated vectors {worst:.3g}"
    )


def var_chain(seed: int = 0, n: int = 1000) -> tuple[bool, str]:
    rng = random.Random(seed)
    bad = 0
    for _ in range(n):
        p = rng.randrange(1, sampling.GRID) / sampling.GRID
        xs = sampling.concentrated_vector(rng, ClosedSet.points(p))
        s = sum_rv(xs)
        chain = [
            var(s, p),
            sum(var(x, p) for x in xs),
            sum(var_plus(x, p) for x in xs),
            var_plus(s, p),
        ]
        bad += any(a > b + TOL for a, b in zip(chain, chain[1:]))
    return bad == 0, f"{n - bad}/{n} vectors satisfy the chain"


CRITERIA: list[tuple[str, float | None, Callable[[], tuple[bool, str]]]] = [
    ("worked example 2.375 / 4.125", None, worked_example),
    ("diversification tables", 1.0, diversification_table),
    ("additivity-set table", 1.0, additivity_sets),
    ("round trip I(V(K)) = K", None, round_trip),
    ("K-concentration equivalences", None, equivalence),
    ("spectral additivity iff g-comonotonic", 30.0, spectral_additivity),
    ("ES-mixture reconstruction", None, es_mixtures),
    ("counterexample completeness", 60.0, counterexamples),
    ("VaR inequality chain", None, var_chain),
]


def run(number: int) -> Outcome:
    title, budget, check = CRITERIA[number - 1]
    start = time.perf_counter()
    passed, detail = check()
    seconds = time.perf_counter() - start
    if budget is not None and seconds > budget:
        passed = False
        detail += f"; over the {budget:g}s budget"
    return Outcome(number, title, passed, detail, seconds)


def run_all() -> list[Outcome]:
    return [run(i) for i in range(1, len(CRITERIA) + 1)]
