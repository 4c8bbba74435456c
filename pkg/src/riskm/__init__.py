"""Exact distortion riskmetrics, partial comonotonicity and ES mixtures on
piecewise-linear random variables."""

from ._num import EPS, DomainError
from .dependence import (
    GapCopulaSpec,
    counterexample,
    generate,
    is_g_comonotonic,
    is_k_concentrated,
    is_p_concentrated,
    tail_event,
    witness_z,
)
from .distortion import (
    DistortionFn,
    additivity_core,
    builtin,
    choquet,
    conjugate,
    decompose,
    is_concave,
    is_k_additive,
)
from .indexsets import ClosedSet, MonoFn, factor, lc_normalize, precedes, psi, v_map
from .randvar import (
    PLRV,
    Event,
    es,
    is_comonotonic,
    quantile_fn,
    quantile_left,
    quantile_right,
    sum_rv,
    var,
    var_plus,
)
from .spectral import ESMixture, Spectrum, es_mixture, is_additive_on, rho

__all__ = [
    "EPS",
    "DomainError",
    "PLRV",
    "Event",
    "ClosedSet",
    "MonoFn",
    "DistortionFn",
    "Spectrum",
    "ESMixture",
    "GapCopulaSpec",
    "quantile_left",
    "quantile_right",
    "quantile_fn",
    "var",
    "var_plus",
    "es",
    "sum_rv",
    "is_comonotonic",
    "v_map",
    "psi",
    "precedes",
    "factor",
    "lc_normalize",
    "conjugate",
    "decompose",
    "choquet",
    "is_k_additive",
    "additivity_core",
    "is_concave",
    "builtin",
    "tail_event",
    "is_p_concentrated",
    "is_k_concentrated",
    "witness_z",
    "is_g_comonotonic",
    "generate",
    "counterexample",
    "rho",
    "is_additive_on",
    "es_mixture",
]
