"""Command-line front end: JSON files in, one JSON document out.

Exit codes: 0 success, 1 invalid input or failed self-test, 2 internal guard
(the counterexample search ran out of candidates).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from ._num import DomainError
from .dependence import (
    CounterexampleSearchExhausted,
    GapCopulaSpec,
    additivity_gap,
    counterexample,
    generate,
    is_k_concentrated,
    witness_z,
)
from .distortion import DistortionFn, additivity_core, choquet, is_k_additive
from .indexsets import ClosedSet, MonoFn
from .oracle import choquet_numeric, concentration_grid
from .randvar import PLRV, quantile_left, quantile_right
from .spectral import Spectrum, es_mixture


def _fmt(obj) -> str:
    """JSON with every float at 17 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise DomainError("non-finite number in output")
        text = format(obj, ".17g")
        return text if "." in text or "e" in text else text + ".0"
    if isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_fmt(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _load(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise DomainError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: invalid JSON ({exc})") from None


def _rvs(paths: list[str]) -> list[PLRV]:
    if not paths:
        raise DomainError("at least one random variable file is required")
    return [PLRV.from_json(_load(p)) for p in paths]


def _write(out_dir: str, name: str, obj: dict) -> str:
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    path = d / name
    path.write_text(_fmt(obj) + "\n")
    return str(path)


def cmd_eval(args) -> dict:
    h = DistortionFn.from_json(_load(args.distortion))
    x = PLRV.from_json(_load(args.rv))
    out = {"value": choquet(h, x)}
    if args.oracle:
        out["oracle"] = choquet_numeric(h, x, args.grid)
    return out


def cmd_quantile(args) -> dict:
    x = PLRV.from_json(_load(args.rv))
    fn = quantile_left if args.side == "left" else quantile_right
    return {"value": fn(x, args.p)}


def cmd_conc(args) -> dict:
    K = ClosedSet.from_json(_load(args.set))
    xs = _rvs(args.rvs)
    ok, report = is_k_concentrated(xs, K)
    out = {"concentrated": ok, **report.to_json()}
    if args.oracle:
        out["oracle"] = concentration_grid(xs, K)
    return out


def cmd_kadd(args) -> dict:
    h = DistortionFn.from_json(_load(args.distortion))
    return {"additive": is_k_additive(h, ClosedSet.from_json(_load(args.set)))}


def cmd_core(args) -> dict:
    core, flags = additivity_core(DistortionFn.from_json(_load(args.distortion)))
    return {"core": ClosedSet(core.canonical()).to_json(), "flags": [f.to_json() for f in flags]}


def cmd_decompose(args) -> dict:
    mix = es_mixture(Spectrum.from_json(_load(args.spectrum)))
    return {"mixture": None if mix is None else mix.to_json()}


def cmd_witness(args) -> dict:
    return witness_z(_rvs(args.rvs), ClosedSet.from_json(_load(args.set))).to_json()


def cmd_gen(args) -> dict:
    K = ClosedSet.from_json(_load(args.set))
    spec = GapCopulaSpec.from_json(_load(args.spec)) if args.spec else GapCopulaSpec()
    marginals = [MonoFn.from_json(_load(p)) for p in args.marginal] or None
    xs = generate(K, spec, marginals, seed=args.seed, dim=args.dim)
    files = [_write(args.out_dir, f"x{i + 1}.json", x.to_json()) for i, x in enumerate(xs)]
    return {"files": files, "seed": args.seed}


def cmd_counterexample(args) -> dict:
    h = DistortionFn.from_json(_load(args.distortion))
    K = ClosedSet.from_json(_load(args.set))
    pair = counterexample(h, K, seed=args.seed)
    if pair is None:
        return {"additive": True, "files": None}
    files = [_write(args.out_dir, f"{n}.json", x.to_json()) for n, x in zip("xy", pair)]
    return {"additive": False, "files": files, "gap": additivity_gap(h, pair)}


def cmd_selftest(args) -> dict:
    from .acceptance import run_all

    outcomes = run_all()
    for o in outcomes:
        print(o.line(), file=sys.stderr)
    return {
        "passed": all(o.passed for o in outcomes),
        "criteria": [
            {"number": o.number, "title": o.title, "passed": o.passed, "detail": o.detail}
            for o in outcomes
        ],
    }


def _default_seed() -> int:
    raw = os.environ.get("RISKM_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise DomainError(f"RISKM_SEED must be an integer, got {raw!r}") from None


def build_parser(default_seed: int = 0) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riskm", description="Distortion riskmetrics and partial comonotonicity."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="Choquet integral I_h(X)")
    p.add_argument("--distortion", required=True)
    p.add_argument("--rv", required=True)
    p.add_argument("--oracle", action="store_true", help="also integrate numerically")
    p.add_argument("--grid", type=int, default=1_000_000)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("quantile", help="left or right quantile")
    p.add_argument("--rv", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--side", choices=("left", "right"), default="left")
    p.set_defaults(func=cmd_quantile)

    p = sub.add_parser("conc", help="K-concentration with tail certificates")
    p.add_argument("--set", required=True)
    p.add_argument("--oracle", action="store_true", help="also run the level-grid screen")
    p.add_argument("rvs", nargs="+")
    p.set_defaults(func=cmd_conc)

    p = sub.add_parser("kadd", help="is I_h K-additive")
    p.add_argument("--distortion", required=True)
    p.add_argument("--set", required=True)
    p.set_defaults(func=cmd_kadd)

    p = sub.add_parser("core", help="minimal additivity set and accumulation flags")
    p.add_argument("--distortion", required=True)
    p.set_defaults(func=cmd_core)

    p = sub.add_parser("decompose", help="ES-mixture form of a step spectrum")
    p.add_argument("--spectrum", required=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("witness", help="reference variable Z for a K-concentrated vector")
    p.add_argument("--set", required=True)
    p.add_argument("rvs", nargs="+")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("gen", help="K-concentrated vector from an ordinal sum")
    p.add_argument("--set", required=True)
    p.add_argument("--spec", help="gap copula spec (required when K has gaps)")
    p.add_argument("--marginal", action="append", default=[], help="quantile MonoFn, once per component")
    p.add_argument("--dim", type=int)
    p.add_argument("--seed", type=int, default=default_seed)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("counterexample", help="K-concentrated pair breaking additivity")
    p.add_argument("--distortion", required=True)
    p.add_argument("--set", required=True)
    p.add_argument("--seed", type=int, default=default_seed)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("selftest", help="run the acceptance checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser(_default_seed()).parse_args(argv)
        out = args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(_fmt({"error": str(exc)}))
        return 1
    except CounterexampleSearchExhausted as exc:
        print(f"internal guard: {exc}", file=sys.stderr)
        print(_fmt({"error": str(exc)}))
        return 2
    print(_fmt(out))
    if args.command == "selftest" and not out["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
