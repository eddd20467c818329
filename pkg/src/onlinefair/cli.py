"""Command-line interface: run, duel, oracle, bounds, gen, perturb, verify.

All rationals on the wire are ``"p/q"`` strings; instance files use the JSON
schema produced by ``gen``.  Exit code 0 only if every invoked check passes.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .adversaries import AdversarySpec, build_adversary
from .bounds import BoundId, BoundParams, eval_bound, invert_bound, parse_grid, sweep_csv
from .core import Instance, rat, rat_str
from .harness import gen_random_instance, make_instance, perturb, run_duel, run_instance
from .offline import brute_force_best_factor, minimax_online_factor
from .online import ALLOCATOR_NAMES
from .verify import suite_names, verify_all


def _load_instance(path: str) -> Instance:
    with open(path) as fh:
        return Instance.from_json_dict(json.load(fh))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _parse_params(pairs: list[str]) -> dict:
    params = {}
    for pair in pairs:
        name, _, value = pair.partition("=")
        if not _:
            raise SystemExit(f"--param expects name=p/q, got {pair!r}")
        params[name] = rat(value)
    return params


def _adversary_spec(args) -> AdversarySpec:
    return AdversarySpec(construction=args.adversary, a=rat(args.a), n=args.n,
                         params=_parse_params(args.param))


def cmd_run(args) -> int:
    instance = _load_instance(args.instance)
    transcript = run_instance(args.allocator, instance,
                              a=rat(args.a) if args.a else None)
    _emit(transcript.to_json(), args.out)
    return 0


def cmd_duel(args) -> int:
    spec = _adversary_spec(args)
    transcript = run_duel(args.allocator, spec,
                          a=rat(args.allocator_a) if args.allocator_a else None,
                          coerce_identical=args.coerce_identical)
    _emit(transcript.to_json(), args.out)
    return 0


def cmd_oracle(args) -> int:
    if args.mode == "brute-force":
        if not args.instance:
            raise SystemExit("oracle brute-force needs --instance")
        instance = _load_instance(args.instance)
        factor, witness = brute_force_best_factor(instance.truths)
        _emit(json.dumps({"factor": rat_str(factor),
                          "witness": witness.as_lists()}, indent=2), args.out)
    else:
        if not (args.adversary and args.a):
            raise SystemExit("oracle minimax needs --adversary and --a")
        spec = _adversary_spec(args)
        value = minimax_online_factor(build_adversary(spec))
        _emit(json.dumps({"factor": rat_str(value),
                          "below_target": value < spec.a}, indent=2), args.out)
    return 0


def cmd_bounds(args) -> int:
    params = BoundParams(n=args.n, a_tilde=rat(args.atilde))
    if args.sweep:
        ids = [BoundId(i) for i in args.ids.split(",")]
        _emit(sweep_csv(ids, parse_grid(args.grid), params), args.out)
    elif args.eval:
        value = eval_bound(BoundId(args.eval), rat(args.a), params)
        _emit(rat_str(value), args.out)
    elif args.invert:
        value = invert_bound(BoundId(args.invert), rat(args.d), params)
        _emit(rat_str(value), args.out)
    else:
        raise SystemExit("bounds: pass --sweep, --eval, or --invert")
    return 0


def cmd_gen(args) -> int:
    profile = gen_random_instance(args.n, args.T, args.identical, args.seed)
    instance = make_instance(profile, profile)
    _emit(json.dumps(instance.to_json_dict(), indent=2), args.out)
    return 0


def cmd_perturb(args) -> int:
    instance = _load_instance(args.instance)
    d = rat(args.d)
    truths = perturb(instance.predictions, [d] * instance.agents,
                     seed=args.seed, mode=args.mode)
    out = make_instance(instance.predictions, truths)
    _emit(json.dumps(out.to_json_dict(), indent=2), args.out)
    return 0


def cmd_verify(args) -> int:
    names = args.suite or suite_names()
    results = verify_all(names)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="onlinefair",
        description="Online fair division with prediction advice (exact rationals).")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an allocator on an instance file")
    p.add_argument("--instance", required=True)
    p.add_argument("--allocator", required=True, choices=ALLOCATOR_NAMES)
    p.add_argument("--a", help="target factor p/q where applicable")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("duel", help="pit an allocator against a construction")
    p.add_argument("--adversary", required=True)
    p.add_argument("--a", required=True, help="construction target factor p/q")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--param", action="append", default=[], metavar="name=p/q")
    p.add_argument("--allocator", required=True, choices=ALLOCATOR_NAMES)
    p.add_argument("--allocator-a", dest="allocator_a")
    p.add_argument("--coerce-identical", action="store_true")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_duel)

    p = sub.add_parser("oracle", help="brute-force or game-tree certification")
    p.add_argument("mode", choices=["brute-force", "minimax"])
    p.add_argument("--instance", help="instance file (brute-force)")
    p.add_argument("--adversary", help="construction id (minimax)")
    p.add_argument("--a", help="construction target factor p/q (minimax)")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--param", action="append", default=[], metavar="name=p/q")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("bounds", help="evaluate, invert, or sweep accuracy bounds")
    p.add_argument("--sweep", action="store_true")
    p.add_argument("--ids", help="comma-separated bound ids (sweep)")
    p.add_argument("--grid", help="start:stop:step (sweep)")
    p.add_argument("--eval", metavar="ID")
    p.add_argument("--invert", metavar="ID")
    p.add_argument("--a", help="factor p/q (eval)")
    p.add_argument("--d", help="error p/q (invert)")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--atilde", default="1", help="base factor p/q")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("gen", help="generate a seeded random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--identical", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("perturb", help="perturb an instance's predictions exactly")
    p.add_argument("--instance", required=True)
    p.add_argument("--d", required=True, help="per-agent distance p/q")
    p.add_argument("--mode", default="mixed", choices=["values", "extra-goods", "mixed"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_perturb)

    p = sub.add_parser("verify", help="run claim-verification suites")
    p.add_argument("--suite", action="append", help="suite name (repeatable)")
    p.set_defaults(fn=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
