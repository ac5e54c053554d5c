"""Command-line front end: generate, separate, verify, bench, scaling.

Exit codes: 0 success, 1 separator failure (retry exhaustion), 2 usage or
validation error, 3 internal-consistency assertion. stdout carries
machine-readable output only; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
from pathlib import Path

from .ball import separate_balls
from .bench import bench, bench_csv, grid_scaling, scaling_csv
from .errors import InternalConsistencyError, SeparatorFailure, ValidationError
from .geometry import BodyKind
from .graph import build_graph
from .instances import (
    Instance,
    gen_grid,
    gen_nested_bipartite,
    gen_nested_chain,
    gen_random,
    instance_json,
    load,
    load_csv,
)
from .sphere import separate_spheres
from .verify import check_balanced

EXIT_OK = 0
EXIT_SEPARATOR_FAILURE = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("GEOSEP_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValidationError(f"GEOSEP_SEED must be an integer, got {env!r}")
    return secrets.randbits(64)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_instance(path: str, kind: str | None, d: int | None) -> Instance:
    if path.endswith(".csv"):
        if kind is None or d is None:
            raise ValidationError("CSV input needs --kind and --d")
        return load_csv(path, BodyKind(kind), d)
    return load(path)


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def cmd_generate(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    kind = BodyKind(args.kind)
    if args.grid:
        if args.m is None:
            raise ValidationError("--grid needs an edge target --m")
        inst = gen_grid(args.n, args.m, args.d, kind)
    elif args.nested_chain:
        inst = gen_nested_chain(args.n, args.d, seed)
    elif args.nested_bipartite:
        if args.a is None:
            raise ValidationError("--nested-bipartite needs --a")
        inst = gen_nested_bipartite(args.a, args.d, seed)
    else:
        if args.n is None:
            raise ValidationError("--random needs --n")
        inst = gen_random(
            args.n, args.d, (args.radius_min, args.radius_max), args.box, kind, seed
        )
    _emit(instance_json(inst), args.out)
    summary = f"generated {inst.n} bodies (d={inst.dimension}, kind={inst.kind.value}, seed={seed})"
    if args.with_graph:
        g = build_graph(inst, eps=args.epsilon)
        summary += f", m={g.m}"
    print(summary, file=sys.stderr)
    return EXIT_OK


def cmd_separate(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    inst = _load_instance(args.instance, args.kind, args.d)
    graph = build_graph(inst, eps=args.epsilon)
    if args.algo == "ball":
        if inst.kind is not BodyKind.BALL:
            raise ValidationError("ball algorithm requires a ball instance")
        result = separate_balls(
            inst,
            mode=args.mode,
            seed=seed,
            retry_budget=args.retry_budget,
            eps=args.epsilon,
            graph=graph,
            trace=args.trace,
        )
    else:
        if inst.kind is not BodyKind.SPHERE:
            raise ValidationError("sphere algorithm requires a sphere instance")
        result = separate_spheres(
            inst,
            seed=seed,
            retry_budget=args.retry_budget,
            eps=args.epsilon,
            graph=graph,
            trace=args.trace,
        )
    _emit(result.to_json(), args.out)
    if not result.success:
        print(f"separator failure: {result.failure_reason}", file=sys.stderr)
        return EXIT_SEPARATOR_FAILURE
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    inst = _load_instance(args.instance, args.kind, args.d)
    graph = build_graph(inst, eps=args.epsilon)
    result_doc = json.loads(Path(args.result).read_text())
    separator = result_doc.get("separator", [])
    ok, largest = check_balanced(graph, separator, args.balance)
    report = {
        "balanced": ok,
        "largest_component": largest,
        "separator_size": len(separator),
        "n": graph.n,
        "m": graph.m,
        "c": args.balance,
    }
    _emit(json.dumps(report, sort_keys=True) + "\n", args.out)
    return EXIT_OK if ok else EXIT_SEPARATOR_FAILURE


def cmd_bench(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    sizes = _int_list(args.n) if args.n else []
    rows = bench(
        args.algo,
        sizes,
        d=args.d,
        trials=args.trials,
        seed=seed,
        mode=args.mode,
        retry_budget=args.retry_budget,
    )
    _emit(bench_csv(rows), args.out)
    print(f"bench done: algo={args.algo} sizes={sizes} seed={seed}", file=sys.stderr)
    return EXIT_OK


def cmd_scaling(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    sizes = _int_list(args.n) if args.n else []
    rows, slope = grid_scaling(
        args.algo,
        sizes,
        d=args.d,
        seeds=args.trials,
        seed0=seed,
        mode=args.mode,
        retry_budget=args.retry_budget,
    )
    _emit(scaling_csv(rows), args.out)
    print(f"fitted log-log slope: {slope:.4f}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geosep",
        description="Balanced separators for ball and sphere intersection graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write an instance file")
    family = gen.add_mutually_exclusive_group()
    family.add_argument("--random", action="store_true", help="uniform random bodies (default)")
    family.add_argument("--grid", action="store_true", help="integer grid lower-bound family")
    family.add_argument("--nested-chain", action="store_true", help="nested sphere chain")
    family.add_argument("--nested-bipartite", action="store_true", help="two crossing nested families")
    gen.add_argument("--n", type=int, default=None)
    gen.add_argument("--m", type=int, default=None, help="edge target for --grid")
    gen.add_argument("--a", type=int, default=None, help="family size for --nested-bipartite")
    gen.add_argument("--d", type=int, required=True)
    gen.add_argument("--kind", choices=["ball", "sphere"], default="ball")
    gen.add_argument("--radius-min", type=float, default=0.5)
    gen.add_argument("--radius-max", type=float, default=1.0)
    gen.add_argument("--box", type=float, default=10.0)
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--epsilon", type=float, default=0.0)
    gen.add_argument("--with-graph", action="store_true", help="also report the edge count")
    gen.add_argument("--out", type=str, default=None)
    gen.set_defaults(func=cmd_generate)

    sep = sub.add_parser("separate", help="run a separator pipeline on an instance file")
    sep.add_argument("instance")
    sep.add_argument("--algo", choices=["ball", "sphere"], required=True)
    sep.add_argument("--mode", choices=["exact", "sampled"], default="sampled")
    sep.add_argument("--seed", type=int, default=None)
    sep.add_argument("--d", type=int, default=None, help="dimension, for CSV input")
    sep.add_argument("--kind", choices=["ball", "sphere"], default=None, help="kind, for CSV input")
    sep.add_argument("--epsilon", type=float, default=0.0)
    sep.add_argument("--retry-budget", type=int, default=16)
    sep.add_argument("--trace", action="store_true")
    sep.add_argument("--out", type=str, default=None)
    sep.set_defaults(func=cmd_separate)

    ver = sub.add_parser("verify", help="check a result file against its instance")
    ver.add_argument("instance")
    ver.add_argument("--result", required=True)
    ver.add_argument("--balance", type=float, default=2.0 / 3.0)
    ver.add_argument("--d", type=int, default=None)
    ver.add_argument("--kind", choices=["ball", "sphere"], default=None)
    ver.add_argument("--epsilon", type=float, default=0.0)
    ver.add_argument("--out", type=str, default=None)
    ver.set_defaults(func=cmd_verify)

    ben = sub.add_parser("bench", help="runtime and success-rate table over instance sizes")
    ben.add_argument("--algo", choices=["ball", "sphere"], required=True)
    ben.add_argument("--n", type=str, default="", help="comma-separated sizes")
    ben.add_argument("--d", type=int, default=2)
    ben.add_argument("--trials", type=int, default=5)
    ben.add_argument("--mode", choices=["exact", "sampled"], default="sampled")
    ben.add_argument("--seed", type=int, default=None)
    ben.add_argument("--retry-budget", type=int, default=16)
    ben.add_argument("--out", type=str, default=None)
    ben.set_defaults(func=cmd_bench)

    sca = sub.add_parser("scaling", help="median separator size vs bound on unit grids")
    sca.add_argument("--algo", choices=["ball", "sphere"], required=True)
    sca.add_argument("--n", type=str, default="", help="comma-separated sizes")
    sca.add_argument("--d", type=int, default=2)
    sca.add_argument("--trials", type=int, default=20, help="seeds per size")
    sca.add_argument("--mode", choices=["exact", "sampled"], default="sampled")
    sca.add_argument("--seed", type=int, default=None)
    sca.add_argument("--retry-budget", type=int, default=16)
    sca.add_argument("--out", type=str, default=None)
    sca.set_defaults(func=cmd_scaling)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SeparatorFailure as exc:
        print(f"separator failure: {exc}", file=sys.stderr)
        return EXIT_SEPARATOR_FAILURE
    except InternalConsistencyError as exc:
        print(f"internal consistency error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
