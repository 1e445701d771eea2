"""Command-line front end for uniform finite generation of compact Lie groups.

Exit codes: 0 success, 2 parse/usage error, 3 not generating,
4 no convergence, 5 coverage not reached, 6 lift budget exhausted,
7 verification mismatch.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import io
from .algebra import CLOSURE_TOL, MAX_DEPTH, bracket_closure
from .chart import SolverConfig
from .completion import CompletionConfig, complete_basis, rk_schedule
from .errors import (
    BranchCut,
    BudgetExhausted,
    CoverageNotReached,
    DepthExceeded,
    DimMismatch,
    EmptyInput,
    IndexOutOfRange,
    InvalidDims,
    NoConvergence,
    NonFinite,
    NotInAlgebra,
    NotInGroup,
    StuckNoIndependentConjugate,
)

INPUT_ERRORS = (io.FormatError, InvalidDims, DimMismatch, EmptyInput, IndexOutOfRange, NonFinite,
                NotInAlgebra, NotInGroup, BranchCut, OSError)
from .groups import DEMO_ALGEBRA_DIMS, DEMOS
from .matrix import group_distance
from .nonneg import RecurrenceConfig, ReverseCache, lift_word_nonneg
from .synthesis import NetConfig, build_net, synthesize
from .words import GeneratorWord, replay

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NOT_GENERATING = 3
EXIT_NO_CONVERGENCE = 4
EXIT_COVERAGE = 5
EXIT_BUDGET = 6
EXIT_MISMATCH = 7

VERIFY_SLACK = 1.1
VERIFY_FLOOR = 1e-12

log = logging.getLogger("unigen")


def _emit(report: dict, out: str | None) -> None:
    text = io.dumps(report)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    gens, expected = io.load_problem(args.problem)
    try:
        closure = bracket_closure(gens, args.closure_tol, args.max_depth)
        dim = closure.dim_algebra
        depth_ok = True
    except DepthExceeded as exc:
        log.error("%s", exc)
        dim, depth_ok = None, False
    generating = depth_ok and (expected is None or dim == expected)
    report = {
        "command": "validate",
        "config": {"closure_tol": args.closure_tol, "max_depth": args.max_depth},
        "seed": None,
        "results": {
            "m": gens.m,
            "dim": gens.dim,
            "structure": gens.structure.value,
            "closure_dim": dim,
            "expected_algebra_dim": expected,
            "generating": generating,
        },
    }
    _emit(report, args.out)
    return EXIT_OK if generating else EXIT_NOT_GENERATING


def cmd_bound(args) -> int:
    if args.problem:
        gens, _ = io.load_problem(args.problem)
        n, m = bracket_closure(gens).dim_algebra, gens.m
    elif args.n is not None and args.m is not None:
        n, m = args.n, args.m
    else:
        raise InvalidDims("give a problem file or both --n and --m")
    sched = rk_schedule(n, m)
    _emit({"command": "bound", "config": {"n": n, "m": m}, "seed": None,
           "results": {"r": list(sched.values), "bound": sched.bound}}, args.out)
    return EXIT_OK


class NotGenerating(Exception):
    pass


def _load_or_build_basis(gens, expected, args):
    if args.basis_cache and Path(args.basis_cache).exists():
        basis = io.decode_basis(io.read_json(args.basis_cache))
        return basis
    closure = bracket_closure(gens)
    if expected is not None and closure.dim_algebra != expected:
        raise NotGenerating(f"generators span a {closure.dim_algebra}-dimensional algebra, expected {expected}")
    basis = complete_basis(gens, closure, CompletionConfig())
    if args.basis_cache:
        io.write_json(args.basis_cache, io.encode_basis(basis))
    return basis


def _load_or_build_net(basis, args, net_cfg, solver_cfg):
    path = args.net_cache
    if path and Path(path).exists():
        data = io.read_json(path)
        net = io.decode_net(data, basis.generators)
        if net.radius == args.radius and net.config == net_cfg:
            return net
        log.info("net cache %s does not match the requested config; rebuilding", path)
    net = build_net(basis, args.radius, net_cfg, solver_cfg)
    if path:
        io.write_json(path, io.encode_net(net, basis.generators))
    return net


def cmd_synthesize(args) -> int:
    gens, expected = io.load_problem(args.problem)
    targets = io.load_targets(args.target)
    timings = {}
    start = time.perf_counter()
    basis = _load_or_build_basis(gens, expected, args)
    timings["basis"] = time.perf_counter() - start

    solver_cfg = SolverConfig(final_tol_total=args.tol)
    net_cfg = NetConfig(seed=args.seed, stall_count=args.stall_count, repair_probes=args.repair_probes,
                        validation_samples=args.validation_samples)
    start = time.perf_counter()
    net = _load_or_build_net(basis, args, net_cfg, solver_cfg)
    timings["net"] = time.perf_counter() - start

    sched = basis.schedule
    uniform_bound = net.max_word_length + sched.bound
    cache = ReverseCache()
    results = []
    start = time.perf_counter()
    for k, target in enumerate(targets):
        res = synthesize(target, net, basis, solver_cfg)
        entry = {
            "target_index": k,
            "word": io.encode_word(res.word),
            "net_point_index": res.net_point_index,
            "chart_word_length": res.chart_word_length,
            "bound_ok": res.word.length <= uniform_bound and res.chart_word_length <= sched.bound,
        }
        if args.nonneg:
            lifted = lift_word_nonneg(res.word, gens, args.lift_tol, RecurrenceConfig(), cache)
            err = group_distance(replay(lifted.letters, gens), target)
            entry["nonneg_word"] = io.encode_word(GeneratorWord(lifted.letters, uniform_bound, err))
            entry["lift_error"] = lifted.lift_error
            entry["lifted_letters"] = lifted.lifted_count
        results.append(entry)
    timings["synthesis"] = time.perf_counter() - start

    report = {
        "command": "synthesize",
        "config": {
            "radius": args.radius,
            "tol": args.tol,
            "lift_tol": args.lift_tol,
            "nonneg": args.nonneg,
            "net": asdict(net_cfg),
            "solver": asdict(solver_cfg),
        },
        "seed": args.seed,
        "bounds": {
            "n": basis.n,
            "m": basis.m,
            "r": list(sched.values),
            "achieved_r": list(basis.achieved_r),
            "chart_bound": sched.bound,
            "net_max_word_length": net.max_word_length,
            "uniform_bound": uniform_bound,
        },
        "net": {"size": len(net), "radius": net.radius, "coverage": asdict(net.coverage_stats)},
        "results": results,
        "timings": timings,
    }
    _emit(report, args.out)
    return EXIT_OK


def _word_from_file(data, index: int, nonneg: bool) -> dict:
    if isinstance(data, dict) and "letters" in data:
        return data
    key = "nonneg_word" if nonneg else "word"
    if isinstance(data, dict) and "results" in data:
        try:
            return data["results"][index][key]
        except (IndexError, KeyError, TypeError) as exc:
            raise io.FormatError(f"report has no results[{index}].{key}") from exc
    if isinstance(data, dict) and key in data:
        return data[key]
    raise io.FormatError("word file: expected a word object or a synthesize report")


def cmd_verify(args) -> int:
    data = _word_from_file(io.read_json(args.word), args.index, args.nonneg)
    word = io.decode_word(data)
    gens, _ = io.load_problem(args.problem)
    targets = io.load_targets(args.target)
    if not 0 <= args.index < len(targets):
        raise io.FormatError(f"target index {args.index} out of range")
    target = targets[args.index]
    stated = word.product_error
    error = group_distance(replay(word, gens), target)
    ok = error <= max(stated * VERIFY_SLACK, VERIFY_FLOOR)
    _emit({"command": "verify", "config": {"index": args.index, "nonneg": args.nonneg}, "seed": None,
           "results": {"stated_error": stated, "recomputed_error": error, "length": word.length,
                       "min_time": word.min_time, "passed": ok}}, args.out)
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_demo(args) -> int:
    gens = DEMOS[args.name]()
    _emit(io.encode_problem(gens, DEMO_ALGEBRA_DIMS[args.name]), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="unigen", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check that the generators generate the expected algebra")
    p.add_argument("problem")
    p.add_argument("--closure-tol", type=float, default=CLOSURE_TOL)
    p.add_argument("--max-depth", type=int, default=MAX_DEPTH)
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bound", help="print the r_k schedule and word-length bound")
    p.add_argument("problem", nargs="?")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("synthesize", help="decompose target matrices into generator words")
    p.add_argument("problem")
    p.add_argument("target")
    p.add_argument("--net-cache")
    p.add_argument("--basis-cache")
    p.add_argument("--radius", type=float, default=0.4)
    p.add_argument("--tol", type=float, default=1e-8, help="maximum replay error of a synthesized word")
    p.add_argument("--lift-tol", type=float, default=1e-8, help="per-letter error of the nonnegative lift")
    p.add_argument("--nonneg", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stall-count", type=int, default=NetConfig.stall_count)
    p.add_argument("--repair-probes", type=int, default=NetConfig.repair_probes)
    p.add_argument("--validation-samples", type=int, default=NetConfig.validation_samples)
    p.add_argument("--out")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("verify", help="independently replay a word against a target")
    p.add_argument("word")
    p.add_argument("problem")
    p.add_argument("target")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--nonneg", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demo", help="write a shipped demo problem file")
    p.add_argument("name", choices=sorted(DEMOS))
    p.add_argument("--out")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (NotGenerating, DepthExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_GENERATING
    except (NoConvergence, StuckNoIndependentConjugate) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except CoverageNotReached as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COVERAGE
    except BudgetExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
