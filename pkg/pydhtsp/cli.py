# -*- coding: utf-8 -*-
"""Command line front end.

Commands:
    solve   Solve an instance file and print the certified result.
    gen     Generate a random Euclidean instance.
    oracle  Solve a small instance file to optimality.
    bench   Time the solver on random instances of several sizes.

Results go to stdout as JSON, diagnostics to stderr.

Example:
    $ pydhtsp gen --n 5 --alpha 1.5 --seed 42 -o five.json
    $ pydhtsp solve five.json --trace five.jsonl
"""


import argparse
import json
import logging
import sys

from concurrent.futures import ProcessPoolExecutor
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple

from pydhtsp.core.error import GenerationError
from pydhtsp.core.error import InstanceFormatError
from pydhtsp.core.error import InstanceValidationError
from pydhtsp.core.error import InvariantViolationError
from pydhtsp.core.error import OracleSizeError
from pydhtsp.core.growth import SCANS
from pydhtsp.core.growth import JsonlTraceSink
from pydhtsp.core.instance import generate
from pydhtsp.core.instance import dumps
from pydhtsp.core.instance import read_json
from pydhtsp.core.instance import write_json
from pydhtsp.core.oracle import solve_exact
from pydhtsp.core.solver import SolverConfig
from pydhtsp.core.solver import solve


logger = logging.getLogger("pydhtsp")


EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CERTIFICATE = 2


def cmd_solve(args: argparse.Namespace) -> int:
    instance = read_json(args.instance, exact=args.exact_arith)
    config = SolverConfig(
        exact=args.exact_arith,
        check_invariants=args.check_invariants,
        certificate=not args.no_certificate,
        scan=args.scan,
    )

    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as stream:
            result = solve(instance, config, JsonlTraceSink(stream))
    else:
        result = solve(instance, config)

    logger.info("wall time %.3fs", result.wall_time)
    _emit(result.to_dict())

    if result.feasible is False:
        logger.error("certificate failed with %d violations", len(result.certificate.violations))
        return EXIT_CERTIFICATE
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    instance = generate(args.n, alpha=args.alpha, seed=args.seed, box=args.box)

    if args.output:
        write_json(instance, args.output)
        logger.info("wrote %d targets to %s", instance.n_targets, args.output)
    else:
        sys.stdout.write(dumps(instance) + "\n")
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    instance = read_json(args.instance)
    _emit(solve_exact(instance).to_dict())
    return EXIT_OK


def bench_trial(n: int, alpha: float, seed: int, scan: str) -> Tuple[float, int, Optional[float]]:
    """Solve one random instance and return (wall time, iterations, ratio)."""
    instance = generate(n, alpha=alpha, seed=seed)
    result = solve(instance, SolverConfig(certificate=False, validate=False, scan=scan))
    ratio = result.ratio_vs_dual
    return result.wall_time, result.iterations, float(ratio) if ratio is not None else None


def cmd_bench(args: argparse.Namespace) -> int:
    sizes = _parse_sizes(args.sizes)

    for n in sizes:
        jobs = [(n, args.alpha, args.seed + trial, args.scan) for trial in range(args.trials)]

        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                rows = list(pool.map(bench_trial, *zip(*jobs)))
        else:
            rows = [bench_trial(*job) for job in jobs]

        times = [row[0] for row in rows]
        iterations = [row[1] for row in rows]
        ratios = [row[2] for row in rows if row[2] is not None]

        _emit({
            "n": n,
            "trials": args.trials,
            "mean_time": round(sum(times) / len(times), 6),
            "max_time": round(max(times), 6),
            "mean_iterations": sum(iterations) / len(iterations),
            "max_iterations": max(iterations),
            "mean_ratio_vs_dual": sum(ratios) / len(ratios) if ratios else None,
        })

    return EXIT_OK


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="pydhtsp", description="Two-depot heterogeneous TSP solver.")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="Log to stderr: -v for progress, -vv for every iteration.")
    commands = parser.add_subparsers(dest="command", required=True)

    solve_parser = commands.add_parser("solve", help="Solve an instance file.")
    solve_parser.add_argument("instance", help="Path to the instance JSON.")
    solve_parser.add_argument("--trace", help="Write the iteration events as JSONL to this path.")
    solve_parser.add_argument("--exact-arith", action="store_true",
                              help="Parse costs as decimals and solve in rational arithmetic.")
    solve_parser.add_argument("--no-certificate", action="store_true", help="Skip the dual certificate.")
    solve_parser.add_argument("--check-invariants", action="store_true",
                              help="Check the growth invariants after every iteration.")
    solve_parser.add_argument("--scan", choices=SCANS, default="incremental",
                              help="Search strategy for tight edges.")
    solve_parser.set_defaults(handler=cmd_solve)

    gen_parser = commands.add_parser("gen", help="Generate a random Euclidean instance.")
    gen_parser.add_argument("--n", type=int, required=True, help="Number of targets.")
    gen_parser.add_argument("--alpha", type=float, default=1.0, help="Cost factor of vehicle 2 (>= 1).")
    gen_parser.add_argument("--seed", type=int, default=0, help="Random seed.")
    gen_parser.add_argument("--box", type=float, default=100.0, help="Side length of the square.")
    gen_parser.add_argument("-o", "--output", help="Output path, stdout if omitted.")
    gen_parser.set_defaults(handler=cmd_gen)

    oracle_parser = commands.add_parser("oracle", help="Solve a small instance exactly.")
    oracle_parser.add_argument("instance", help="Path to the instance JSON.")
    oracle_parser.set_defaults(handler=cmd_oracle)

    bench_parser = commands.add_parser("bench", help="Benchmark on random instances.")
    bench_parser.add_argument("--sizes", default="10,100", help="Comma separated target counts.")
    bench_parser.add_argument("--trials", type=int, default=3, help="Instances per size.")
    bench_parser.add_argument("--alpha", type=float, default=1.5, help="Cost factor of vehicle 2.")
    bench_parser.add_argument("--seed", type=int, default=0, help="Seed of the first trial.")
    bench_parser.add_argument("--jobs", type=int, default=1, help="Worker processes.")
    bench_parser.add_argument("--scan", choices=SCANS, default="incremental",
                              help="Search strategy for tight edges.")
    bench_parser.set_defaults(handler=cmd_bench)

    return parser.parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = parse_args(argv)

    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        return args.handler(args)
    except InstanceValidationError as error:
        logger.error("invalid instance:\n%s", error.report)
        return EXIT_INPUT
    except (InstanceFormatError, GenerationError, OracleSizeError, ValueError, OSError) as error:
        logger.error("%s", error)
        return EXIT_INPUT
    except InvariantViolationError as error:
        logger.error("internal invariant failed: %s", error)
        return EXIT_CERTIFICATE


def _parse_sizes(text: str) -> List[int]:
    try:
        return [int(size) for size in text.split(",") if size.strip()]
    except ValueError:
        raise ValueError(f"--sizes must be comma separated integers, got {text!r}")


def _emit(document: dict) -> None:
    sys.stdout.write(json.dumps(document) + "\n")
    sys.stdout.flush()
