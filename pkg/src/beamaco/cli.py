"""Command line: ``beamaco gen``, ``beamaco solve`` and ``beamaco bench``.

Exit status is 0 on success, 2 for usage errors and 1 for runtime failures.
Results go to stdout; logs and errors go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Sequence

from . import harness
from .pheromone import AcoParams
from .solvers import ALGORITHMS, MaxIterations, WallClock, solve
from .instance import random_instance
from .tsplib import TsplibError, read_tsplib, save_tsplib

log = logging.getLogger("beamaco")

PROTOCOL_NAMES = {"duration": "fixed_duration", "iterations": "fixed_iterations", "tsplib": "tsplib_suite"}
DEFAULT_ALGOS = {"duration": "elitist,mmas,beam,gbeam", "tsplib": "elitist,mmas,beam,gbeam"}
DEFAULT_TRIALS = {"duration": 15, "iterations": 10}
DEFAULT_SIZES = [50, 250, 500, 1000]


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _csv_list(cast):
    def parse(text: str):
        try:
            return [cast(t) for t in text.split(",") if t.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return parse


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    d = AcoParams()
    g = p.add_argument_group("ACO parameters")
    g.add_argument("--ants", type=_positive_int, default=d.n_ants, help="number of ants (default %(default)s)")
    g.add_argument("--beam-width", type=_positive_int, default=d.beam_width, help="beam width k (default %(default)s)")
    g.add_argument("--alpha", type=float, default=d.alpha)
    g.add_argument("--beta", type=float, default=d.beta)
    g.add_argument("--rho", type=float, default=d.rho, help="evaporation rate")
    g.add_argument("--deposit", type=float, default=d.q_deposit)
    g.add_argument("--tau-min", type=float, default=d.tau_min)
    g.add_argument("--tau-max", type=float, default=d.tau_max)
    g.add_argument("--tau-init", type=float, default=d.tau_init)


def _params(args: argparse.Namespace) -> AcoParams:
    try:
        return AcoParams(alpha=args.alpha, beta=args.beta, rho=args.rho, q_deposit=args.deposit,
                         tau_min=args.tau_min, tau_max=args.tau_max, tau_init=args.tau_init,
                         n_ants=args.ants, beam_width=args.beam_width)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="beamaco", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a random EUC_2D instance as a TSPLIB file")
    gen.add_argument("--n", type=int, required=True, help="number of points (>= 2)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--lo", type=float, default=-100.0)
    gen.add_argument("--hi", type=float, default=100.0)
    gen.add_argument("--out", help="output path (default <name>.tsp)")

    sol = sub.add_parser("solve", help="run one solver on one TSPLIB file")
    sol.add_argument("--instance", required=True)
    sol.add_argument("--algo", required=True, choices=sorted(ALGORITHMS))
    budget = sol.add_mutually_exclusive_group()
    budget.add_argument("--iterations", type=_positive_int)
    budget.add_argument("--seconds", type=_positive_float)
    sol.add_argument("--seed", type=int, default=0)
    sol.add_argument("--json", action="store_true", help="print the result as one JSON document")
    _add_param_flags(sol)

    bench = sub.add_parser("bench", help="run an experiment protocol")
    bench.add_argument("--protocol", required=True, choices=sorted(PROTOCOL_NAMES))
    bench.add_argument("--sizes", type=_csv_list(int), default=DEFAULT_SIZES,
                       help="random instance sizes (default %(default)s)")
    bench.add_argument("--trials", type=_positive_int, default=None,
                       help="instances per size (default 15 for duration, 10 for iterations)")
    bench.add_argument("--seed-base", type=int, default=0)
    bench.add_argument("--seconds", type=_csv_list(float),
                       help="time budgets (duration protocol; default 1,5) or Beam-ACO's budget (tsplib)")
    bench.add_argument("--iterations", type=_positive_int, default=None,
                       help="iteration budget (iterations protocol, default 5; Beam-ACO budget for tsplib, default 1)")
    bench.add_argument("--files", type=_csv_list(str), default=[])
    bench.add_argument("--algos", type=_csv_list(str), default=None,
                       help="comma list from elitist,mmas,beam,gbeam")
    bench.add_argument("--equiv-width", action="store_true",
                       help="add the single-ant gBeam whose width matches Beam-ACO's per-step work")
    bench.add_argument("--out", help="write records here instead of stdout")
    bench.add_argument("--format", choices=("csv", "json"), default="csv")
    bench.add_argument("--parallel-trials", type=_positive_int, default=1)
    _add_param_flags(bench)
    return parser


def cmd_gen(args: argparse.Namespace) -> int:
    if args.n < 2:
        raise UsageError(f"--n must be at least 2, got {args.n}")
    if not args.lo < args.hi:
        raise UsageError("--lo must be below --hi")
    inst = random_instance(args.n, args.seed, args.lo, args.hi)
    out = args.out or f"{inst.name}.tsp"
    try:
        save_tsplib(inst, out, comment=f"uniform random, seed {args.seed}, [{args.lo:g}, {args.hi:g}]^2")
    except OSError as exc:
        log.error("cannot write %s: %s", out, exc)
        return 1
    print(out)
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    params = _params(args)
    stop = WallClock(args.seconds) if args.seconds else MaxIterations(args.iterations or 5)
    try:
        inst = read_tsplib(args.instance)
    except (OSError, TsplibError) as exc:
        log.error("cannot read %s: %s", args.instance, exc)
        return 1
    res = solve(inst, args.algo, params, stop, args.seed)
    if args.json:
        doc = res.to_dict()
        doc["instance"] = inst.name
        json.dump(doc, sys.stdout)
        sys.stdout.write("\n")
    else:
        print(f"instance        {inst.name} ({inst.n} nodes)")
        print(f"algorithm       {res.algorithm}")
        print(f"best length     {res.length}")
        print(f"iterations      {res.iterations}")
        print(f"elapsed         {res.elapsed:.3f} s")
        print(f"partial paths   {res.partial_paths_considered}")
        print(f"kpp/s           {res.kpp_per_second:.1f}")
    return 0


def _bench_spec(args: argparse.Namespace) -> harness.ExperimentSpec:
    params = _params(args)
    protocol = PROTOCOL_NAMES[args.protocol]
    algos = args.algos
    if algos is not None and not algos:
        raise UsageError("no algorithms selected")
    unknown = [a for a in (algos or []) if a not in ALGORITHMS]
    if unknown:
        raise UsageError(f"unknown algorithm(s) {', '.join(unknown)}; choose from {', '.join(ALGORITHMS)}")

    if args.protocol == "iterations" and algos is None:
        configs = harness.iteration_configs(params)
    else:
        configs = harness.default_configs(algos or DEFAULT_ALGOS[args.protocol].split(","), params)
        if args.equiv_width:
            configs += (harness.equivalent_width_config(params),)

    if args.protocol == "tsplib":
        if not args.files:
            raise UsageError("--files is required for the tsplib protocol")
        source = harness.FileSource(tuple(args.files))
    else:
        if not args.sizes or any(n < 2 for n in args.sizes):
            raise UsageError("--sizes needs instance sizes of at least 2")
        trials = args.trials or DEFAULT_TRIALS[args.protocol]
        source = harness.RandomSource(tuple(args.sizes), trials, args.seed_base)

    if args.protocol == "duration":
        seconds = tuple(args.seconds) if args.seconds else (1.0, 5.0)
    else:
        seconds = tuple(args.seconds or ())
    iterations = args.iterations or (1 if args.protocol == "tsplib" else 5)
    try:
        return harness.ExperimentSpec(protocol, configs, source, seconds, iterations, args.parallel_trials)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_bench(args: argparse.Namespace) -> int:
    spec = _bench_spec(args)
    failures: list[str] = []
    records = harness.run_experiment(spec, failures)
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                harness.emit(records, args.format, fh)
            summary_stream = sys.stdout
        else:
            harness.emit(records, args.format, sys.stdout)
            summary_stream = sys.stderr
    except OSError as exc:
        log.error("cannot write results: %s", exc)
        return 1
    if records:
        print(harness.format_summary(harness.summarize(records)), file=summary_stream)
    if failures:
        log.warning("%d instance(s) failed", len(failures))
    return 1 if not records else 0


COMMANDS = {"gen": cmd_gen, "solve": cmd_solve, "bench": cmd_bench}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
