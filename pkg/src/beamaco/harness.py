"""Experiment protocols, trial records, summary statistics and CSV/JSON output.

Three protocols are supported:

``fixed_duration``
    every configuration gets each wall-clock budget on every instance;
``fixed_iterations``
    every configuration runs the same number of iterations (by default the
    Beam-10x10, gBeam-10x1, gBeam-32x1 and gBeam-10x10 line-up);
``tsplib_suite``
    Beam-ACO runs its budget first, Elitist and MMAS then get Beam-ACO's
    measured wall-clock time, and gBeam-ACO runs for one second or one
    iteration, whichever takes longer.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

from .instance import TspInstance, build_distance_matrix, random_instance
from .pheromone import AcoParams
from .solvers import AllOf, MaxIterations, SolverResult, StopPredicate, WallClock, equivalent_beam_width, solve
from .tsplib import read_tsplib

log = logging.getLogger(__name__)

PROTOCOLS = ("fixed_duration", "fixed_iterations", "tsplib_suite")

RECORD_FIELDS = ("instance", "algorithm", "config", "length", "elapsed_s", "iterations",
                 "partial_paths", "kpp_s", "seed", "size")


@dataclass(frozen=True)
class Config:
    """One solver configuration in an experiment, e.g. ``Config("gBeam-32x1", "gbeam", ...)``."""

    label: str
    algorithm: str
    params: AcoParams = field(default_factory=AcoParams)
    redundant_ants: bool = False


@dataclass(frozen=True)
class RandomSource:
    sizes: tuple[int, ...]
    trials: int = 10
    seed_base: int = 0
    lo: float = -100.0
    hi: float = 100.0

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if not self.sizes:
            raise ValueError("need at least one instance size")


@dataclass(frozen=True)
class FileSource:
    paths: tuple[str, ...]


@dataclass(frozen=True)
class ExperimentSpec:
    """What to run.

    ``seconds`` are the wall-clock budgets of the fixed-duration protocol
    (one run per budget) and, for the TSPLIB suite, Beam-ACO's budget if
    set; ``iterations`` is the fixed-iteration budget and otherwise
    Beam-ACO's TSPLIB budget.
    """

    protocol: str
    configs: tuple[Config, ...]
    source: RandomSource | FileSource
    seconds: tuple[float, ...] = ()
    iterations: int = 5
    parallel: int = 1

    def __post_init__(self) -> None:
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}; choose from {', '.join(PROTOCOLS)}")
        if not self.configs:
            raise ValueError("no algorithms selected")
        if self.iterations < 1:
            raise ValueError(f"iteration budget must be at least 1, got {self.iterations}")
        if any(not s > 0 for s in self.seconds):
            raise ValueError("time budgets must be positive")
        if self.protocol == "fixed_duration" and not self.seconds:
            raise ValueError("the fixed-duration protocol needs at least one time budget")


@dataclass(frozen=True)
class TrialRecord:
    instance: str
    algorithm: str
    config: str
    length: int
    elapsed_s: float
    iterations: int
    partial_paths: int
    kpp_s: float
    seed: int | None
    size: int

    @classmethod
    def from_result(cls, instance: str, size: int, config: str, result: SolverResult) -> TrialRecord:
        return cls(instance, result.algorithm, config, result.length, result.elapsed, result.iterations,
                   result.partial_paths_considered, result.kpp_per_second, result.seed, size)


@dataclass(frozen=True)
class SummaryRow:
    group: tuple
    trials: int
    mean_length: float
    std_length: float
    mean_runtime: float
    std_runtime: float


# -- standard line-ups -----------------------------------------------------------

def _dims(params: AcoParams, ants: int | None = None) -> str:
    return f"{params.beam_width}x{params.n_ants if ants is None else ants}"


def default_configs(algorithms: Sequence[str], params: AcoParams | None = None) -> tuple[Config, ...]:
    """One configuration per algorithm label, gBeam with a single ant."""
    params = params or AcoParams()
    names = {"elitist": "Elitist", "mmas": "MMAS"}
    out = []
    for algo in algorithms:
        if algo in names:
            out.append(Config(names[algo], algo, params))
        elif algo == "beam":
            out.append(Config(f"Beam-{_dims(params)}", "beam", params))
        elif algo == "gbeam":
            out.append(Config(f"gBeam-{_dims(params, 1)}", "gbeam", params))
        else:
            raise ValueError(f"unknown algorithm {algo!r}")
    return tuple(out)


def equivalent_width_config(params: AcoParams | None = None) -> Config:
    """Single-ant gBeam whose beam is widened to match Beam-ACO's per-step work."""
    params = params or AcoParams()
    width = equivalent_beam_width(params.n_ants, params.beam_width)
    return Config(f"gBeam-{width}x1", "gbeam", dataclasses.replace(params, beam_width=width))


def iteration_configs(params: AcoParams | None = None) -> tuple[Config, ...]:
    """Beam-KxN, gBeam-Kx1, gBeam-(K*sqrt N)x1 and gBeam-KxN (N redundant greedy ants)."""
    params = params or AcoParams()
    return (
        Config(f"Beam-{_dims(params)}", "beam", params),
        Config(f"gBeam-{_dims(params, 1)}", "gbeam", params),
        equivalent_width_config(params),
        Config(f"gBeam-{_dims(params)}", "gbeam", params, redundant_ants=True),
    )


# -- running ----------------------------------------------------------------------------

def _run(inst: TspInstance, dm, config: Config, stop: StopPredicate, seed: int) -> SolverResult:
    kwargs = {"dm": dm}
    if config.redundant_ants:
        kwargs["redundant_ants"] = True
    return solve(inst, config.algorithm, config.params, stop, seed, **kwargs)


def _instances(spec: ExperimentSpec):
    """Yield ``(instance id, loader, seed)``; loading is deferred so failures stay per-trial."""
    src = spec.source
    if isinstance(src, RandomSource):
        for n in src.sizes:
            for trial in range(src.trials):
                seed = src.seed_base + trial
                yield f"rand{n}-s{seed}", (random_instance, (n, seed, src.lo, src.hi)), seed
    else:
        for i, path in enumerate(src.paths):
            yield str(path), (read_tsplib, (path,)), i


def _trials_for(spec: ExperimentSpec, inst: TspInstance, seed: int) -> list[TrialRecord]:
    dm = build_distance_matrix(inst)
    name = inst.name
    records = []
    if spec.protocol == "fixed_duration":
        for budget in spec.seconds:
            for cfg in spec.configs:
                res = _run(inst, dm, cfg, WallClock(budget), seed)
                records.append(TrialRecord.from_result(name, inst.n, f"{cfg.label}@{budget:g}s", res))
    elif spec.protocol == "fixed_iterations":
        for cfg in spec.configs:
            res = _run(inst, dm, cfg, MaxIterations(spec.iterations), seed)
            records.append(TrialRecord.from_result(name, inst.n, cfg.label, res))
    else:
        records.extend(_tsplib_trials(spec, inst, dm, seed))
    return records


def _tsplib_trials(spec: ExperimentSpec, inst: TspInstance, dm, seed: int) -> list[TrialRecord]:
    beam_stop: StopPredicate = WallClock(spec.seconds[0]) if spec.seconds else MaxIterations(spec.iterations)
    beams = [c for c in spec.configs if c.algorithm == "beam"]
    others = [c for c in spec.configs if c.algorithm != "beam"]
    records = []
    reference: float | None = None
    for cfg in beams:
        res = _run(inst, dm, cfg, beam_stop, seed)
        reference = res.elapsed if reference is None else reference
        records.append(TrialRecord.from_result(inst.name, inst.n, cfg.label, res))
    for cfg in others:
        if cfg.algorithm == "gbeam":
            stop: StopPredicate = AllOf(WallClock(1.0), MaxIterations(1))
        elif reference is not None:
            stop = WallClock(reference)
        else:
            # no Beam-ACO run to borrow a wall-clock budget from
            stop = beam_stop
        res = _run(inst, dm, cfg, stop, seed)
        records.append(TrialRecord.from_result(inst.name, inst.n, cfg.label, res))
    return records


def _job(spec: ExperimentSpec, ident: str, loader, seed: int) -> tuple[list[TrialRecord], str | None]:
    fn, args = loader
    try:
        inst = fn(*args)
    except Exception as exc:  # noqa: BLE001 - reported per trial, the suite goes on
        return [], f"{ident}: {exc}"
    return _trials_for(spec, inst, seed), None


def run_experiment(spec: ExperimentSpec, failures: list[str] | None = None) -> list[TrialRecord]:
    """Run every trial of ``spec`` and return the records in emission order.

    Instances that cannot be generated or parsed are logged, appended to
    ``failures`` if given, and skipped.
    """
    jobs = list(_instances(spec))
    if spec.parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=spec.parallel) as pool:
            outcomes = list(pool.map(_job, [spec] * len(jobs), *zip(*jobs)))
    else:
        outcomes = [_job(spec, ident, loader, seed) for ident, loader, seed in jobs]
    records: list[TrialRecord] = []
    for recs, err in outcomes:
        if err is not None:
            log.error("trial failed: %s", err)
            if failures is not None:
                failures.append(err)
        records.extend(recs)
    return sort_records(records)


def _checked(spec: ExperimentSpec, protocol: str) -> ExperimentSpec:
    if spec.protocol != protocol:
        raise ValueError(f"expected a {protocol} experiment, got {spec.protocol}")
    return spec


def run_fixed_duration(spec: ExperimentSpec, failures: list[str] | None = None) -> list[TrialRecord]:
    return run_experiment(_checked(spec, "fixed_duration"), failures)


def run_fixed_iterations(spec: ExperimentSpec, failures: list[str] | None = None) -> list[TrialRecord]:
    return run_experiment(_checked(spec, "fixed_iterations"), failures)


def run_tsplib_suite(spec: ExperimentSpec, failures: list[str] | None = None) -> list[TrialRecord]:
    return run_experiment(_checked(spec, "tsplib_suite"), failures)


# -- statistics and output ----------------------------------------------------------

def sort_records(records: Iterable[TrialRecord]) -> list[TrialRecord]:
    return sorted(records, key=lambda r: (r.instance, r.config))


def summarize(records: Sequence[TrialRecord], key: Sequence[str] = ("algorithm", "config", "size")) -> list[SummaryRow]:
    """Mean and sample standard deviation of length and runtime per group (0 for a single trial)."""
    if not records:
        raise ValueError("nothing to summarize")
    groups: dict[tuple, list[TrialRecord]] = {}
    for r in records:
        groups.setdefault(tuple(getattr(r, k) for k in key), []).append(r)

    def sd(xs: list[float]) -> float:
        return statistics.stdev(xs) if len(xs) > 1 else 0.0

    rows = []
    for group in sorted(groups, key=lambda g: tuple(map(str, g))):
        rs = groups[group]
        lengths = [float(r.length) for r in rs]
        times = [r.elapsed_s for r in rs]
        rows.append(SummaryRow(group, len(rs), statistics.fmean(lengths), sd(lengths),
                               statistics.fmean(times), sd(times)))
    return rows


def _summary_dict(row: SummaryRow, key: Sequence[str]) -> dict:
    d = dict(zip(key, row.group))
    d.update(trials=row.trials, mean_length=row.mean_length, std_length=row.std_length,
             mean_runtime=row.mean_runtime, std_runtime=row.std_runtime)
    return d


def emit(rows: Sequence[TrialRecord] | Sequence[SummaryRow], fmt: str, sink: IO[str],
         key: Sequence[str] = ("algorithm", "config", "size")) -> None:
    """Write records (or summary rows) to ``sink`` as ``csv`` or ``json``.

    ``key`` names the group columns when writing summary rows.
    """
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    if rows and isinstance(rows[0], SummaryRow):
        dicts = [_summary_dict(r, key) for r in rows]
        header = list(key) + ["trials", "mean_length", "std_length", "mean_runtime", "std_runtime"]
    else:
        dicts = [dataclasses.asdict(r) for r in sort_records(rows)]
        header = list(RECORD_FIELDS)
    if fmt == "json":
        json.dump(dicts, sink, indent=1)
        sink.write("\n")
        return
    writer = csv.DictWriter(sink, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    writer.writerows(dicts)


def load_records_json(text: str) -> list[TrialRecord]:
    return [TrialRecord(**d) for d in json.loads(text)]


def format_summary(rows: Sequence[SummaryRow], key: Sequence[str] = ("algorithm", "config", "size")) -> str:
    """Plain-text ``mean ± sd`` table for the terminal."""
    head = [*key, "trials", "length", "runtime (s)"]
    body = []
    for r in rows:
        body.append([*map(str, r.group), str(r.trials),
                     f"{r.mean_length:,.0f} ± {r.std_length:,.0f}",
                     f"{r.mean_runtime:.2f} ± {r.std_runtime:.2f}"])
    widths = [max(len(h), *(len(b[i]) for b in body)) if body else len(h) for i, h in enumerate(head)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(head, widths))]
    lines += ["  ".join(c.ljust(w) for c, w in zip(b, widths)) for b in body]
    return "\n".join(lines)

