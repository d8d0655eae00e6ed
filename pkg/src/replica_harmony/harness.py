"""Trial runner: per-timestep allocation of arriving data plus aggregation.

One trial generates a topology and workload from (spec, root_seed), then
walks the workload in arrival order; each datum gets a placement problem
against the current capacities, one optimizer run with a per-datum derived
seed, and an all-or-nothing capacity commit. Infeasible data are counted
as failures and skipped, never dropped silently.

Seed hygiene: topology and workload derive from (root_seed, scenario) only,
so every algorithm sees the same experiment; the optimizer stream adds the
algorithm name and datum id. The per-datum requester and exercise draws
omit the algorithm name on purpose, keeping paired-seed comparisons paired.

Baselines are budget-matched: a datum allowing E exercises grants every
algorithm HMS + E objective evaluations.
"""

from __future__ import annotations

import csv
import io
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from statistics import pstdev

from .cost import CostModel, EnergyParams, placement_energy
from .errors import (
    CapacityExceeded,
    EmptyInput,
    Infeasible,
    SearchSpaceTooLarge,
    ShapeMismatch,
    UnknownAlgorithm,
)
from .model import AllocationVector, DataItem, Topology, commit_placement
from .optimize import (
    FOAParams,
    GAParams,
    OptParams,
    OptResult,
    PlacementProblem,
    exhaustive_best,
    foa_optimize,
    ga_optimize,
    hs_optimize,
    random_search,
)
from .scenario import ScenarioSpec, generate_topology, generate_workload
from .seeding import derive_seed

ALGORITHMS = ("hs", "random", "ga", "foa", "exhaustive")

CSV_HEADER = (
    "timestep",
    "scenario",
    "algorithm",
    "seed",
    "mean_cost_s",
    "mean_delay_s",
    "energy_j",
    "placed",
    "failures",
)


@dataclass(frozen=True)
class TimestepRecord:
    timestep: int
    mean_cost_s: float
    mean_delay_s: float
    energy_j: float
    placed: int
    failures: int


@dataclass(frozen=True)
class RunTotals:
    mean_cost_s: float
    mean_delay_s: float
    energy_j: float
    placed: int
    failures: int
    # measured, not derived from the series; excluded from equality and
    # never serialized so outputs stay byte-identical across runs
    wall_clock_s: float = field(default=0.0, compare=False)


@dataclass(frozen=True)
class RunReport:
    scenario: str
    algorithm: str
    seed: int
    series: tuple[TimestepRecord, ...]
    totals: RunTotals


def recompute_totals(series, wall_clock_s: float = 0.0) -> RunTotals:
    """Totals are a pure function of the series; placements weight the means."""
    placed = sum(rec.placed for rec in series)
    cost = sum(rec.mean_cost_s * rec.placed for rec in series)
    delay = sum(rec.mean_delay_s * rec.placed for rec in series)
    return RunTotals(
        mean_cost_s=cost / placed if placed else 0.0,
        mean_delay_s=delay / placed if placed else 0.0,
        energy_j=sum(rec.energy_j for rec in series),
        placed=placed,
        failures=sum(rec.failures for rec in series),
        wall_clock_s=wall_clock_s,
    )


@dataclass(frozen=True)
class TrialOptions:
    memory_size_hms: int = 10
    exercises: int | None = None  # fixed count; None draws per datum from the spec range
    budget: int | None = None  # fixed evaluation budget; None matches HMS + exercises
    energy: EnergyParams = field(default_factory=EnergyParams)


@dataclass(frozen=True)
class TrialResult:
    report: RunReport
    final_topology: Topology
    placements: tuple[tuple[DataItem, AllocationVector | None], ...]


def _run_optimizer(
    algorithm: str,
    problem: PlacementProblem,
    opt_seed: int,
    exercises: int,
    budget: int,
    options: TrialOptions,
) -> OptResult:
    if algorithm == "hs":
        return hs_optimize(
            problem,
            OptParams(
                memory_size_hms=options.memory_size_hms,
                exercises=exercises,
                seed=opt_seed,
            ),
        )
    if algorithm == "random":
        return random_search(problem, budget, random.Random(opt_seed))
    if algorithm == "ga":
        return ga_optimize(problem, GAParams(seed=opt_seed, budget=budget))
    if algorithm == "foa":
        return foa_optimize(problem, FOAParams(seed=opt_seed, budget=budget))
    if algorithm == "exhaustive":
        return exhaustive_best(problem)
    raise UnknownAlgorithm(f"unknown algorithm {algorithm!r}; valid: {', '.join(ALGORITHMS)}")


def run_trial_detailed(
    spec: ScenarioSpec,
    algorithm: str,
    root_seed: int,
    options: TrialOptions = TrialOptions(),
) -> TrialResult:
    if algorithm not in ALGORITHMS:
        raise UnknownAlgorithm(
            f"unknown algorithm {algorithm!r}; valid: {', '.join(ALGORITHMS)}"
        )
    started = time.perf_counter()
    topology = generate_topology(spec, random.Random(derive_seed(root_seed, spec.name, "topology")))
    workload = generate_workload(
        spec, topology, random.Random(derive_seed(root_seed, spec.name, "workload"))
    )
    model = CostModel(topology)
    current = topology

    series: list[TimestepRecord] = []
    placements: list[tuple[DataItem, AllocationVector | None]] = []
    index = 0
    for timestep in range(1, spec.timesteps + 1):
        cost_sum = 0.0
        delay_sum = 0.0
        energy_sum = 0.0
        placed = 0
        failures = 0
        while index < len(workload) and workload[index].arrival_timestep == timestep:
            datum = workload[index]
            index += 1
            exercises = options.exercises
            if exercises is None:
                exercises = random.Random(
                    derive_seed(root_seed, spec.name, "exercises", datum.id)
                ).randint(*spec.exercises_range)
            budget = options.budget
            if budget is None:
                budget = options.memory_size_hms + exercises
            opt_seed = derive_seed(root_seed, spec.name, "opt", algorithm, datum.id)
            try:
                problem = PlacementProblem(current, datum, model.objective(datum))
                result = _run_optimizer(algorithm, problem, opt_seed, exercises, budget, options)
                current = commit_placement(current, datum, result.best)
            except (Infeasible, CapacityExceeded, SearchSpaceTooLarge):
                failures += 1
                placements.append((datum, None))
                continue
            requester = random.Random(
                derive_seed(root_seed, spec.name, "requester", datum.id)
            ).randrange(topology.num_gateways)
            cost_sum += result.best_cost
            delay_sum += model.access_delay(datum, result.best, requester)
            energy_sum += placement_energy(datum, result.best, options.energy)
            placed += 1
            placements.append((datum, result.best))
        series.append(
            TimestepRecord(
                timestep=timestep,
                mean_cost_s=cost_sum / placed if placed else 0.0,
                mean_delay_s=delay_sum / placed if placed else 0.0,
                energy_j=energy_sum,
                placed=placed,
                failures=failures,
            )
        )

    totals = recompute_totals(series, wall_clock_s=time.perf_counter() - started)
    report = RunReport(
        scenario=spec.name,
        algorithm=algorithm,
        seed=root_seed,
        series=tuple(series),
        totals=totals,
    )
    return TrialResult(report, current, tuple(placements))


def run_trial(
    spec: ScenarioSpec,
    algorithm: str,
    root_seed: int,
    options: TrialOptions = TrialOptions(),
) -> RunReport:
    return run_trial_detailed(spec, algorithm, root_seed, options).report


@dataclass(frozen=True)
class ComparisonRow:
    algorithm: str
    mean_cost_s: float
    std_cost_s: float
    mean_delay_s: float
    std_delay_s: float
    mean_energy_j: float
    std_energy_j: float
    placed: int
    failures: int


@dataclass(frozen=True)
class ComparisonTable:
    scenario: str
    seeds: tuple[int, ...]
    rows: tuple[ComparisonRow, ...]
    # (a, b) -> fraction of paired seeds where a's total mean cost beats b's;
    # ties count 0.5
    win_rates: dict[tuple[str, str], float]
    reports: dict[tuple[str, int], RunReport]


def compare_algorithms(
    spec: ScenarioSpec,
    algorithms,
    seeds,
    options: TrialOptions = TrialOptions(),
    workers: int = 1,
) -> ComparisonTable:
    algorithms = list(algorithms)
    seeds = list(seeds)
    if not algorithms or not seeds:
        raise EmptyInput("need at least one algorithm and one seed")

    tasks = [(algo, seed) for algo in algorithms for seed in seeds]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda t: run_trial(spec, t[0], t[1], options), tasks))
    else:
        results = [run_trial(spec, algo, seed, options) for algo, seed in tasks]
    reports = {task: report for task, report in zip(tasks, results)}

    rows = []
    for algo in algorithms:
        algo_reports = [reports[(algo, seed)] for seed in seeds]
        costs = [r.totals.mean_cost_s for r in algo_reports]
        delays = [r.totals.mean_delay_s for r in algo_reports]
        energies = [r.totals.energy_j for r in algo_reports]
        rows.append(
            ComparisonRow(
                algorithm=algo,
                mean_cost_s=sum(costs) / len(costs),
                std_cost_s=pstdev(costs),
                mean_delay_s=sum(delays) / len(delays),
                std_delay_s=pstdev(delays),
                mean_energy_j=sum(energies) / len(energies),
                std_energy_j=pstdev(energies),
                placed=sum(r.totals.placed for r in algo_reports),
                failures=sum(r.totals.failures for r in algo_reports),
            )
        )

    win_rates: dict[tuple[str, str], float] = {}
    for a in algorithms:
        for b in algorithms:
            if a == b:
                continue
            score = 0.0
            for seed in seeds:
                ca = reports[(a, seed)].totals.mean_cost_s
                cb = reports[(b, seed)].totals.mean_cost_s
                score += 1.0 if ca < cb else 0.5 if ca == cb else 0.0
            win_rates[(a, b)] = score / len(seeds)

    return ComparisonTable(
        scenario=spec.name,
        seeds=tuple(seeds),
        rows=tuple(rows),
        win_rates=win_rates,
        reports=reports,
    )


@dataclass(frozen=True)
class MetricStats:
    mean: float
    std: float
    min: float
    max: float


def summarize(reports) -> dict[str, MetricStats]:
    """Aggregate totals across reports; validates shape and internal consistency."""
    reports = list(reports)
    if not reports:
        raise EmptyInput("no reports to summarize")
    scenario = reports[0].scenario
    steps = len(reports[0].series)
    for r in reports:
        if r.scenario != scenario or len(r.series) != steps:
            raise ShapeMismatch(
                f"report ({r.scenario}, {len(r.series)} steps) does not match "
                f"({scenario}, {steps} steps)"
            )
        expected = recompute_totals(r.series)
        for name in ("mean_cost_s", "mean_delay_s", "energy_j"):
            stored = getattr(r.totals, name)
            fresh = getattr(expected, name)
            if abs(stored - fresh) > 1e-9 * max(abs(stored), abs(fresh), 1.0):
                raise ShapeMismatch(f"stored totals.{name} inconsistent with series")
        if (expected.placed, expected.failures) != (r.totals.placed, r.totals.failures):
            raise ShapeMismatch("stored counts inconsistent with series")

    out = {}
    for name in ("mean_cost_s", "mean_delay_s", "energy_j", "placed", "failures"):
        values = [float(getattr(r.totals, name)) for r in reports]
        out[name] = MetricStats(
            mean=sum(values) / len(values),
            std=pstdev(values),
            min=min(values),
            max=max(values),
        )
    return out


# --- serialization -----------------------------------------------------------

def report_to_csv(report: RunReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in report.series:
        writer.writerow(
            (
                rec.timestep,
                report.scenario,
                report.algorithm,
                report.seed,
                repr(rec.mean_cost_s),
                repr(rec.mean_delay_s),
                repr(rec.energy_j),
                rec.placed,
                rec.failures,
            )
        )
    return buf.getvalue()


def report_from_csv(text: str) -> RunReport:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ShapeMismatch("unexpected CSV header")
    if len(rows) < 2:
        raise EmptyInput("CSV holds no timestep rows")
    scenario, algorithm, seed = rows[1][1], rows[1][2], int(rows[1][3])
    series = []
    for row in rows[1:]:
        if (row[1], row[2], int(row[3])) != (scenario, algorithm, seed):
            raise ShapeMismatch("CSV mixes trials")
        series.append(
            TimestepRecord(
                timestep=int(row[0]),
                mean_cost_s=float(row[4]),
                mean_delay_s=float(row[5]),
                energy_j=float(row[6]),
                placed=int(row[7]),
                failures=int(row[8]),
            )
        )
    series = tuple(series)
    return RunReport(scenario, algorithm, seed, series, recompute_totals(series))


def totals_to_dict(report: RunReport) -> dict:
    return {
        "scenario": report.scenario,
        "algorithm": report.algorithm,
        "seed": report.seed,
        "totals": {
            "mean_cost_s": report.totals.mean_cost_s,
            "mean_delay_s": report.totals.mean_delay_s,
            "energy_j": report.totals.energy_j,
            "placed": report.totals.placed,
            "failures": report.totals.failures,
        },
    }
