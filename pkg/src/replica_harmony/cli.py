"""Command-line interface.

Subcommands: generate (topology + workload files), run (trial CSV/JSON
reports), compare (comparison table, win rates, plot data), report
(rankings from a directory of run outputs). All randomness flows from the
seed flags, REPLICA_HARMONY_SEED, or a scenario file's seed field, in that
order of precedence; identical invocations produce identical bytes
regardless of --threads.

Exit codes: 0 ok, 2 configuration error, 3 infeasible problem, 4 I/O
error, 5 internal error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .cost import EnergyParams
from .errors import (
    EmptyInput,
    Infeasible,
    ReplicaHarmonyError,
    SearchSpaceTooLarge,
    ShapeMismatch,
    UnknownAlgorithm,
    UnknownScenario,
)
from .harness import (
    ALGORITHMS,
    TrialOptions,
    compare_algorithms,
    report_from_csv,
    report_to_csv,
    run_trial,
    totals_to_dict,
)
from .model import topology_to_json, validate_topology
from .scenario import (
    ScenarioSpec,
    builtin_scenario,
    generate_topology,
    generate_workload,
    scenario_from_json,
)
from .seeding import derive_seed

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4
EXIT_INTERNAL = 5

SEED_ENV_VAR = "REPLICA_HARMONY_SEED"

PLOT_METRICS = ("cost", "delay", "energy")


def resolve_scenario(source: str) -> ScenarioSpec:
    """builtin:k shorthand or a path to a ScenarioSpec JSON file."""
    if source.startswith("builtin:"):
        suffix = source.split(":", 1)[1]
        try:
            k = int(suffix)
        except ValueError:
            raise UnknownScenario(f"bad builtin scenario {source!r}; valid: builtin:1..builtin:4")
        return builtin_scenario(k)
    return scenario_from_json(Path(source).read_text())


def _env_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")


def resolve_seeds(raw: str | None, base: int) -> list[int]:
    """A bare count N means seeds base..base+N-1; a comma list is explicit."""
    if raw is None:
        return [base]
    if "," in raw:
        return [int(part) for part in raw.split(",") if part.strip() != ""]
    count = int(raw)
    if count < 1:
        raise ValueError("seed count must be >= 1")
    return list(range(base, base + count))


def _load_energy_params(path: str | None) -> EnergyParams:
    if path is None:
        return EnergyParams()
    doc = json.loads(Path(path).read_text())
    return EnergyParams(
        e_uplink=float(doc.get("e_uplink", EnergyParams.e_uplink)),
        e_intercloud=float(doc.get("e_intercloud", EnergyParams.e_intercloud)),
        e_write=float(doc.get("e_write", EnergyParams.e_write)),
    )


def _trial_options(args) -> TrialOptions:
    return TrialOptions(
        memory_size_hms=args.hms,
        exercises=args.exercises,
        budget=args.budget,
        energy=_load_energy_params(args.energy_params),
    )


def _slug(scenario_name: str) -> str:
    return scenario_name.replace(":", "-").replace("/", "-")


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, newline="\n")


def _json_text(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def cmd_generate(args) -> int:
    spec = resolve_scenario(args.scenario)
    seed = args.seed if args.seed is not None else (_env_seed() or spec.seed)
    out = Path(args.out)

    topology = generate_topology(spec, random.Random(derive_seed(seed, spec.name, "topology")))
    problems = validate_topology(topology)
    if problems:
        print("error: generated topology is invalid: " + "; ".join(problems), file=sys.stderr)
        return EXIT_INTERNAL
    workload = generate_workload(
        spec, topology, random.Random(derive_seed(seed, spec.name, "workload"))
    )

    slug = _slug(spec.name)
    _write(out / f"topology_{slug}_seed{seed}.json", topology_to_json(topology))
    _write(
        out / f"workload_{slug}_seed{seed}.json",
        _json_text(
            {
                "scenario": spec.name,
                "seed": seed,
                "items": [
                    {
                        "id": d.id,
                        "size_bytes": d.size,
                        "source_gateway": d.source_gateway,
                        "replica_count": d.replica_count,
                        "arrival_timestep": d.arrival_timestep,
                    }
                    for d in workload
                ],
            }
        ),
    )
    print(f"wrote topology and workload for {spec.name} (seed {seed}) to {out}")
    return EXIT_OK


def _run_many(spec, algorithms, seeds, options, threads):
    tasks = [(algo, seed) for algo in algorithms for seed in seeds]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda t: run_trial(spec, t[0], t[1], options), tasks))
    else:
        results = [run_trial(spec, algo, seed, options) for algo, seed in tasks]
    return dict(zip(tasks, results))


def cmd_run(args) -> int:
    spec = resolve_scenario(args.scenario)
    seeds = resolve_seeds(args.seeds, _env_seed())
    options = _trial_options(args)
    out = Path(args.out)

    reports = _run_many(spec, args.algo, seeds, options, args.threads)
    slug = _slug(spec.name)
    for (algo, seed), report in reports.items():
        stem = f"trial_{slug}_{algo}_seed{seed}"
        _write(out / f"{stem}.csv", report_to_csv(report))
        _write(out / f"{stem}.json", _json_text(totals_to_dict(report)))
    print(f"wrote {2 * len(reports)} files to {out}")
    return EXIT_OK


def _plot_csv(reports, algorithms, seeds, metric) -> str:
    """Per-timestep curve per algorithm, averaged over seeds; energy cumulative."""
    lines = ["timestep," + ",".join(algorithms)]
    timesteps = len(next(iter(reports.values())).series)
    running = {algo: 0.0 for algo in algorithms}
    for i in range(timesteps):
        cells = [str(i + 1)]
        for algo in algorithms:
            if metric == "cost":
                value = sum(reports[(algo, s)].series[i].mean_cost_s for s in seeds) / len(seeds)
            elif metric == "delay":
                value = sum(reports[(algo, s)].series[i].mean_delay_s for s in seeds) / len(seeds)
            else:
                running[algo] += sum(reports[(algo, s)].series[i].energy_j for s in seeds) / len(seeds)
                value = running[algo]
            cells.append(repr(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def cmd_compare(args) -> int:
    if len(args.algo) < 2:
        print("error: compare needs at least two --algo entries", file=sys.stderr)
        return EXIT_CONFIG
    seeds = resolve_seeds(args.seeds, _env_seed())
    options = _trial_options(args)
    out = Path(args.out)

    comparison_lines = [
        "scenario,algorithm,mean_cost_s,std_cost_s,mean_delay_s,std_delay_s,"
        "mean_energy_j,std_energy_j,placed,failures"
    ]
    win_lines = ["scenario,algorithm_a,algorithm_b,win_rate"]
    for source in args.scenario:
        spec = resolve_scenario(source)
        table = compare_algorithms(spec, args.algo, seeds, options, workers=args.threads)
        for row in table.rows:
            comparison_lines.append(
                ",".join(
                    (
                        spec.name,
                        row.algorithm,
                        repr(row.mean_cost_s),
                        repr(row.std_cost_s),
                        repr(row.mean_delay_s),
                        repr(row.std_delay_s),
                        repr(row.mean_energy_j),
                        repr(row.std_energy_j),
                        str(row.placed),
                        str(row.failures),
                    )
                )
            )
        for (a, b), rate in sorted(table.win_rates.items()):
            win_lines.append(f"{spec.name},{a},{b},{repr(rate)}")
        slug = _slug(spec.name)
        for metric in PLOT_METRICS:
            _write(
                out / f"plot_{slug}_{metric}.csv",
                _plot_csv(table.reports, list(args.algo), seeds, metric),
            )

    _write(out / "comparison.csv", "\n".join(comparison_lines) + "\n")
    _write(out / "win_rates.csv", "\n".join(win_lines) + "\n")
    print(f"wrote comparison, win rates, and plot data to {out}")
    return EXIT_OK


def cmd_report(args) -> int:
    directory = Path(args.dir)
    csv_paths = sorted(directory.glob("trial_*.csv"))
    if not csv_paths:
        raise EmptyInput(f"no trial CSV files in {directory}")

    reports = []
    for path in csv_paths:
        report = report_from_csv(path.read_text())
        summary_path = path.with_suffix(".json")
        if summary_path.exists():
            stored = json.loads(summary_path.read_text())["totals"]
            recomputed = totals_to_dict(report)["totals"]
            for key, fresh in recomputed.items():
                if not math.isclose(stored[key], fresh, rel_tol=1e-12, abs_tol=1e-15):
                    print(
                        f"error: {summary_path.name} totals.{key} disagrees with the CSV series",
                        file=sys.stderr,
                    )
                    return EXIT_INTERNAL
        reports.append(report)

    by_scenario: dict[str, list] = {}
    for report in reports:
        by_scenario.setdefault(report.scenario, []).append(report)

    for scenario in sorted(by_scenario):
        group = by_scenario[scenario]
        print(f"scenario {scenario} ({len(group)} trials)")
        by_algo: dict[str, list] = {}
        for report in group:
            by_algo.setdefault(report.algorithm, []).append(report)
        for label, attr in (
            ("mean cost (s)", "mean_cost_s"),
            ("mean delay (s)", "mean_delay_s"),
            ("energy (J)", "energy_j"),
        ):
            ranked = sorted(
                (
                    (sum(getattr(r.totals, attr) for r in rs) / len(rs), algo)
                    for algo, rs in by_algo.items()
                )
            )
            print(f"  {label}: " + "  ".join(f"{algo}={value:.6g}" for value, algo in ranked))
        algos = sorted(by_algo)
        for i, a in enumerate(algos):
            for b in algos[i + 1 :]:
                seeds_a = {r.seed: r for r in by_algo[a]}
                seeds_b = {r.seed: r for r in by_algo[b]}
                paired = sorted(set(seeds_a) & set(seeds_b))
                if not paired:
                    continue
                score = 0.0
                for seed in paired:
                    ca = seeds_a[seed].totals.mean_cost_s
                    cb = seeds_b[seed].totals.mean_cost_s
                    score += 1.0 if ca < cb else 0.5 if ca == cb else 0.0
                print(f"  win rate {a} vs {b} on cost: {score / len(paired):.3f} ({len(paired)} paired seeds)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="replica-harmony",
        description="Replica placement experiments over simulated mini clouds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_trial_flags(p):
        p.add_argument("--algo", action="append", choices=ALGORITHMS, help="repeatable")
        p.add_argument("--seeds", help="count (e.g. 30) or explicit comma list (e.g. 3,7,11)")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--hms", type=int, default=10, help="harmony memory size")
        p.add_argument("--exercises", type=int, help="fixed exercises per datum")
        p.add_argument("--budget", type=int, help="fixed evaluation budget per datum")
        p.add_argument("--energy-params", help="JSON file with e_uplink/e_intercloud/e_write")
        p.add_argument("--threads", type=int, default=1)

    p_gen = sub.add_parser("generate", help="write topology and workload files")
    p_gen.add_argument("--scenario", required=True, help="builtin:1..4 or a spec JSON path")
    p_gen.add_argument("--seed", type=int)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_generate)

    p_run = sub.add_parser("run", help="run trials, write CSV + JSON reports")
    p_run.add_argument("--scenario", required=True, help="builtin:1..4 or a spec JSON path")
    add_trial_flags(p_run)
    p_run.set_defaults(func=cmd_run, default_algos=["hs"])

    p_cmp = sub.add_parser("compare", help="run the algorithm comparison")
    p_cmp.add_argument(
        "--scenario", action="append", required=True, help="repeatable; builtin:1..4 or a path"
    )
    add_trial_flags(p_cmp)
    p_cmp.set_defaults(func=cmd_compare, default_algos=["hs", "random", "ga", "foa"])

    p_rep = sub.add_parser("report", help="summarize a directory of run outputs")
    p_rep.add_argument("dir", help="directory holding trial_*.csv files")
    p_rep.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    if getattr(args, "algo", None) is None and hasattr(args, "default_algos"):
        args.algo = list(args.default_algos)
    try:
        return args.func(args)
    except (UnknownScenario, UnknownAlgorithm, EmptyInput, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (Infeasible, SearchSpaceTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ShapeMismatch, ReplicaHarmonyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:
        print(f"error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
