"""Command line front end.

Subcommands cover the full workflow: generate point sets, evaluate their
star discrepancy, run the evolutionary search, solve inverse instances,
tabulate unscrambled baselines, render figures for a finished run, and
replay a run from its manifest.  Run directories hold a manifest plus
timestamp-free CSV tables, so a replay reproduces them byte for byte.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .discrepancy import DEFAULT_CELL_BUDGET, BudgetExceededError, exact_star_discrepancy
from .estimator import TAConfig, ta_best_of
from .fileio import (
    FileFormatError,
    load_points,
    load_vector,
    save_points,
    save_vector,
    vector_to_json,
)
from .inverse import InverseConfig, InverseProblem, run_inverse
from .optimizer import GAConfig, final_evaluation, run_ga
from .plots import render_run_report
from .sequence import GeneratingVector, generate, genotype_to_vector, vector_to_genotype

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_BUDGET = 4

FLOAT_FORMAT = ".17g"


def _fmt(value: float) -> str:
    return format(value, FLOAT_FORMAT)


def _resolve_budget(args) -> int:
    if getattr(args, "budget", None) is not None:
        return args.budget
    env = os.environ.get("STAROPT_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError as err:
            raise ValueError(f"STAROPT_BUDGET must be an integer, got {env!r}") from err
    return DEFAULT_CELL_BUDGET


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _write_manifest(out_dir: Path, command: str, argv: list[str], config: dict,
                    seed: int, started: str, artifacts: dict) -> None:
    manifest = {
        "command": command,
        "argv": argv,
        "version": __version__,
        "seed": seed,
        "config": config,
        "started": started,
        "finished": _timestamp(),
        "artifacts": artifacts,
    }
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _load_eval_points(args, parser):
    if args.points:
        if args.vector or args.dimension:
            parser.error("--points excludes --vector and --dimension")
        return load_points(args.points)
    if args.count is None:
        parser.error("--count is required unless --points is given")
    if args.vector:
        vector = load_vector(args.vector)
    elif args.dimension:
        vector = GeneratingVector.identity(args.dimension)
    else:
        parser.error("provide --points, --vector, or --dimension")
    return generate(args.count, vector)


def cmd_generate(args, parser) -> int:
    if bool(args.vector) == bool(args.dimension):
        parser.error("provide exactly one of --vector or --dimension")
    vector = load_vector(args.vector) if args.vector else GeneratingVector.identity(args.dimension)
    points = generate(args.count, vector)
    if args.out == "-":
        sys.stdout.write(f"# {points.n} {points.d}\n")
        for row in points.coords:
            sys.stdout.write(" ".join(_fmt(x) for x in row) + "\n")
    else:
        save_points(args.out, points)
    return EXIT_OK


def cmd_evaluate(args, parser) -> int:
    points = _load_eval_points(args, parser)
    budget = _resolve_budget(args)
    if args.mode == "exact":
        bound = exact_star_discrepancy(points, cost_budget=budget)
    else:
        bound = ta_best_of(
            points,
            TAConfig(iterations=args.iterations, runs=args.runs, seed=args.seed),
        )
    print("value,kind,evaluations")
    print(f"{_fmt(bound.value)},{bound.kind},{bound.evaluations}")
    return EXIT_OK


def cmd_optimize(args, parser) -> int:
    config = GAConfig(
        dimension=args.dimension,
        n_points=args.count,
        mu=args.mu,
        lam=args.lam,
        crossover_prob=args.crossover_prob,
        mutation_prob=args.mutation_prob,
        shuffle_prob=args.shuffle_prob,
        tournament_size=args.tournament_size,
        generations=args.generations,
        mode=args.mode,
        ta_runs=args.ta_runs,
        ta_iterations=args.ta_iterations,
        final_ta_runs=args.final_ta_runs,
        archive_size=args.archive_size,
        cost_budget=_resolve_budget(args),
        seed=args.seed,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "vectors").mkdir(exist_ok=True)
    started = _timestamp()

    def progress(row):
        if not args.quiet:
            print(
                f"generation {row.generation}: best {row.best:.6f} "
                f"mean {row.mean:.6f} evaluations {row.evaluations}",
                file=sys.stderr,
            )

    result = run_ga(config, progress=progress)

    _write_csv(
        out_dir / "history.csv",
        ["generation", "best", "mean", "evaluations"],
        [[r.generation, _fmt(r.best), _fmt(r.mean), r.evaluations]
         for r in result.history],
    )
    _write_csv(
        out_dir / "results.csv",
        ["dimension", "count", "mode", "seed", "best_fitness",
         "final_value", "final_kind", "evaluations"],
        [[config.dimension, config.n_points, config.mode, config.seed,
          _fmt(result.best.value), _fmt(result.final.value), result.final.kind,
          result.evaluations]],
    )
    best_vector = genotype_to_vector(result.best.genotype)
    save_vector(out_dir / "best_vector.json", best_vector)
    save_points(out_dir / "best_points.txt", generate(config.n_points, best_vector))
    archive_rows = []
    for rank, ind in enumerate(result.archive):
        rel = f"vectors/archive_{rank:03d}.json"
        save_vector(out_dir / rel, genotype_to_vector(ind.genotype))
        archive_rows.append({
            "rank": rank,
            "fitness": ind.value,
            "kind": ind.fitness.kind,
            "vector": rel,
        })
    with open(out_dir / "archive.json", "w") as fh:
        json.dump(archive_rows, fh, indent=2)
        fh.write("\n")
    _write_manifest(
        out_dir, "optimize", args.run_argv, asdict(config), config.seed, started,
        {
            "history": "history.csv",
            "results": "results.csv",
            "best_vector": "best_vector.json",
            "best_points": "best_points.txt",
            "archive": "archive.json",
        },
    )
    print(f"best {_fmt(result.best.value)} final {_fmt(result.final.value)} "
          f"({result.final.kind}) -> {out_dir}")
    return EXIT_OK


def cmd_inverse(args, parser) -> int:
    problem = InverseProblem(
        dimension=args.dimension,
        epsilon=args.epsilon,
        n_min=args.n_min,
        n_max=args.n_max,
    )
    config = InverseConfig(
        problem=problem,
        mu=args.mu,
        lam=args.lam,
        crossover_prob=args.crossover_prob,
        mutation_prob=args.mutation_prob,
        shuffle_prob=args.shuffle_prob,
        generations=args.generations,
        mode=args.mode,
        ta_runs=args.ta_runs,
        ta_iterations=args.ta_iterations,
        final_ta_runs=args.final_ta_runs,
        cost_budget=_resolve_budget(args),
        seed=args.seed,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "vectors").mkdir(exist_ok=True)
    started = _timestamp()

    def progress(row):
        if not args.quiet:
            lead = "none" if row.best_n is None else f"n={row.best_n}"
            print(
                f"generation {row.generation}: feasible {row.feasible} lead {lead} "
                f"evaluations {row.evaluations}",
                file=sys.stderr,
            )

    result = run_inverse(config, progress=progress)

    _write_csv(
        out_dir / "history.csv",
        ["generation", "feasible", "best_n", "best_value", "evaluations"],
        [[r.generation, r.feasible,
          "" if r.best_n is None else r.best_n,
          "" if r.best_value is None else _fmt(r.best_value),
          r.evaluations] for r in result.history],
    )
    pareto_rows = []
    for idx, scored in enumerate(result.rescored):
        rel = f"vectors/entry_{idx:03d}.json"
        save_vector(out_dir / rel, genotype_to_vector(scored.entry.genotype))
        pareto_rows.append([
            scored.entry.n,
            _fmt(scored.entry.discrepancy.value), scored.entry.discrepancy.kind,
            _fmt(scored.final.value), scored.final.kind,
            scored.meets_epsilon, scored.minimal,
            "" if scored.previous_value is None else _fmt(scored.previous_value),
            rel,
        ])
    _write_csv(
        out_dir / "pareto.csv",
        ["n", "discrepancy", "kind", "final_value", "final_kind",
         "meets_epsilon", "minimal", "previous_value", "vector_file"],
        pareto_rows,
    )
    config_dict = asdict(config)
    _write_manifest(
        out_dir, "inverse", args.run_argv, config_dict, config.seed, started,
        {"history": "history.csv", "pareto": "pareto.csv"},
    )
    feasible = [r for r in result.rescored if r.meets_epsilon]
    if feasible:
        lead = min(feasible, key=lambda r: r.entry.n)
        print(f"smallest verified n {lead.entry.n} "
              f"value {_fmt(lead.final.value)} ({lead.final.kind}) -> {out_dir}")
    else:
        print(f"no verified entry at epsilon {_fmt(problem.epsilon)} -> {out_dir}")
    return EXIT_OK


def cmd_baseline(args, parser) -> int:
    budget = _resolve_budget(args)
    rows = []
    for d in args.dimension:
        genotype = vector_to_genotype(GeneratingVector.identity(d))
        for n in args.count:
            bound = final_evaluation(
                genotype, n, args.seed,
                final_ta_runs=args.runs, ta_iterations=args.iterations,
                cost_budget=budget,
            )
            rows.append([d, n, _fmt(bound.value), bound.kind])
    header = ["dimension", "count", "value", "kind"]
    if args.out == "-":
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        writer.writerows(rows)
    else:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        _write_csv(path, header, rows)
    return EXIT_OK


def cmd_report(args, parser) -> int:
    run_dir = Path(args.run_dir)
    if not run_dir.is_dir():
        parser.error(f"{run_dir} is not a directory")
    written = render_run_report(run_dir, args.out)
    if not written:
        print("no renderable CSV tables found", file=sys.stderr)
        return EXIT_USAGE
    for path in written:
        print(path)
    return EXIT_OK


def cmd_replay(args, parser) -> int:
    manifest_path = Path(args.manifest)
    try:
        manifest = json.loads(manifest_path.read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise FileFormatError(f"{manifest_path}: {err}") from err
    argv = manifest.get("argv")
    if not isinstance(argv, list) or not argv:
        raise FileFormatError(f"{manifest_path}: manifest holds no argv to replay")
    argv = [str(a) for a in argv]
    if "--out" in argv:
        k = argv.index("--out")
        if k + 1 >= len(argv):
            raise FileFormatError(f"{manifest_path}: dangling --out in stored argv")
        argv[k + 1] = args.out
    else:
        argv += ["--out", args.out]
    return main(argv)


def _add_budget(p):
    p.add_argument("--budget", type=int, default=None,
                   help="cell budget for exact evaluation "
                        "(default: STAROPT_BUDGET or 10^9)")


def _add_ga_knobs(p):
    p.add_argument("--mu", type=int, default=25, help="parent population size")
    p.add_argument("--lambda", dest="lam", type=int, default=100,
                   help="offspring per generation")
    p.add_argument("--crossover-prob", type=float, default=0.7)
    p.add_argument("--mutation-prob", type=float, default=0.3)
    p.add_argument("--shuffle-prob", type=float, default=0.05,
                   help="per-position pick rate inside the shuffle mutation")
    p.add_argument("--generations", type=int, default=None,
                   help="generation count (default scales with dimension)")
    p.add_argument("--ta-runs", type=int, default=10)
    p.add_argument("--ta-iterations", type=int, default=4000)
    p.add_argument("--final-ta-runs", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quiet", action="store_true", help="suppress progress lines")
    _add_budget(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="staropt",
        description="Low star-discrepancy point sets via permuted Halton sequences.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a point set")
    p.add_argument("--count", "-n", type=int, required=True, help="number of points")
    p.add_argument("--dimension", "-d", type=int, help="use the unscrambled vector")
    p.add_argument("--vector", help="generating vector JSON file")
    p.add_argument("--out", default="-", help="output file ('-' for stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("evaluate", help="star discrepancy of a point set")
    p.add_argument("--points", help="point set file")
    p.add_argument("--vector", help="generating vector JSON file")
    p.add_argument("--dimension", "-d", type=int, help="use the unscrambled vector")
    p.add_argument("--count", "-n", type=int, help="points to generate")
    p.add_argument("--mode", choices=["exact", "ta"], default="exact")
    p.add_argument("--runs", type=int, default=10, help="restarts in ta mode")
    p.add_argument("--iterations", type=int, default=4000)
    p.add_argument("--seed", type=int, default=0)
    _add_budget(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("optimize", help="evolve a generating vector")
    p.add_argument("--dimension", "-d", type=int, required=True)
    p.add_argument("--count", "-n", type=int, required=True)
    p.add_argument("--mode", choices=["exact", "ta"], default="ta")
    p.add_argument("--tournament-size", type=int, default=3)
    p.add_argument("--archive-size", type=int, default=25)
    _add_ga_knobs(p)
    p.add_argument("--out", required=True, help="run directory")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("inverse", help="smallest n reaching a target discrepancy")
    p.add_argument("--dimension", "-d", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--mode", choices=["exact", "ta"], default="ta")
    _add_ga_knobs(p)
    p.add_argument("--out", required=True, help="run directory")
    p.set_defaults(func=cmd_inverse)

    p = sub.add_parser("baseline", help="tabulate unscrambled reference values")
    p.add_argument("--dimension", "-d", type=int, action="append", required=True,
                   help="dimension (repeatable)")
    p.add_argument("--count", "-n", type=int, action="append", required=True,
                   help="point count (repeatable)")
    p.add_argument("--runs", type=int, default=10, help="ta restarts past the budget")
    p.add_argument("--iterations", type=int, default=4000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-", help="CSV file ('-' for stdout)")
    _add_budget(p)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("report", help="render figures for a run directory")
    p.add_argument("run_dir", help="directory holding run CSV tables")
    p.add_argument("--out", default=None, help="directory for figures (default: run_dir)")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("replay", help="re-run a command from its manifest")
    p.add_argument("manifest", help="manifest.json of a previous run")
    p.add_argument("--out", required=True, help="directory for the replayed run")
    p.set_defaults(func=cmd_replay)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    run_argv = list(sys.argv[1:]) if argv is None else list(argv)
    args = parser.parse_args(run_argv)
    args.run_argv = run_argv
    try:
        return args.func(args, parser)
    except FileFormatError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FORMAT
    except BudgetExceededError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
