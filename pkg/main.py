#!/usr/bin/env python3
"""
Pipeline Mapper - Latency / reliability trade-offs for pipeline workflows
Maps a linear pipeline onto failure-prone processors, replicating intervals
of stages to trade latency against the probability that the run fails.

Features:
- Evaluate a mapping (worst-case latency + failure probability)
- Closed-form optimal solvers on the homogeneous platform classes
- Exhaustive Pareto oracle for small instances of the hard cases
- Shortest-path latency optimum over general mappings
- Monte Carlo check of the failure probability

Usage:
    python main.py evaluate scenarios/reliable_split.json
    python main.py solve scenarios/reliable_split.json --objective fp --max-latency 22
    python main.py pareto scenarios/reliable_split.json --csv output/front.csv

Exit status: 0 success, 2 infeasible, 3 invalid input, 4 limits exceeded.
"""
import sys
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import List, Optional

import typer
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from config import DEFAULT_ENUM_LIMITS, DEFAULT_REPORT_CONFIG, DEFAULT_SIMULATION_CONFIG, EnumLimits, fmt
from exact_oracle import (
    LimitsExceeded,
    ParetoFront,
    min_fp_under_latency,
    min_latency_one_to_one,
    min_latency_under_fp,
    pareto_front,
)
from failure_sim import simulate_failure_probability
from general_latency import GeneralMapping, build_layered_graph, min_latency_general
from metrics import evaluate, failure_probability, replica_failure
from platform_model import HOMOGENEOUS, Evaluation, Mapping, PlatformSpec, validate_mapping
from poly_solvers import (
    alg1_min_fp_given_latency,
    alg2_min_latency_given_fp,
    alg3_min_fp_given_latency_commhom,
    alg4_min_latency_given_fp_commhom,
    min_fp_unconstrained,
    min_latency_comm_hom,
    single_interval_front,
)
from scenario import Scenario, ScenarioError, load_scenario

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_INVALID = 3
EXIT_LIMITS = 4

console = Console(width=DEFAULT_REPORT_CONFIG.console_width, highlight=False)

# ClickException as typer raises it; typer may ship its own copy of click
UsageFailure = next(c for c in typer.BadParameter.__mro__ if c.__name__ == "ClickException")

app = typer.Typer(
    add_completion=False,
    no_args_is_help=True,
    help="Pipeline Mapper - latency / failure-probability trade-offs for pipeline workflows",
)


class Objective(str, Enum):
    fp = "fp"
    latency = "latency"


@dataclass(frozen=True)
class Solution:
    """What a solve run produced; both mapping fields None means infeasible"""
    method: str
    mapping: Optional[Mapping] = None
    general: Optional[GeneralMapping] = None
    evaluation: Optional[Evaluation] = None

    @property
    def feasible(self) -> bool:
        return self.mapping is not None or self.general is not None


# ─────────────────────────────────────────────────────────────────────────────
# Helpers
# ─────────────────────────────────────────────────────────────────────────────

def _load(path: Path) -> Scenario:
    try:
        return load_scenario(path)
    except ScenarioError as e:
        console.print(f"[red]Error: {e}[/red]")
    except OSError as e:
        console.print(f"[red]Error: cannot read {path}: {e.strerror or e}[/red]")
    raise typer.Exit(EXIT_INVALID)


def _limits(
    scenario: Scenario,
    max_stages: Optional[int],
    max_processors: Optional[int],
    max_candidates: Optional[int],
    max_intervals: Optional[int],
) -> EnumLimits:
    """CLI flag > scenario file > default"""
    base = scenario.limits or DEFAULT_ENUM_LIMITS
    overrides = {
        key: value
        for key, value in (
            ("max_stages", max_stages),
            ("max_processors", max_processors),
            ("max_candidates", max_candidates),
            ("max_intervals", max_intervals),
        )
        if value is not None
    }
    try:
        return EnumLimits(**{**base.model_dump(), **overrides})
    except ValueError as e:
        console.print(f"[red]Error: invalid limits: {e}[/red]")
        raise typer.Exit(EXIT_INVALID)


def _require_mapping(scenario: Scenario, path: Path) -> Mapping:
    if scenario.mapping is None:
        console.print(f"[red]Error: {path} has no mapping section[/red]")
        raise typer.Exit(EXIT_INVALID)
    violation = validate_mapping(scenario.pipeline, scenario.platform, scenario.mapping)
    if violation is not None:
        console.print(f"[red]Invalid mapping: {violation}[/red]")
        raise typer.Exit(EXIT_INVALID)
    return scenario.mapping


def _header(scenario: Scenario, path: Path, title: str):
    cls = scenario.platform.platform_class
    console.print(Panel.fit(
        f"[bold cyan]{scenario.name or path.name}[/bold cyan]\n"
        f"Stages: {scenario.pipeline.n}   Processors: {scenario.platform.m}\n"
        f"Platform: {cls.label}",
        title=title,
    ))


def _mapping_table(mapping: Mapping, platform: PlatformSpec, title: str) -> Table:
    table = Table(title=title)
    table.add_column("#", style="cyan", width=3)
    table.add_column("Stages", style="magenta")
    table.add_column("Processors", style="green")
    table.add_column("k", style="yellow")
    table.add_column("min speed")
    table.add_column("replica FP")
    for j, iv in enumerate(mapping.intervals, 1):
        procs = [platform.by_id[u] for u in iv.alloc]
        stages = f"{iv.d}" if iv.d == iv.e else f"{iv.d}-{iv.e}"
        table.add_row(
            str(j),
            stages,
            " ".join(iv.alloc),
            str(iv.k),
            fmt(min(p.speed for p in procs)),
            fmt(replica_failure(p.failure_prob for p in procs)),
        )
    return table


def _print_evaluation(evaluation: Evaluation):
    console.print(f"Latency:             {fmt(evaluation.latency)}")
    console.print(f"Failure probability: {fmt(evaluation.failure_prob)}")


def _print_front(front: ParetoFront, title: str):
    table = Table(title=title)
    table.add_column("#", style="cyan", width=4)
    table.add_column("Latency", style="magenta")
    table.add_column("Failure prob", style="yellow")
    table.add_column("p")
    table.add_column("Mapping", style="green")
    for i, entry in enumerate(front, 1):
        table.add_row(
            str(i),
            fmt(entry.evaluation.latency),
            fmt(entry.evaluation.failure_prob),
            str(entry.mapping.p),
            entry.mapping.describe(),
        )
    console.print(table)


# ─────────────────────────────────────────────────────────────────────────────
# Solver dispatch
# ─────────────────────────────────────────────────────────────────────────────

def solve_scenario(
    scenario: Scenario,
    objective: Objective,
    max_latency: Optional[float] = None,
    max_fp: Optional[float] = None,
    force_exact: bool = False,
    limits: EnumLimits = DEFAULT_ENUM_LIMITS,
) -> Solution:
    """
    Pick the solver from the platform class:
      Fully Homogeneous                       -> closed form on the most reliable processors
      identical links + identical failures    -> closed form on the fastest processors
      anything else (or force_exact)          -> exhaustive oracle
    Raises LimitsExceeded when the oracle refuses the instance.
    """
    pipeline, platform = scenario.pipeline, scenario.platform
    cls = platform.platform_class
    closed_form = not force_exact

    def finish(method: str, mapping: Optional[Mapping]) -> Solution:
        if mapping is None:
            return Solution(method)
        return Solution(method, mapping=mapping, evaluation=evaluate(pipeline, platform, mapping))

    def oracle(method: str, entry) -> Solution:
        if entry is None:
            return Solution(method)
        return Solution(method, mapping=entry.mapping, evaluation=entry.evaluation)

    if objective == Objective.fp:
        if max_latency is None and closed_form:
            everything = min_fp_unconstrained(pipeline, platform)
            # Without every gateway link the all-processor mapping cannot run; search instead
            if validate_mapping(pipeline, platform, everything) is None:
                return finish("replicate everything on all processors", everything)
        bound = float("inf") if max_latency is None else max_latency
        if closed_form and cls.fully_homogeneous:
            return finish(
                "single interval on the k most reliable processors",
                alg1_min_fp_given_latency(pipeline, platform, bound),
            )
        if closed_form and cls.communication_homogeneous and cls.failure_homogeneous:
            return finish(
                "single interval on the k fastest processors",
                alg3_min_fp_given_latency_commhom(pipeline, platform, bound),
            )
        return oracle("exhaustive interval-mapping search", min_fp_under_latency(pipeline, platform, bound, limits))

    if max_fp is None and closed_form:
        if cls.links == HOMOGENEOUS:
            return finish("whole pipeline on the fastest processor", min_latency_comm_hom(pipeline, platform))
        general = min_latency_general(pipeline, platform)
        if general is None:
            return Solution("shortest path over general mappings")
        return Solution("shortest path over general mappings", general=general)
    bound = 1.0 if max_fp is None else max_fp
    if closed_form and cls.fully_homogeneous:
        return finish(
            "single interval on the k most reliable processors",
            alg2_min_latency_given_fp(pipeline, platform, bound),
        )
    if closed_form and cls.communication_homogeneous and cls.failure_homogeneous:
        return finish(
            "single interval on the k fastest processors",
            alg4_min_latency_given_fp_commhom(pipeline, platform, bound),
        )
    return oracle("exhaustive interval-mapping search", min_latency_under_fp(pipeline, platform, bound, limits))


# ─────────────────────────────────────────────────────────────────────────────
# Commands
# ─────────────────────────────────────────────────────────────────────────────

@app.command()
def classify(file: Path = typer.Argument(..., help="Scenario file")):
    """Report the platform class."""
    scenario = _load(file)
    cls = scenario.platform.platform_class
    table = Table(title="Platform class")
    table.add_column("Aspect", style="cyan")
    table.add_column("Class", style="green")
    table.add_row("links", cls.links)
    table.add_row("speeds", cls.speeds)
    table.add_row("failures", cls.failures)
    console.print(table)
    console.print(f"[bold]{cls.label}[/bold]")


@app.command("evaluate")
def evaluate_command(file: Path = typer.Argument(..., help="Scenario file with a mapping")):
    """Latency and failure probability of the scenario's mapping."""
    scenario = _load(file)
    mapping = _require_mapping(scenario, file)
    _header(scenario, file, "Evaluate")
    platform = scenario.platform
    formula = "shared bandwidth" if platform.platform_class.links == HOMOGENEOUS else "per-link bandwidth"
    console.print(_mapping_table(mapping, platform, "Interval mapping"))
    console.print(f"Latency model:       {formula}")
    _print_evaluation(evaluate(scenario.pipeline, platform, mapping))


@app.command()
def solve(
    file: Path = typer.Argument(..., help="Scenario file"),
    objective: Objective = typer.Option(..., "--objective", help="Criterion to minimize"),
    max_latency: Optional[float] = typer.Option(None, "--max-latency", help="Latency threshold"),
    max_fp: Optional[float] = typer.Option(None, "--max-fp", help="Failure probability threshold"),
    force_exact: bool = typer.Option(False, "--force-exact", help="Always use the exhaustive oracle"),
    max_stages: Optional[int] = typer.Option(None, "--max-stages"),
    max_processors: Optional[int] = typer.Option(None, "--max-processors"),
    max_candidates: Optional[int] = typer.Option(None, "--max-candidates"),
    max_intervals: Optional[int] = typer.Option(None, "--max-intervals"),
):
    """Minimize one criterion under a threshold on the other."""
    scenario = _load(file)
    limits = _limits(scenario, max_stages, max_processors, max_candidates, max_intervals)
    if objective == Objective.fp and max_latency is None:
        max_latency = scenario.thresholds.max_latency
    if objective == Objective.latency and max_fp is None:
        max_fp = scenario.thresholds.max_failure_prob

    _header(scenario, file, "Solve")
    try:
        solution = solve_scenario(scenario, objective, max_latency, max_fp, force_exact, limits)
    except LimitsExceeded as e:
        console.print(f"[red]Limits exceeded: {e}[/red]")
        raise typer.Exit(EXIT_LIMITS)

    console.print(f"Method: {solution.method}")
    if not solution.feasible:
        if objective == Objective.fp:
            constraint = f"latency <= {fmt(max_latency)}" if max_latency is not None else "a path to the output"
        else:
            constraint = f"failure probability <= {fmt(max_fp)}" if max_fp is not None else "a path to the output"
        console.print(f"[yellow]Infeasible: no mapping achieves {constraint}[/yellow]")
        raise typer.Exit(EXIT_INFEASIBLE)

    if solution.general is not None:
        console.print("[bold]general mapping[/bold] (a processor may serve non-consecutive stages)")
        console.print(f"Assignment: {solution.general.describe()}")
        console.print(f"Latency:             {fmt(solution.general.latency)}")
        return

    console.print(_mapping_table(solution.mapping, scenario.platform, "Interval mapping"))
    _print_evaluation(solution.evaluation)


@app.command()
def pareto(
    file: Path = typer.Argument(..., help="Scenario file"),
    csv: Optional[Path] = typer.Option(None, "--csv", help="Write the front as CSV"),
    single_interval: bool = typer.Option(
        False, "--single-interval", help="Polynomial front (homogeneous classes only)"
    ),
    max_stages: Optional[int] = typer.Option(None, "--max-stages"),
    max_processors: Optional[int] = typer.Option(None, "--max-processors"),
    max_candidates: Optional[int] = typer.Option(None, "--max-candidates"),
    max_intervals: Optional[int] = typer.Option(None, "--max-intervals"),
):
    """Pareto front of latency vs failure probability."""
    scenario = _load(file)
    limits = _limits(scenario, max_stages, max_processors, max_candidates, max_intervals)
    _header(scenario, file, "Pareto front")

    try:
        if single_interval:
            front = single_interval_front(scenario.pipeline, scenario.platform)
        else:
            front = pareto_front(scenario.pipeline, scenario.platform, limits)
    except LimitsExceeded as e:
        console.print(f"[red]Limits exceeded: {e}[/red]")
        raise typer.Exit(EXIT_LIMITS)
    except ValueError as e:
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(EXIT_INVALID)

    if not len(front):
        console.print("[yellow]Infeasible: no interval mapping reaches the output[/yellow]")
        raise typer.Exit(EXIT_INFEASIBLE)
    _print_front(front, f"{len(front)} non-dominated mappings")
    if csv is not None:
        front.to_csv(csv)
        console.print(f"[green]✓ Saved: {csv}[/green]")


@app.command("general-latency")
def general_latency_command(
    file: Path = typer.Argument(..., help="Scenario file"),
    dump_graph: Optional[Path] = typer.Option(None, "--dump-graph", help="Write the layered graph edges"),
):
    """Minimum latency over general mappings (shortest path)."""
    scenario = _load(file)
    _header(scenario, file, "General-mapping latency")
    if dump_graph is not None:
        build_layered_graph(scenario.pipeline, scenario.platform).save(dump_graph)
        console.print(f"[dim]Layered graph written to {dump_graph}[/dim]")

    result = min_latency_general(scenario.pipeline, scenario.platform)
    if result is None:
        console.print("[yellow]Infeasible: missing links leave no path from in to out[/yellow]")
        raise typer.Exit(EXIT_INFEASIBLE)

    console.print("[bold]general mapping[/bold] (a processor may serve non-consecutive stages)")
    console.print(f"Assignment: {result.describe()}")
    console.print(f"Latency:             {fmt(result.latency)}")
    if result.is_interval_mapping:
        mapping = result.to_mapping()
        fp = failure_probability(mapping, scenario.platform)
        console.print(f"Also an interval mapping; failure probability: {fmt(fp)}")


@app.command("one-to-one")
def one_to_one_command(
    file: Path = typer.Argument(..., help="Scenario file"),
    max_candidates: Optional[int] = typer.Option(None, "--max-candidates"),
):
    """Minimum latency over one-to-one mappings (exhaustive)."""
    scenario = _load(file)
    limits = _limits(scenario, None, None, max_candidates, None)
    _header(scenario, file, "One-to-one latency")
    try:
        entry = min_latency_one_to_one(scenario.pipeline, scenario.platform, limits)
    except LimitsExceeded as e:
        console.print(f"[red]Limits exceeded: {e}[/red]")
        raise typer.Exit(EXIT_LIMITS)
    if entry is None:
        console.print("[yellow]Infeasible: needs n <= m and a fully linked assignment[/yellow]")
        raise typer.Exit(EXIT_INFEASIBLE)
    console.print(_mapping_table(entry.mapping, scenario.platform, "One-to-one mapping"))
    _print_evaluation(entry.evaluation)


@app.command()
def simulate(
    file: Path = typer.Argument(..., help="Scenario file with a mapping"),
    trials: int = typer.Option(DEFAULT_SIMULATION_CONFIG.trials, "--trials", min=1),
    seed: int = typer.Option(DEFAULT_SIMULATION_CONFIG.seed, "--seed", min=0),
):
    """Monte Carlo failure frequency vs the analytic failure probability."""
    scenario = _load(file)
    mapping = _require_mapping(scenario, file)
    _header(scenario, file, "Failure simulation")
    analytic = failure_probability(mapping, scenario.platform)
    result = simulate_failure_probability(mapping, scenario.platform, trials=trials, seed=seed, show_progress=True)

    table = Table(title=f"{trials:,} trials, seed {seed}")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", style="green")
    table.add_row("analytic FP", fmt(analytic))
    table.add_row("estimate", fmt(result.estimate))
    table.add_row("std error", fmt(result.stderr))
    table.add_row("z-score", fmt(result.z_score(analytic)))
    console.print(table)


def run_command(argv: Optional[List[str]] = None) -> int:
    """Run the CLI on argv and return the exit status."""
    command = typer.main.get_command(app)
    try:
        result = command.main(args=argv, prog_name="pipemap", standalone_mode=False)
    except UsageFailure as e:
        e.show()
        return EXIT_INVALID
    except typer.Abort:
        return EXIT_INVALID
    return result if isinstance(result, int) else EXIT_OK


def main():
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
