"""Command-line interface for evoact."""

from __future__ import annotations

import asyncio
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import click
import numpy as np
import yaml
from pydantic import BaseModel, ValidationError
from rich.console import Console
from rich.markup import escape
from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn
from rich.table import Table

from evoact import __version__
from evoact.analysis import (
    REFERENCE_ARRANGEMENTS,
    PiecewiseSpec,
    baseline,
    build_indicator,
    compile_piecewise,
    count_space,
    enumerate_shapes,
    load_arrangements,
    wrap_scaled,
)
from evoact.analysis.baselines import FIXED, LEARNABLE, PARAMETRIC
from evoact.config import EvolutionConfig, RunConfig, SearchMode, TrainSpec
from evoact.distrib import Worker, serve
from evoact.errors import (
    ConfigError,
    DatasetError,
    EvoactError,
    GraphStructureError,
    GraphSyntaxError,
    OutputExistsError,
    ProtocolError,
    UnknownBaselineError,
)
from evoact.evolve import (
    Candidate,
    SearchHistory,
    combined_progress,
    evolve,
    load_history,
    pareto_general,
    rerank,
    sample_random_functions,
    summarize_runs,
)
from evoact.graph import ActivationGraph, parse, strip_params
from evoact.logs import configure_logging
from evoact.output import (
    ReportRenderer,
    benchmark_frame,
    curves_frame,
    provenance,
    rerank_frame,
    summaries_frame,
    trajectory_frame,
    write_csv,
    write_history,
    write_text,
)
from evoact.trainer import (
    ActivationFunction,
    as_activation,
    benchmark,
    compress,
    cross_evaluate,
    evaluate_activation,
    fitness_compressed,
    fitness_full,
    sample_study,
    wider_spec,
)

console = Console()
err_console = Console(stderr=True)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_PARSE = 4
EXIT_DATASET = 5
EXIT_OUTPUT_EXISTS = 6
EXIT_PROTOCOL = 7

EXIT_CODES: list[tuple[type[Exception] | tuple[type[Exception], ...], int]] = [
    (ConfigError, EXIT_CONFIG),
    ((GraphSyntaxError, GraphStructureError), EXIT_PARSE),
    (DatasetError, EXIT_DATASET),
    (OutputExistsError, EXIT_OUTPUT_EXISTS),
    (ProtocolError, EXIT_PROTOCOL),
    (UnknownBaselineError, EXIT_USAGE),
]


def exit_code_for(error: Exception) -> int:
    for kinds, code in EXIT_CODES:
        if isinstance(error, kinds):
            return code
    return EXIT_RUNTIME


class EvoactGroup(click.Group):
    """Click group that turns evoact errors into distinct exit codes."""

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except EvoactError as e:
            err_console.print(f"[bold red]Error:[/bold red] {escape(str(e))}")
            ctx.exit(exit_code_for(e))


@dataclass
class State:
    """Resolved configuration shared by every command."""

    config: RunConfig
    overwrite: bool

    @property
    def output_dir(self) -> Path:
        return self.config.output.directory

    def target(self, name: str) -> Path:
        return self.output_dir / name

    def claim(self, *names: str) -> list[Path]:
        """Fail before doing any work if a result would be overwritten."""
        paths = [self.target(name) for name in names]
        if not self.overwrite:
            for path in paths:
                if path.exists():
                    raise OutputExistsError(path)
        return paths

    def meta(self, command: str, **extra: Any) -> dict[str, Any]:
        return provenance(self.config.resolved(), command=command, **extra)


def revalidate(model: type[BaseModel], current: BaseModel, **overrides: Any) -> Any:
    """Apply command-line overrides and re-run the model validators."""
    data = current.model_dump()
    data.update({key: value for key, value in overrides.items() if value is not None})
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise ConfigError(str(e)) from e


def parse_expr(text: str, bounded: bool = True) -> ActivationGraph:
    return parse(text, bounded=bounded)


def collect_points(at: tuple[float, ...], extra: tuple[float, ...]) -> list[float]:
    return [*at, *extra]


def fmt(value: float) -> str:
    return f"{float(value):.10g}"


def resolve_activation(expr: str, is_baseline: bool, strip: bool = False, scaled: bool = False) -> ActivationFunction:
    if is_baseline:
        activation = baseline(expr)
    else:
        graph = parse_expr(expr)
        activation = as_activation(strip_params(graph) if strip else graph)
    return wrap_scaled(activation) if scaled else activation


def search_progress() -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        console=err_console,
        transient=True,
    )


SEARCH_OUTPUTS = ("history.jsonl", "history.meta.yaml", "progress.csv", "rerank.csv", "report.txt")
POINTS_CONTEXT = {"ignore_unknown_options": True}
points_option = click.option("--at", "at", type=float, multiple=True, help="Point to evaluate at (repeatable)")
extra_points = click.argument("extra", nargs=-1, type=float)


@click.group(cls=EvoactGroup)
@click.option(
    "--config",
    "-c",
    "config_path",
    type=click.Path(path_type=Path),
    help="Path to evoact.yaml config file",
)
@click.option("--output-dir", "-o", type=click.Path(file_okay=False, path_type=Path), help="Result directory")
@click.option("--overwrite", is_flag=True, help="Replace existing results")
@click.option("--verbose", "-v", count=True, help="-v for info, -vv for debug logging")
@click.version_option(version=__version__)
@click.pass_context
def cli(ctx: click.Context, config_path: Path | None, output_dir: Path | None, overwrite: bool, verbose: int) -> None:
    """evoact - evolutionary discovery of parametric activation functions.

    \b
    Examples:
      evoact search -c toy.yaml
      evoact eval-fn "mul(x, sigmoid(p0(x)))" --at 0.5 --param 1.3
      evoact space-count
      evoact serve -c run.yaml --bind 0.0.0.0:5555
      evoact work --coordinator head-node:5555
    """
    configure_logging(err_console, verbose)
    config = RunConfig.load(config_path)
    if output_dir is not None:
        config.output.directory = output_dir
    ctx.obj = State(config=config, overwrite=overwrite or config.output.overwrite)


# -- search ---------------------------------------------------------------


def run_search(state: State, evolution: EvolutionConfig, bind: str | None) -> SearchHistory:
    spec = state.config.search_spec()
    with search_progress() as progress:
        task = progress.add_task("Evaluating candidates", total=evolution.budget)
        best = [0.0]

        def advance(candidate: Candidate) -> None:
            best[0] = max(best[0], candidate.score)
            progress.update(task, advance=1, description=f"Evaluating candidates (best {best[0]:.4f})")

        if evolution.mode is SearchMode.ASYNCHRONOUS:
            try:
                return serve(evolution, spec, state.config.distrib, bind, on_candidate=advance)
            except OSError as e:
                raise ProtocolError(f"coordinator failed: {e}", kind="network") from e
        return evolve(evolution, lambda graph: fitness_compressed(graph, spec), on_candidate=advance)


def finish_search(state: State, history: SearchHistory, command: str, evolution: EvolutionConfig) -> None:
    """Rerank, then write history, progress, rerank table and report."""
    settings = state.config.rerank
    spec = state.config.search_spec()
    history_path, _, progress_path, rerank_path, report_path = state.claim(*SEARCH_OUTPUTS)

    err_console.print(f"Reranking the top {settings.top_n} function(s) with {settings.runs} full run(s) each...")
    ranked = rerank(
        history,
        lambda graph, seed: fitness_full(graph, spec, seed),
        top_n=settings.top_n,
        runs=settings.runs,
        keep=settings.keep,
        seed=evolution.seed,
    )
    meta = state.meta(command, evolution=evolution.model_dump(mode="json"))
    write_history(history_path, history, meta, overwrite=True)
    write_csv(progress_path, history.progress_frame(), meta, overwrite=True)
    write_csv(rerank_path, rerank_frame(ranked), meta, overwrite=True)
    write_text(report_path, ReportRenderer().search(history, ranked, settings.runs), meta, overwrite=True)

    table = Table(title="Top functions")
    table.add_column("#", justify="right")
    table.add_column("Expression")
    table.add_column("Adjusted", justify="right")
    table.add_column("Search", justify="right")
    for rank, r in enumerate(ranked, start=1):
        table.add_row(str(rank), escape(r.expr), f"{r.adjusted_fitness:.4f}", f"{r.candidate.score:.4f}")
    console.print(table)
    console.print(
        f"{len(history)} evaluations ({history.accepted_count} accepted); results in {escape(str(state.output_dir))}"
    )


@cli.command()
@click.option(
    "--mode",
    type=click.Choice(["evolution", "random-search"]),
    default="evolution",
    show_default=True,
    help="random-search forces P=1, S=1, V=0",
)
@click.option("--no-params", is_flag=True, help="Evolve without parameter sites")
@click.option("--budget", "-C", type=int, help="Override evolution.budget")
@click.option("--seed", type=int, help="Override evolution.seed")
@click.option("--bind", help="Coordinator address when evolution.mode is asynchronous")
@click.pass_obj
def search(state: State, mode: str, no_params: bool, budget: int | None, seed: int | None, bind: str | None) -> None:
    """Run a search, rerank its best functions and write the results."""
    overrides: dict[str, Any] = {"budget": budget, "seed": seed}
    if no_params:
        overrides["parameterize"] = False
    evolution = revalidate(EvolutionConfig, state.config.evolution, **overrides)
    if mode == "random-search":
        evolution = EvolutionConfig.random_search(**evolution.model_dump())
    state.claim(*SEARCH_OUTPUTS)

    history = run_search(state, evolution, bind)
    finish_search(state, history, "search", evolution)


@cli.command("serve")
@click.option("--bind", help="Address to listen on (default: distrib.bind)")
@click.pass_obj
def serve_cmd(state: State, bind: str | None) -> None:
    """Coordinate remote workers until the budget is spent."""
    evolution = state.config.evolution.model_copy(update={"mode": SearchMode.ASYNCHRONOUS})
    history_path, _, progress_path = state.claim("history.jsonl", "history.meta.yaml", "progress.csv")
    history = run_search(state, evolution, bind)
    meta = state.meta("serve")
    write_history(history_path, history, meta, overwrite=True)
    write_csv(progress_path, history.progress_frame(), meta, overwrite=True)
    console.print(f"{len(history)} evaluations recorded in {escape(str(history_path))}")


@cli.command()
@click.option("--coordinator", "address", required=True, help="Coordinator host:port")
@click.option("--worker-id", help="Name reported to the coordinator")
@click.pass_obj
def work(state: State, address: str, worker_id: str | None) -> None:
    """Train candidates handed out by a coordinator."""
    try:
        worker = Worker(address, state.config.distrib, worker_id=worker_id)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--coordinator") from e
    completed = asyncio.run(worker.run())
    console.print(f"Completed {completed} task(s)")
    if not worker.shut_down:
        raise ProtocolError(f"lost coordinator {address}", kind="network")


@cli.command("rerank")
@click.argument("history_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--top-n", type=int, help="Override rerank.top_n")
@click.option("--runs", type=int, help="Override rerank.runs")
@click.option("--keep", type=int, help="Override rerank.keep")
@click.pass_obj
def rerank_cmd(state: State, history_file: Path, top_n: int | None, runs: int | None, keep: int | None) -> None:
    """Rerank an existing history with full-schedule runs."""
    settings = revalidate(type(state.config.rerank), state.config.rerank, top_n=top_n, runs=runs, keep=keep)
    rerank_path, report_path = state.claim("rerank.csv", "report.txt")
    history = load_history(history_file, state.config.evolution.population_size)
    spec = state.config.search_spec()
    ranked = rerank(
        history,
        lambda graph, seed: fitness_full(graph, spec, seed),
        top_n=settings.top_n,
        runs=settings.runs,
        keep=settings.keep,
        seed=state.config.evolution.seed,
    )
    meta = state.meta("rerank", history=str(history_file))
    write_csv(rerank_path, rerank_frame(ranked), meta, overwrite=True)
    write_text(report_path, ReportRenderer().search(history, ranked, settings.runs), meta, overwrite=True)
    for rank, r in enumerate(ranked, start=1):
        console.print(f"{rank}. {escape(r.expr)}  {r.adjusted_fitness:.4f}")


# -- single functions -----------------------------------------------------


@cli.command("eval-fn", context_settings=POINTS_CONTEXT)
@click.argument("expr")
@points_option
@extra_points
@click.option("--param", "-p", "params", type=float, multiple=True, help="Parameter values (default all 1)")
@click.pass_obj
def eval_fn(state: State, expr: str, at: tuple[float, ...], extra: tuple[float, ...], params: tuple[float, ...]) -> None:
    """Print value and derivatives of EXPR at the given points."""
    graph = parse_expr(expr, bounded=False)
    values = list(params) if params else [1.0] * graph.param_count
    if len(values) != graph.param_count:
        raise click.BadParameter(f"{expr} takes {graph.param_count} parameter(s), got {len(values)}", param_hint="--param")
    points = collect_points(at, extra) or [0.0]
    result = graph.eval_grad(values, np.asarray(points, dtype=np.float64))

    table = Table(title=escape(str(graph)))
    table.add_column("x", justify="right")
    table.add_column("f(x)", justify="right")
    table.add_column("df/dx", justify="right")
    for index in range(graph.param_count):
        table.add_column(f"df/dp{index}", justify="right")
    shape = (len(points),)
    columns = [np.broadcast_to(v, shape) for v in (result.value, result.d_dx, *result.d_dparams)]
    for i, x in enumerate(points):
        row = [fmt(x)] + [fmt(column[i]) for column in columns]
        table.add_row(*row)
    console.print(table)


@cli.command("train-fn")
@click.argument("expr")
@click.option("--baseline", "is_baseline", is_flag=True, help="EXPR names a baseline activation")
@click.option("--strip-params", "strip", is_flag=True, help="Remove every parameter site before training")
@click.option("--scaled", is_flag=True, help="Train alpha * f(beta * x)")
@click.option("--compressed", is_flag=True, help="Use the compressed search schedule")
@click.option("--seed", type=int, help="Override train.seed")
@click.option("--prefix", default="train", show_default=True, help="File name prefix")
@click.pass_obj
def train_fn(
    state: State,
    expr: str,
    is_baseline: bool,
    strip: bool,
    scaled: bool,
    compressed: bool,
    seed: int | None,
    prefix: str,
) -> None:
    """Train one network with EXPR and write its curves and parameter trajectories."""
    activation = resolve_activation(expr, is_baseline, strip, scaled)
    spec = state.config.train
    curves_path, trajectory_path = state.claim(f"{prefix}_curves.csv", f"{prefix}_trajectory.csv")
    schedule = compress(spec.schedule, spec.compress_factor) if compressed else None
    record = evaluate_activation(activation, spec, seed=seed, schedule=schedule)

    meta = state.meta("train-fn", activation=activation.name)
    write_csv(curves_path, curves_frame(record), meta, overwrite=True)
    write_csv(trajectory_path, trajectory_frame(record), meta, overwrite=True)

    table = Table(show_header=False, box=None)
    table.add_column("Key", style="bold")
    table.add_column("Value")
    table.add_row("Activation", escape(activation.name))
    table.add_row("Status", record.status.value)
    table.add_row("Validation accuracy", f"{record.fitness:.4f}")
    table.add_row("Test accuracy", "-" if record.test_acc is None else f"{record.test_acc:.4f}")
    table.add_row("Epochs", str(record.epochs_completed))
    table.add_row("Seconds", f"{record.runtime_seconds:.1f}")
    console.print(table)


def load_spec_file(path: Path) -> TrainSpec:
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        return TrainSpec.model_validate(data)
    except (OSError, yaml.YAMLError, ValidationError) as e:
        raise ConfigError(str(e), path=path) from e


@cli.command("cross-eval")
@click.argument("exprs", nargs=-1, required=True)
@click.option(
    "--spec-file",
    "spec_files",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    multiple=True,
    help="Extra TrainSpec YAML, named by file stem (repeatable)",
)
@click.option("--seeds", type=int, help="Override cross_eval.seeds")
@click.pass_obj
def cross_eval(state: State, exprs: tuple[str, ...], spec_files: tuple[Path, ...], seeds: int | None) -> None:
    """Train every EXPR under the base spec, a wider spec and any extra specs."""
    graphs = [parse_expr(expr) for expr in exprs]
    base = state.config.train
    specs = [base, wider_spec(base, state.config.cross_eval.wider_factor)]
    names = ["base", f"wider_x{state.config.cross_eval.wider_factor}"]
    for path in spec_files:
        specs.append(load_spec_file(path))
        names.append(path.stem)
    (matrix_path,) = state.claim("cross_eval.csv")

    result = cross_evaluate(graphs, specs, seeds=seeds or state.config.cross_eval.seeds, spec_names=names)
    write_csv(matrix_path, result.to_frame(), state.meta("cross-eval"), overwrite=True)

    table = Table(title="Mean fitness")
    table.add_column("Function")
    for name in names:
        table.add_column(name, justify="right")
    for graph_name, row in zip(result.graph_names, result.matrix):
        table.add_row(escape(graph_name), *(f"{value:.4f}" for value in row))
    console.print(table)

    candidates = [Candidate(seq=i, graph=graph) for i, graph in enumerate(graphs)]
    general = pareto_general(candidates, result.matrix.tolist())
    console.print("General (non-dominated): " + ", ".join(escape(c.expr) for c in general))


# -- analysis -------------------------------------------------------------


@cli.command("space-count")
@click.option("--max-nodes", type=int, default=7, show_default=True)
@click.option("--max-params", type=int, default=3, show_default=True)
@click.option(
    "--arrangements-file",
    type=click.Path(dir_okay=False, path_type=Path),
    help='YAML/JSON overrides keyed "binary,unary"',
)
@click.option("--uncapped", is_flag=True, help="Allow up to max-params sites regardless of edge count")
@click.option("--check-arrangements", is_flag=True, help="Re-derive every table arrangement by enumeration")
@click.option("--json", "as_json", is_flag=True, help="Print the census as JSON")
@click.option("--save", is_flag=True, help="Also write census.txt and census.json")
@click.pass_obj
def space_count(
    state: State,
    max_nodes: int,
    max_params: int,
    arrangements_file: Path | None,
    uncapped: bool,
    check_arrangements: bool,
    as_json: bool,
    save: bool,
) -> None:
    """Count the distinct activation functions in the search space."""
    arrangements = load_arrangements(arrangements_file) if arrangements_file else None
    census = count_space(max_nodes=max_nodes, max_params=max_params, arrangements=arrangements, capped=not uncapped)
    text = ReportRenderer().census(census)
    if save:
        text_path, json_path = state.claim("census.txt", "census.json")
        meta = state.meta("space-count")
        write_text(text_path, text, meta, overwrite=True)
        write_text(json_path, json.dumps(census.to_dict(), indent=2) + "\n", overwrite=True)
    click.echo(json.dumps(census.to_dict(), indent=2) if as_json else text.rstrip("\n"))

    if check_arrangements:
        table = arrangements or REFERENCE_ARRANGEMENTS
        for (binary, unary), expected in sorted(table.items()):
            click.echo(enumerate_shapes(binary, unary, reference=expected).describe())


@cli.command("baselines", context_settings=POINTS_CONTEXT)
@click.argument("name", required=False)
@points_option
@extra_points
@click.option("--scaled", is_flag=True, help="Evaluate alpha * f(beta * x) at alpha = beta = 1")
def baselines_cmd(name: str | None, at: tuple[float, ...], extra: tuple[float, ...], scaled: bool) -> None:
    """List the baseline activations, or evaluate NAME at points."""
    points = collect_points(at, extra)
    if name is None:
        table = Table(title="Baseline activation functions")
        table.add_column("Name")
        table.add_column("Kind")
        table.add_column("Params", justify="right")
        for group, members in (("fixed", FIXED), ("parametric", PARAMETRIC), ("learnable", LEARNABLE)):
            for member in members:
                table.add_row(member, group, str(baseline(member).param_count))
        console.print(table)
        return

    activation = wrap_scaled(name) if scaled else baseline(name)
    values = activation.forward(np.asarray(points or [0.0], dtype=np.float64))
    click.echo(f"{activation.name} ({activation.param_count} params)")
    click.echo(" ".join(fmt(v) for v in np.atleast_1d(values)))


def print_construction(construction, points: list[float]) -> None:
    click.echo(f"expr: {construction.graph}")
    click.echo("params: " + " ".join(f"p{i}={fmt(v)}" for i, v in enumerate(construction.params)))
    click.echo(f"nodes: {construction.graph.node_count()}")
    if points:
        values = construction(np.asarray(points, dtype=np.float64))
        click.echo("values: " + " ".join(fmt(v) for v in np.atleast_1d(values)))


@cli.command(context_settings=POINTS_CONTEXT)
@click.argument("kind", type=click.Choice(["left", "right", "open_interval", "point"]))
@click.option("--a", "lower", type=float, help="Lower bound (right, open_interval) or the point")
@click.option("--b", "upper", type=float, help="Upper bound (left, open_interval)")
@points_option
@extra_points
def indicator(kind: str, lower: float | None, upper: float | None, at: tuple[float, ...], extra: tuple[float, ...]) -> None:
    """Build an exact indicator function from the operator vocabulary."""
    try:
        construction = build_indicator(kind, a=lower, b=upper)
    except ValueError as e:
        raise click.UsageError(str(e)) from e
    print_construction(construction, collect_points(at, extra))


@cli.command("compile-piecewise", context_settings=POINTS_CONTEXT)
@click.argument("spec_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@points_option
@extra_points
def compile_piecewise_cmd(spec_file: Path, at: tuple[float, ...], extra: tuple[float, ...]) -> None:
    """Compile a piecewise series description (YAML or JSON) into one graph."""
    try:
        spec = PiecewiseSpec.model_validate(yaml.safe_load(spec_file.read_text(encoding="utf-8")) or {})
    except (yaml.YAMLError, ValidationError) as e:
        raise ConfigError(str(e), path=spec_file) from e
    print_construction(compile_piecewise(spec), collect_points(at, extra))


# -- studies --------------------------------------------------------------


@cli.command()
@click.option("--n", "count", type=int, default=20, show_default=True, help="Number of random functions")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--no-params", is_flag=True, help="Sample without parameter sites")
@click.pass_obj
def sample(state: State, count: int, seed: int, no_params: bool) -> None:
    """Train randomly sampled functions once each."""
    if count < 1:
        raise click.BadParameter("must be at least 1", param_hint="--n")
    (sample_path,) = state.claim("sample.csv")
    graphs = sample_random_functions(count, np.random.default_rng(seed), with_params=not no_params)
    frame = sample_study(graphs, state.config.train)
    write_csv(sample_path, frame, state.meta("sample", n=count, seed=seed), overwrite=True)
    ok = frame[frame["status"] == "ok"]["fitness"]
    console.print(
        f"{count} functions, {len(ok)} stable; median fitness {ok.median() if len(ok) else 0.0:.4f}; "
        f"results in {escape(str(sample_path))}"
    )


@cli.command("compare-runs")
@click.argument("history_files", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--reference", type=float, help="Fitness to beat, e.g. the ReLU baseline")
@click.option("--window", type=int, help="Averaging window (default: each run's P)")
@click.pass_obj
def compare_runs(state: State, history_files: tuple[Path, ...], reference: float | None, window: int | None) -> None:
    """Reliability and efficiency summary over several search runs."""
    histories = [load_history(path) for path in history_files]
    names = [path.parent.name if path.stem == "history" else path.stem for path in history_files]
    if len(set(names)) != len(names):
        names = [str(path) for path in history_files]
    summaries_path, progress_path = state.claim("runs.csv", "runs_progress.csv")

    summaries = summarize_runs(histories, names, window=window, reference=reference)
    meta = state.meta("compare-runs", reference=reference)
    write_csv(summaries_path, summaries_frame(summaries), meta, overwrite=True)
    write_csv(progress_path, combined_progress(histories, names), meta, overwrite=True)
    click.echo(ReportRenderer().runs(summaries).rstrip("\n"))


@cli.command("benchmark")
@click.argument("names", nargs=-1)
@click.option("--expr", "exprs", multiple=True, help="Activation expression to include (repeatable)")
@click.option("--seeds", type=int, default=5, show_default=True)
@click.option("--reference", default="relu", show_default=True, help="Row the p-values compare against")
@click.option("--scaled", is_flag=True, help="Wrap every function as alpha * f(beta * x)")
@click.pass_obj
def benchmark_cmd(
    state: State,
    names: tuple[str, ...],
    exprs: tuple[str, ...],
    seeds: int,
    reference: str,
    scaled: bool,
) -> None:
    """Mean and standard deviation of accuracy over seeds, with Welch p-values."""
    activations: dict[str, ActivationFunction] = {}
    for name in dict.fromkeys((reference, *names)):
        activations[name] = wrap_scaled(name) if scaled else baseline(name)
    for expr in exprs:
        graph = parse_expr(expr)
        activations[str(graph)] = wrap_scaled(graph) if scaled else as_activation(graph)
    (benchmark_path,) = state.claim("benchmark.csv")

    rows = benchmark(activations, state.config.train, seeds=seeds, reference=reference)
    frame = benchmark_frame(rows)
    write_csv(benchmark_path, frame, state.meta("benchmark", seeds=seeds, reference=reference), overwrite=True)

    table = Table(title=f"Accuracy over {seeds} seed(s)")
    for column in ("Function", "Validation", "Test", "Unstable", "p-value"):
        table.add_column(column, justify="left" if column == "Function" else "right")
    for row in rows:
        table.add_row(
            escape(row.name),
            f"{row.val_mean:.4f} ± {row.val_std:.4f}",
            f"{row.test_mean:.4f} ± {row.test_std:.4f}",
            str(row.unstable_runs),
            "-" if row.p_value is None else f"{row.p_value:.3g}",
        )
    console.print(table)


def main() -> None:
    """Console-script entry point."""
    cli()


if __name__ == "__main__":
    main()
