"""
Command-line interface for the randomized pick-freeze Sobol estimator.
"""

import functools
import json
import logging
from typing import Dict, List, Optional

import click
from rich.console import Console
from rich.table import Table

from .. import __version__
from ..core.bounds import classical_cost
from ..core.experiments import ExperimentRunner
from ..core.pipeline import RPFPipeline
from ..utils.config import Config, RunConfig
from ..utils.exceptions import ConfigError, RPFError, reported_as_config_error
from ..utils.logger import get_logger, setup_logger


ACCEPTANCE_FAILURE = 4
NUMERICAL_FAILURE = 3

RUN_COMMAND = dict(ignore_unknown_options=True, allow_extra_args=True)


def parse_overrides(args: List[str]) -> Dict[str, str]:
    """Turn ``--key value`` / ``--key=value`` pairs into a raw override dict."""
    overrides: Dict[str, str] = {}
    i = 0
    while i < len(args):
        token = args[i]
        if not token.startswith('--') or len(token) == 2:
            raise ConfigError(f"unexpected argument '{token}'", module="cli")
        key = token[2:]
        if '=' in key:
            key, value = key.split('=', 1)
            i += 1
        elif i + 1 < len(args):
            value = args[i + 1]
            i += 2
        else:
            raise ConfigError(f"missing value for --{key}", module="cli")
        overrides[key.replace('-', '_')] = value
    return overrides


def load_run(run_config: Optional[str], args: List[str]) -> RunConfig:
    overrides = parse_overrides(args)
    if run_config:
        return RunConfig.load(run_config, overrides)
    return RunConfig.from_pairs(overrides)


def reports_errors(command):
    """Map estimator errors onto exit codes with a ``[module] message`` line."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except RPFError as e:
            click.echo(f"Error: {e}", err=True)
            raise click.exceptions.Exit(e.exit_code)
        except ArithmeticError as e:
            click.echo(f"Error: [numerics] {e}", err=True)
            raise click.exceptions.Exit(NUMERICAL_FAILURE)

    return wrapper


def emit_json(payload: dict) -> None:
    click.echo(json.dumps(payload, indent=2, sort_keys=True, default=str))


@click.group()
@click.option('--config', '-c', help='Settings file path')
@click.option('--verbose', '-v', is_flag=True, help='Enable verbose logging')
@click.pass_context
def cli(ctx, config, verbose):
    """Randomized pick-freeze estimation of sparse first-order Sobol indices."""
    try:
        settings = Config(config)
    except ConfigError as e:
        click.echo(f"Error: {e}", err=True)
        raise click.exceptions.Exit(e.exit_code)

    setup_logger(config=settings)
    if verbose:
        logger = get_logger()
        logger.setLevel(logging.DEBUG)
        for handler in logger.handlers:
            if isinstance(handler, logging.StreamHandler):
                handler.setLevel(logging.DEBUG)
    ctx.obj = settings


@cli.command(context_settings=RUN_COMMAND)
@click.option('--run-config', '-f', type=click.Path(), help='Run config file (key=value lines)')
@click.pass_context
@reports_errors
def estimate(ctx, run_config):
    """Run the full method and write E, the path, recovery and evaluation counts."""
    run = load_run(run_config, ctx.args)
    pipeline = RPFPipeline(ctx.obj)
    result = pipeline.run(run)
    written = pipeline.write_artifacts(run, result)

    recovery = result.recovery
    click.echo(f"Support: {sorted(recovery.support)}")
    if recovery.undecided:
        click.echo(f"Undecided: {sorted(recovery.undecided)}")
    if recovery.truth_comparison is not None:
        click.echo(f"Exact recovery: {recovery.truth_comparison.exact}")
    click.echo(f"Model evaluations: {result.eval_count} (formula {result.expected_evals})")
    for warning in result.warnings:
        click.echo(f"Warning: {warning}")
    click.echo(f"Artifacts: {', '.join(sorted(written))} in {run.output}")


@cli.command(context_settings=RUN_COMMAND)
@click.option('--run-config', '-f', type=click.Path(), help='Run config file (key=value lines)')
@click.pass_context
@reports_errors
def path(ctx, run_config):
    """Compute the LASSO path only (no thresholding)."""
    run = load_run(run_config, ctx.args)
    pipeline = RPFPipeline(ctx.obj)
    result = pipeline.run(run, recover=False)
    pipeline.write_artifacts(run, result)

    smallest = result.smallest
    click.echo(f"Path of {len(result.solutions)} penalties, "
               f"active set at r={smallest.r:.4g}: {sorted(smallest.support)}")


@cli.command(context_settings=RUN_COMMAND)
@click.option('--run-config', '-f', type=click.Path(), help='Run config file (key=value lines)')
@click.pass_context
@reports_errors
def bounds(ctx, run_config):
    """Evaluate a bound calculator and print its report as flat JSON."""
    run = load_run(run_config, ctx.args)
    if not run.calculator:
        raise ConfigError("no calculator selected (set calculator=...)", module="bounds")

    if run.calculator == 'classical_cost':
        if run.p < 1 or run.target_width is None or run.confidence is None:
            raise ConfigError("classical_cost needs p, target_width and confidence",
                              module="bounds")
        with reported_as_config_error():
            cost = classical_cost(run.p, run.target_width, run.confidence)
        emit_json(cost.to_dict())
        return

    report = RPFPipeline(ctx.obj).bound_report(run)
    emit_json(report.to_flat_dict())


@cli.command(name='verify-design', context_settings=RUN_COMMAND)
@click.option('--run-config', '-f', type=click.Path(), help='Run config file (key=value lines)')
@click.pass_context
@reports_errors
def verify_design(ctx, run_config):
    """Sample a design and report Gram, degree, expansion and UDP checks."""
    run = load_run(run_config, ctx.args)
    emit_json(RPFPipeline(ctx.obj).verify_design(run))


@cli.command(context_settings=RUN_COMMAND)
@click.option('--run-config', '-f', type=click.Path(), help='Run config file (key=value lines)')
@click.pass_context
@reports_errors
def baseline(ctx, run_config):
    """Audit the cost of estimating every index one by one."""
    run = load_run(run_config, ctx.args)
    payload = RPFPipeline(ctx.obj).baseline(run)
    payload.pop('indices')
    emit_json(payload)
    if not payload['matches_formula']:
        raise click.exceptions.Exit(ACCEPTANCE_FAILURE)


@cli.command()
@click.argument('experiment_id', required=False)
@click.option('--all', 'run_all', is_flag=True, help='Reproduce every experiment')
@click.option('--output-dir', '-o', help='Output directory')
@click.option('--quiet', '-q', is_flag=True, help='Hide progress bars')
@click.pass_context
@reports_errors
def reproduce(ctx, experiment_id, run_all, output_dir, quiet):
    """Reproduce a reference experiment and check its acceptance criteria."""
    runner = ExperimentRunner(ctx.obj, show_progress=not quiet)
    if run_all:
        ids = runner.experiment_ids
    elif experiment_id:
        ids = [experiment_id]
    else:
        raise ConfigError(f"choose one of {', '.join(runner.experiment_ids)} or --all",
                          module="cli")

    table = Table(title="Acceptance")
    table.add_column("Experiment")
    table.add_column("Criterion")
    table.add_column("Observed")
    table.add_column("Expected")
    table.add_column("Result")

    failed = False
    for eid in ids:
        outcome = runner.reproduce(eid, output_dir)
        failed |= not outcome.passed
        for criterion in outcome.criteria:
            table.add_row(eid, criterion.name, str(criterion.observed), str(criterion.expected),
                          "PASS" if criterion.passed else "[red]FAIL[/red]")

    Console().print(table)
    if failed:
        raise click.exceptions.Exit(ACCEPTANCE_FAILURE)


@cli.command()
def version():
    """Show version information."""
    click.echo(f"rpf-sobol version {__version__}")


if __name__ == '__main__':
    cli()
