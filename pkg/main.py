"""
carddl command line

Decides satisfiability, consistency and conjunctive query entailment for
description logics with cardinality constraints. Each command prints one JSON
line on stdout; logs and --trace output go to stderr.

Exit codes: 0 positive verdict, 1 negative verdict, 2 resource limit, 3 error.
"""

import json
import logging
import sys
from typing import Optional

import click
from pydantic import ValidationError

from api.commands import EXIT_ERROR, run_command
from api.config import load_config

logger = logging.getLogger(__name__)


def _emit(code: int, payload: dict) -> None:
    for event in payload.pop("trace", None) or ():
        click.echo(json.dumps(event, sort_keys=True), err=True)
    click.echo(json.dumps(payload, sort_keys=True))
    sys.exit(code)


def _run(ctx: click.Context, name: str, **kwargs) -> None:
    try:
        config = load_config(**ctx.obj)
    except ValidationError as e:
        _emit(EXIT_ERROR, {"command": name, "verdict": "ERROR", "error": "ValidationError", "detail": str(e)})
        return
    logging.getLogger().setLevel(config.log_level)
    code, payload = run_command(name, config=config, **kwargs)
    _emit(code, payload)


@click.group()
@click.option("--max-venn", type=int, default=None, help="Cap on Venn regions per formula.")
@click.option("--max-types", type=int, default=None, help="Cap on generated types.")
@click.option("--timeout", type=float, default=None, help="Solver time limit in seconds.")
@click.option("--jobs", type=int, default=None, help="Parallel spoiler checks.")
@click.option("--oracle-size", type=int, default=None, help="Largest domain the oracle tries.")
@click.option("--seed", type=int, default=None, help="Solver random seed.")
@click.option("--trace", is_flag=True, default=None, help="Write procedure steps to stderr.")
@click.option("--dump-delta", is_flag=True, default=None, help="Include the Venn decomposition in sat output.")
@click.option("--exhaustive", is_flag=True, default=None, help="Enumerate augmented types exhaustively.")
@click.option("--verbose", is_flag=True, default=False, help="Log at DEBUG level.")
@click.pass_context
def cli(ctx: click.Context, verbose: bool, **options):
    """Reasoning with cardinality constraints."""
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if verbose:
        options["log_level"] = "DEBUG"
    # flags left unset fall back to the environment
    ctx.obj = {k: (v or None) if isinstance(v, bool) else v for k, v in options.items()}


@cli.command()
@click.argument("kb_file", type=click.Path())
@click.option("--model", "model_path", type=click.Path(), default=None, help="Write the model JSON here.")
@click.pass_context
def sat(ctx: click.Context, kb_file: str, model_path: Optional[str]):
    """Satisfiability of the goal concept together with the file's axioms."""
    _run(ctx, "sat", kb_path=kb_file, model_path=model_path)


@cli.command()
@click.argument("kb_file", type=click.Path())
@click.option("--model", "model_path", type=click.Path(), default=None, help="Write the model JSON here.")
@click.pass_context
def consistent(ctx: click.Context, kb_file: str, model_path: Optional[str]):
    """Consistency of a knowledge base."""
    _run(ctx, "consistent", kb_path=kb_file, model_path=model_path)


@cli.command()
@click.argument("kb_file", type=click.Path())
@click.argument("query_file", type=click.Path())
@click.option("--model", "model_path", type=click.Path(), default=None, help="Write the countermodel JSON here.")
@click.pass_context
def entails(ctx: click.Context, kb_file: str, query_file: str, model_path: Optional[str]):
    """Entailment of a Boolean conjunctive query."""
    _run(ctx, "entails", kb_path=kb_file, query_path=query_file, model_path=model_path)


@cli.command()
@click.argument("model_file", type=click.Path())
@click.argument("kb_file", type=click.Path())
@click.pass_context
def check(ctx: click.Context, model_file: str, kb_file: str):
    """Check a model against a knowledge base."""
    _run(ctx, "check", model_path=model_file, kb_path=kb_file)


@cli.command()
@click.argument("kb_file", type=click.Path())
@click.option("--model", "model_path", type=click.Path(), default=None, help="Write the first model JSON here.")
@click.option("--symbolic", is_flag=True, help="Search with z3 instead of enumerating.")
@click.pass_context
def oracle(ctx: click.Context, kb_file: str, model_path: Optional[str], symbolic: bool):
    """Bounded model search up to --oracle-size elements."""
    _run(ctx, "oracle", kb_path=kb_file, model_path=model_path, symbolic=symbolic)


@cli.command()
@click.argument("operation", type=click.Choice(["unravel", "loosen", "girth", "duplicate"]))
@click.argument("model_file", type=click.Path())
@click.option("--depth", type=int, default=3, help="Sequence length for unravel.")
@click.option("-k", "k", type=int, default=2, help="Blocking suffix length for loosen.")
@click.option("--element", default=None, help="Element label to duplicate.")
@click.option("--copies", type=int, default=1, help="Number of copies for duplicate.")
@click.option("--output", "output_path", type=click.Path(), default=None, help="Write the result model here.")
@click.pass_context
def lab(ctx, operation, model_file, depth, k, element, copies, output_path):
    """Model transformations: unravel, loosen, girth, duplicate."""
    _run(
        ctx,
        "lab",
        operation=operation,
        model_path=model_file,
        depth=depth,
        k=k,
        element=element,
        copies=copies,
        output_path=output_path,
    )


if __name__ == "__main__":
    cli()
