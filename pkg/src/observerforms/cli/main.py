"""`observerforms` command line.

Exit codes: 0 when every report passes, 1 when a residual or identity fails, 2 on invalid input.
"""

import json
import logging
import sys
from collections.abc import Callable, Sequence
from functools import wraps
from pathlib import Path
from typing import ParamSpec

import click
from pydantic import ValidationError

from observerforms.errors import ObserverFormsError
from observerforms.ehresmann import DEMOS

from .commands import SUITE_ALIASES, SUITES, OutputFormat, format_report, load_connection, load_scenario, run_check, run_ehresmann, split_files
from .schema import ReportFile

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT_ERROR = 2

P = ParamSpec("P")

_FORMAT = click.option(
    "--format",
    "output_format",
    type=click.Choice(["text", "structured"]),
    default="text",
    show_default=True,
    help="Plain text, or a JSON document with sorted keys.",
)
_OUTPUT = click.option(
    "-o",
    "--output",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write the report here instead of stdout.",
)


def _input_errors(command: Callable[P, None]) -> Callable[P, None]:
    """Turn input errors into a diagnostic on stderr and exit code 2."""

    @wraps(command)
    def wrapper(*args: P.args, **kwargs: P.kwargs) -> None:
        try:
            command(*args, **kwargs)
        except (ObserverFormsError, ValidationError) as exc:
            logger.debug("Input error", exc_info=exc)
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT_ERROR)

    return wrapper


def _emit(reports: Sequence[ReportFile], output_format: OutputFormat, output: Path | None) -> None:
    if output_format == "structured" and len(reports) > 1:
        text = json.dumps([report.model_dump(mode="json") for report in reports], indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    else:
        text = "".join(format_report(report, output_format) for report in reports)
    if output is None:
        click.echo(text, nl=False)
    else:
        output.write_text(text, encoding="utf-8")
    sys.exit(EXIT_PASS if all(report.verdict == "PASS" for report in reports) else EXIT_FAIL)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log computation steps to stderr.")
@click.version_option(package_name="observerforms")
def cli(*, verbose: bool) -> None:
    """Exact exterior calculus for observers, connections and the split Maxwell equations."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


@cli.command()
@click.argument("files", nargs=-1, required=True, type=click.Path(dir_okay=False))
@click.option("-j", "--jobs", type=click.IntRange(min=1), default=1, show_default=True, help="Worker processes for several files.")
@_OUTPUT
@_FORMAT
@_input_errors
def split(files: tuple[str, ...], jobs: int, output: Path | None, output_format: OutputFormat) -> None:
    """Split Maxwell's equations along the observer of each scenario FILE."""
    _emit(split_files(files, jobs=jobs), output_format, output)


@cli.command()
@click.argument("file", type=click.Path(dir_okay=False))
@click.option("-s", "--suite", default="all", show_default=True, help=f"One of {', '.join(SUITES)} or all; aliases: {', '.join(SUITE_ALIASES)}.")
@_OUTPUT
@_FORMAT
@_input_errors
def check(file: str, suite: str, output: Path | None, output_format: OutputFormat) -> None:
    """Verify an identity suite on the observer of scenario FILE."""
    _emit([run_check(load_scenario(file), suite, source=file)], output_format, output)


@cli.command()
@click.option("--demo", type=click.Choice(DEMOS), default=None, help="A shipped connection.")
@click.option("--spec", "spec_path", type=click.Path(dir_okay=False), default=None, help="A connection file.")
@_OUTPUT
@_FORMAT
@_input_errors
def ehresmann(demo: str | None, spec_path: str | None, output: Path | None, output_format: OutputFormat) -> None:
    """Curvature, torque and axioms of an Ehresmann connection; give exactly one of --demo and --spec."""
    if (demo is None) == (spec_path is None):
        msg = "give exactly one of --demo and --spec"
        raise click.UsageError(msg)
    if spec_path is not None:
        report = run_ehresmann(spec=load_connection(spec_path), source=spec_path)
    else:
        report = run_ehresmann(demo=demo)
    _emit([report], output_format, output)
