"""Command line, scenario schema and expression front-end."""

from observerforms.cli.commands import format_report, load_connection, load_scenario, run_check, run_ehresmann, run_split
from observerforms.cli.expressions import parse_expression, render_expression
from observerforms.cli.schema import CheckResult, ConnectionSpec, ReportFile, ScenarioFile

__all__ = [
    "CheckResult",
    "ConnectionSpec",
    "ReportFile",
    "ScenarioFile",
    "format_report",
    "load_connection",
    "load_scenario",
    "parse_expression",
    "render_expression",
    "run_check",
    "run_ehresmann",
    "run_split",
]
