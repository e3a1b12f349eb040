"""The work behind the `split`, `check` and `ehresmann` commands.

Each `run_*` function turns validated input into a `ReportFile`; nothing here prints or exits.
"""

import json
import logging
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from itertools import combinations
from pathlib import Path
from typing import Literal

import yaml

from observerforms.calculus import VectorForm
from observerforms.ehresmann import (
    DEMOS,
    BundleChart,
    ConnectionField,
    SectionGraph,
    bianchi_check,
    check_axioms,
    connection_from_horizontal,
    covariant_derivative,
    curvature_omega,
    demo_connection,
    horizontal_matrix,
    torque_general,
)
from observerforms.errors import ObserverFormsError, ScenarioInputError, UnknownSuiteError
from observerforms.forms import Chart, KForm, VectorField, basis_forms
from observerforms.maxwell import EMScenario, SplitReport, build_scenario, maxwell_residuals, split_equation
from observerforms.observer import (
    Observer,
    curvature,
    curvature_bracket_residual,
    decomposition_residual,
    intertwining_residuals,
    is_holonomic,
    is_metric_compatible,
    make_observer,
    observer_from_T,
    temperley_lieb_residuals,
    torque,
    torque_bracket_residual,
    torque_form,
)
from observerforms.ratfunc import CoordinateRing, ScalarField

from .expressions import parse_expression
from .schema import CheckResult, ConnectionSpec, RenderedForm, ReportFile, ScenarioFile

logger = logging.getLogger(__name__)

SUITES = ("decomposition", "temperley-lieb", "prop21", "prop47", "lemma42")
"""Identity suites of `check`; `all` runs every one of them."""

SUITE_ALIASES = {"brackets": "prop21", "intertwining": "prop47", "split-equation": "lemma42"}
"""Descriptive names accepted in place of the suite names."""

OutputFormat = Literal["text", "structured"]


def load_yaml(path: str | Path) -> object:
    """Read a YAML (or JSON) document.

    Raises:
        ScenarioInputError: If the file cannot be read or parsed.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioInputError(str(exc), path=str(path)) from exc
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioInputError(f"invalid YAML: {exc}", path=str(path)) from exc


def load_scenario(path: str | Path) -> ScenarioFile:
    return ScenarioFile.model_validate(load_yaml(path))


def load_connection(path: str | Path) -> ConnectionSpec:
    return ConnectionSpec.model_validate(load_yaml(path))


def _parse(src: str, ring: Chart | CoordinateRing, path: str) -> ScalarField:
    try:
        return parse_expression(src, ring)
    except ObserverFormsError as exc:
        raise ScenarioInputError(str(exc), path=path) from exc


def parse_form(chart: Chart, degree: int, components: Sequence[str], path: str) -> KForm:
    """Form whose components are listed in lexicographic multi-index order."""
    keys = list(combinations(range(chart.dimension), degree))
    values = {key: _parse(src, chart, f"{path}[{i}]") for i, (key, src) in enumerate(zip(keys, components, strict=True))}
    return KForm(chart, degree, values)


def build_chart(scenario: ScenarioFile) -> Chart:
    try:
        return Chart(tuple(scenario.chart), metric_signature=scenario.metric_signature)
    except ValueError as exc:
        raise ScenarioInputError(str(exc), path="chart") from exc


def build_observer(scenario: ScenarioFile, chart: Chart) -> Observer:
    """Observer of a scenario; surfaces construction errors with their field path."""
    t = VectorField(chart, [_parse(src, chart, f"observer.T[{i}]") for i, src in enumerate(scenario.observer.T)])
    try:
        if scenario.observer.tau is None:
            return observer_from_T(t)
        tau = parse_form(chart, 1, scenario.observer.tau, "observer.tau")
        return make_observer(t, tau)
    except ScenarioInputError:
        raise
    except ObserverFormsError as exc:
        raise ScenarioInputError(str(exc), path="observer") from exc


def build_em_scenario(scenario: ScenarioFile, observer: Observer) -> EMScenario:
    chart = observer.chart
    if scenario.em is None:
        msg = "split needs electromagnetic input"
        raise ScenarioInputError(msg, path="em")
    a = parse_form(chart, 1, scenario.em.a, "em.a") if scenario.em.a is not None else None
    f = parse_form(chart, 2, scenario.em.F, "em.F") if scenario.em.F is not None else None
    j = parse_form(chart, 3, scenario.j, "j") if scenario.j is not None else None
    try:
        return build_scenario(observer, a=a, F=f, j=j, compute_j=scenario.options.compute_j)
    except ObserverFormsError as exc:
        raise ScenarioInputError(str(exc), path="em") from exc


def render_form(w: KForm) -> RenderedForm:
    """Component labels like `dt^dx` (or `1` for 0-forms) mapped to canonical expressions."""
    names = w.chart.coordinates
    return {"^".join(f"d{names[i]}" for i in key) or "1": value.render() for key, value in w.components.items()}


def render_vector_form(a: VectorForm) -> RenderedForm:
    rendered: RenderedForm = {}
    for name, form in zip(a.chart.coordinates, a.forms, strict=True):
        for label, value in render_form(form).items():
            rendered[f"{label} (x) d/d{name}"] = value
    return rendered


def render_vector_field(x: VectorField) -> RenderedForm:
    return {f"d/d{name}": value.render() for name, value in zip(x.chart.coordinates, x.components, strict=True) if not value.is_zero}


def _check(name: str, residual: KForm | VectorForm, *, asserted: bool = True) -> CheckResult:
    passed = residual.is_zero
    rendered = {} if passed else (render_form(residual) if isinstance(residual, KForm) else render_vector_form(residual))
    return CheckResult(name=name, passed=passed, asserted=asserted, residual=rendered)


def _observer_quantities(observer: Observer) -> dict[str, RenderedForm]:
    return {
        "T": render_vector_field(observer.T),
        "tau": render_form(observer.tau),
        "torque": render_vector_form(torque(observer)),
        "curvature": render_vector_form(curvature(observer)),
    }


def _observer_properties(observer: Observer) -> dict[str, bool]:
    return {
        "holonomic": is_holonomic(observer),
        "torque_free": torque_form(observer).is_zero,
        "metric_compatible": is_metric_compatible(observer),
    }


def _split_quantities(report: SplitReport) -> dict[str, RenderedForm]:
    quantities: dict[str, RenderedForm] = {}
    for name in ("E", "B", "H", "D", "J", "rho", "phi", "A3"):
        value = getattr(report.fields, name)
        if value is not None:
            quantities[name] = render_form(value)
    quantities["torque_term_F"] = render_form(report.torque_term_F)
    quantities["curv_term_F"] = render_form(report.curv_term_F)
    quantities["torque_term_G"] = render_form(report.torque_term_G)
    quantities["curv_term_G"] = render_form(report.curv_term_G)
    return quantities


def run_split(scenario: ScenarioFile, *, source: str = "<scenario>") -> ReportFile:
    """Split Maxwell's equations along the scenario observer and report every residual.

    Raises:
        ScenarioInputError: On invalid or inconsistent input, tagged with the field path.
    """
    chart = build_chart(scenario)
    observer = build_observer(scenario, chart)
    em = build_em_scenario(scenario, observer)
    report = maxwell_residuals(em)
    check_constitutive = scenario.options.check_constitutive
    assert_constitutive = report.metric_compatible if check_constitutive is None else check_constitutive
    checks = [_check(name, value) for name, value in report.residuals.items()]
    checks += [_check(name, value, asserted=assert_constitutive) for name, value in report.constitutive.items()]
    result = ReportFile.from_checks(
        command="split",
        source=source,
        name=scenario.name,
        properties=_observer_properties(observer),
        quantities=_observer_quantities(observer) | _split_quantities(report),
        checks=checks,
    )
    logger.info("split %s: %s", source, result.verdict)
    return result


def _battery(observer: Observer) -> list[KForm]:
    chart = observer.chart
    return [form for degree in range(chart.dimension + 1) for form in basis_forms(chart, degree)]


def _first_failure(name: str, residuals: Iterable[KForm]) -> CheckResult:
    for residual in residuals:
        if not residual.is_zero:
            return _check(name, residual)
    return CheckResult(name=name, passed=True)


def _suite_decomposition(scenario: ScenarioFile, observer: Observer) -> list[CheckResult]:  # noqa: ARG001
    battery = _battery(observer)
    return [
        _first_failure(
            f"decomposition[degree={degree}]",
            (decomposition_residual(observer, w) for w in battery if w.degree == degree),
        )
        for degree in range(observer.chart.dimension + 1)
    ]


def _suite_temperley_lieb(scenario: ScenarioFile, observer: Observer) -> list[CheckResult]:  # noqa: ARG001
    battery = _battery(observer)
    pairs = [temperley_lieb_residuals(observer, w) for w in battery]
    return [
        _first_failure("temperley-lieb[iT eTau iT = iT]", (first for first, _ in pairs)),
        _first_failure("temperley-lieb[eTau iT eTau = eTau]", (second for _, second in pairs)),
    ]


def _suite_brackets(scenario: ScenarioFile, observer: Observer) -> list[CheckResult]:  # noqa: ARG001
    return [
        _check("brackets[torque]", torque_bracket_residual(observer)),
        _check("brackets[curvature]", curvature_bracket_residual(observer)),
    ]


def _suite_intertwining(scenario: ScenarioFile, observer: Observer) -> list[CheckResult]:  # noqa: ARG001
    battery = _battery(observer)
    pairs = [intertwining_residuals(observer, w) for w in battery]
    return [
        _first_failure("intertwining[iT hodge]", (first for first, _ in pairs)),
        _first_failure("intertwining[eTau hodge]", (second for _, second in pairs)),
    ]


def _suite_split_equation(scenario: ScenarioFile, observer: Observer) -> list[CheckResult]:
    chart = observer.chart
    if scenario.split_equation is not None:
        spec = scenario.split_equation
        w = parse_form(chart, spec.w.degree, spec.w.components, "split_equation.w.components")
        sigma = parse_form(chart, spec.sigma.degree, spec.sigma.components, "split_equation.sigma.components")
        pairs = [("split-equation", w, sigma)]
    elif scenario.em is not None:
        em = build_em_scenario(scenario, observer)
        pairs = [("split-equation[F]", em.F, KForm(chart, 3)), ("split-equation[G]", em.G, em.j)]
    else:
        msg = "the lemma42 suite needs a split_equation block or electromagnetic input"
        raise ScenarioInputError(msg, path="split_equation")
    checks = []
    for name, w, sigma in pairs:
        spatial, temporal = split_equation(observer, w, sigma)
        checks += [_check(f"{name}.spatial", spatial), _check(f"{name}.temporal", temporal)]
    return checks


_SUITE_RUNNERS: dict[str, Callable[[ScenarioFile, Observer], list[CheckResult]]] = {
    "decomposition": _suite_decomposition,
    "temperley-lieb": _suite_temperley_lieb,
    "prop21": _suite_brackets,
    "prop47": _suite_intertwining,
    "lemma42": _suite_split_equation,
}


def run_check(scenario: ScenarioFile, suite: str, *, source: str = "<scenario>") -> ReportFile:
    """Run one identity suite, or all of them, on the scenario observer.

    `suite` may also be one of the descriptive names in `SUITE_ALIASES`.
    Under `all`, `lemma42` runs only when the scenario supplies its inputs.

    Raises:
        UnknownSuiteError: If `suite` is neither a known suite nor `all`.
        ScenarioInputError: On invalid input.
    """
    resolved = SUITE_ALIASES.get(suite, suite)
    if resolved != "all" and resolved not in _SUITE_RUNNERS:
        msg = f"Unknown suite {suite!r}; expected one of {', '.join((*SUITES, 'all'))} or an alias in {', '.join(SUITE_ALIASES)}"
        raise UnknownSuiteError(msg)
    chart = build_chart(scenario)
    observer = build_observer(scenario, chart)
    names = list(SUITES) if resolved == "all" else [resolved]
    if resolved == "all" and scenario.split_equation is None and scenario.em is None:
        names.remove("lemma42")
    checks: list[CheckResult] = []
    for name in names:
        logger.debug("Running suite %s", name)
        checks += _SUITE_RUNNERS[name](scenario, observer)
    result = ReportFile.from_checks(
        command="check",
        source=source,
        name=scenario.name,
        properties=_observer_properties(observer),
        quantities=_observer_quantities(observer),
        checks=checks,
    )
    logger.info("check %s --suite %s: %s", source, suite, result.verdict)
    return result


def connection_from_spec(spec: ConnectionSpec) -> tuple[ConnectionField, SectionGraph | None]:
    """Build the connection (and optional section) described by a connection file."""
    try:
        bundle = BundleChart(tuple(spec.base), tuple(spec.fiber))
    except ValueError as exc:
        raise ScenarioInputError(str(exc), path="base") from exc
    total = bundle.total
    matrix = [[_parse(src, total, f"horizontal[{p}][{i}]") for i, src in enumerate(row)] for p, row in enumerate(spec.horizontal)]
    connection = connection_from_horizontal(bundle, matrix)
    section = None
    if spec.section is not None:
        base = bundle.base_chart
        section = SectionGraph(bundle, tuple(_parse(src, base, f"section[{p}]") for p, src in enumerate(spec.section)))
    return connection, section


def run_ehresmann(*, demo: str | None = None, spec: ConnectionSpec | None = None, source: str | None = None) -> ReportFile:
    """Report curvature, torque, the projection axioms and the Bianchi identity of a connection.

    Raises:
        ScenarioInputError: If neither or both of `demo` and `spec` are given, or the demo is unknown.
    """
    section = None
    if demo is not None and spec is None:
        if demo not in DEMOS:
            msg = f"unknown demo {demo!r}; expected one of {', '.join(DEMOS)}"
            raise ScenarioInputError(msg, path="demo")
        connection = demo_connection(demo)
    elif spec is not None and demo is None:
        connection, section = connection_from_spec(spec)
    else:
        msg = "give exactly one of a demo name or a connection spec"
        raise ScenarioInputError(msg)
    bundle = connection.bundle
    omega = curvature_omega(connection)
    torques = torque_general(connection)
    quantities: dict[str, RenderedForm] = {
        "kappa": render_vector_form(connection.kappa),
        "curvature": render_vector_form(omega),
    }
    for name, component in zip(bundle.fiber, torques, strict=True):
        quantities[f"torque[{name}]"] = render_vector_form(component)
    for p, row in enumerate(horizontal_matrix(connection)):
        quantities[f"horizontal[{bundle.fiber[p]}]"] = {f"d{name}": value.render() for name, value in zip(bundle.base, row, strict=True)}
    if section is not None:
        for p, row in enumerate(covariant_derivative(connection, section)):
            quantities[f"covariant_derivative[{bundle.fiber[p]}]"] = {
                f"d{name}": value.render() for name, value in zip(bundle.base, row, strict=True) if not value.is_zero
            }
    axioms = check_axioms(connection)
    checks = [CheckResult(name=f"axiom[{name}]", passed=value) for name, value in vars(axioms).items()]
    checks.append(CheckResult(name="bianchi", passed=bianchi_check(connection)))
    result = ReportFile.from_checks(
        command="ehresmann",
        source=source or demo or "<connection>",
        properties={
            "flat": omega.is_zero,
            "principal": all(component.is_zero for component in torques),
        },
        quantities=quantities,
        checks=checks,
    )
    logger.info("ehresmann %s: %s", result.source, result.verdict)
    return result


def format_report(report: ReportFile, output_format: OutputFormat) -> str:
    """Render a report; identical reports give byte-identical text."""
    if output_format == "structured":
        return json.dumps(report.model_dump(mode="json"), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    lines = [f"{report.command} {report.source}" + (f" ({report.name})" if report.name else "")]
    lines += [f"  {key}: {'yes' if value else 'no'}" for key, value in sorted(report.properties.items())]
    for name, rendered in report.quantities.items():
        body = ", ".join(f"{label}: {value}" for label, value in sorted(rendered.items())) or "0"
        lines.append(f"  {name} = {body}")
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        suffix = "" if check.asserted else " (reported)"
        lines.append(f"  [{status}] {check.name}{suffix}")
        lines += [f"      {label}: {value}" for label, value in sorted(check.residual.items())]
    lines.append(f"verdict: {report.verdict}")
    return "\n".join(lines) + "\n"


def split_file(path: str) -> ReportFile:
    """Load and split one scenario file; the unit of work for batch runs."""
    return run_split(load_scenario(path), source=path)


def split_files(paths: Sequence[str], *, jobs: int = 1) -> list[ReportFile]:
    """Split several scenario files, in parallel processes when `jobs > 1`; reports keep input order."""
    if jobs <= 1 or len(paths) <= 1:
        return [split_file(path) for path in paths]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(split_file, paths))
