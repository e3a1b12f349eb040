"""Schemas of scenario, connection and report files.

Scenario and connection files are YAML (plain JSON is valid YAML). Every expression is a string
in the grammar of `observerforms.cli.expressions`. Form components are listed in lexicographic
order of their increasing index tuples, coordinates numbered from 0 in chart order; on the chart
`(t, x, y, z)` a 2-form is given as the six components `01, 02, 03, 12, 13, 23` and a 3-form as
the four components `012, 013, 023, 123`.
"""

from math import comb
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from observerforms.errors import ScenarioInputError
from observerforms.lorentz import MINKOWSKI_COORDINATES, MINKOWSKI_SIGNATURE


def _split_list(value: Any) -> Any:  # noqa: ANN401
    """Accept `"1, 0, 0, 0"` as well as `[1, 0, 0, 0]`; numbers become expression strings."""
    if isinstance(value, str):
        value = [part.strip() for part in value.split(",")]
    if isinstance(value, list):
        return [str(item) if isinstance(item, int | float) and not isinstance(item, bool) else item for item in value]
    return value


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ObserverSpec(_Strict):
    """Observer given by `T`, optionally with an explicit time form `tau`."""

    T: list[str] = Field(description="Components of T, one expression per chart coordinate.")
    tau: list[str] | None = Field(
        default=None,
        description="Components of tau. When omitted, tau = g(T, .) / g(T, T).",
    )

    @field_validator("T", "tau", mode="before")
    @classmethod
    def split_lists(cls, value: Any) -> Any:  # noqa: ANN401
        return _split_list(value)


class FormSpec(_Strict):
    """A differential form by degree and its components in lexicographic multi-index order."""

    degree: int = Field(ge=0, le=8, description="Form degree.")
    components: list[str] = Field(description="One expression per increasing multi-index.")

    @field_validator("components", mode="before")
    @classmethod
    def split_lists(cls, value: Any) -> Any:  # noqa: ANN401
        return _split_list(value)


class EMSpec(_Strict):
    """Electromagnetic input: the potential `a` and/or the field strength `F`."""

    a: list[str] | None = Field(default=None, description="Potential 1-form components.")
    F: list[str] | None = Field(default=None, description="Field strength 2-form components in pair order 01, 02, 03, 12, 13, 23.")

    @field_validator("a", "F", mode="before")
    @classmethod
    def split_lists(cls, value: Any) -> Any:  # noqa: ANN401
        return _split_list(value)

    @model_validator(mode="after")
    def needs_one(self) -> "EMSpec":
        if self.a is None and self.F is None:
            msg = "em needs a potential a or a field strength F"
            raise ScenarioInputError(msg, path="em")
        return self


class SplitEquationSpec(_Strict):
    """A pair `(w, sigma)` whose split of `dw = sigma` is checked."""

    w: FormSpec
    sigma: FormSpec


class ScenarioOptions(_Strict):
    compute_j: bool = Field(default=True, description="Derive an absent current as d hodge(F); otherwise it is zero.")
    check_constitutive: bool | None = Field(
        default=None,
        description="Assert the constitutive residuals. Unset asserts them exactly for metric-compatible observers.",
    )


class ScenarioFile(_Strict):
    """A scenario for `split` and `check`."""

    name: str | None = Field(default=None, description="Free-form label copied to the report.")
    chart: list[str] = Field(default=list(MINKOWSKI_COORDINATES), description="Coordinate names.")
    signature: list[int] | None = Field(default=None, description="Diagonal metric; defaults to (+, -, -, -) on a 4-chart.")
    observer: ObserverSpec
    em: EMSpec | None = None
    j: list[str] | None = Field(default=None, description="Current 3-form components in triple order 012, 013, 023, 123.")
    options: ScenarioOptions = Field(default_factory=ScenarioOptions)
    split_equation: SplitEquationSpec | None = Field(default=None, description="Explicit (w, sigma) for the lemma42 suite.")

    @field_validator("chart", "j", mode="before")
    @classmethod
    def split_lists(cls, value: Any) -> Any:  # noqa: ANN401
        return _split_list(value)

    @model_validator(mode="after")
    def check_shapes(self) -> "ScenarioFile":
        n = len(self.chart)
        signature = self.metric_signature
        if signature is not None and len(signature) != n:
            msg = f"signature has {len(signature)} entries for {n} coordinates"
            raise ScenarioInputError(msg, path="signature")
        expected = {
            "observer.T": (self.observer.T, n),
            "observer.tau": (self.observer.tau, n),
            "em.a": (self.em.a if self.em else None, n),
            "em.F": (self.em.F if self.em else None, comb(n, 2)),
            "j": (self.j, comb(n, 3)),
        }
        if self.split_equation is not None:
            for key, spec in (("split_equation.w", self.split_equation.w), ("split_equation.sigma", self.split_equation.sigma)):
                expected[f"{key}.components"] = (spec.components, comb(n, spec.degree))
            if self.split_equation.sigma.degree != self.split_equation.w.degree + 1:
                msg = "sigma must have degree w.degree + 1"
                raise ScenarioInputError(msg, path="split_equation.sigma.degree")
        for path, (values, count) in expected.items():
            if values is not None and len(values) != count:
                msg = f"expected {count} components, got {len(values)}"
                raise ScenarioInputError(msg, path=path)
        return self

    @property
    def metric_signature(self) -> tuple[int, ...] | None:
        if self.signature is not None:
            return tuple(self.signature)
        if len(self.chart) == len(MINKOWSKI_SIGNATURE):
            return MINKOWSKI_SIGNATURE
        return None


class ConnectionSpec(_Strict):
    """A connection on a trivialized bundle chart, given by its horizontal matrix."""

    base: list[str] = Field(description="Base coordinate names x^1..x^n.")
    fiber: list[str] = Field(description="Fiber coordinate names u^1..u^N.")
    horizontal: list[list[str]] = Field(description="N x n matrix A; the lift of d/dx^i is d/dx^i + A^p_i d/du^p.")
    section: list[str] | None = Field(default=None, description="Optional section components in the base coordinates.")

    @field_validator("base", "fiber", "section", mode="before")
    @classmethod
    def split_lists(cls, value: Any) -> Any:  # noqa: ANN401
        return _split_list(value)

    @field_validator("horizontal", mode="before")
    @classmethod
    def split_rows(cls, value: Any) -> Any:  # noqa: ANN401
        return [_split_list(row) for row in value] if isinstance(value, list) else value

    @model_validator(mode="after")
    def check_shapes(self) -> "ConnectionSpec":
        if len(self.horizontal) != len(self.fiber):
            msg = f"expected {len(self.fiber)} rows, got {len(self.horizontal)}"
            raise ScenarioInputError(msg, path="horizontal")
        for p, row in enumerate(self.horizontal):
            if len(row) != len(self.base):
                msg = f"expected {len(self.base)} entries, got {len(row)}"
                raise ScenarioInputError(msg, path=f"horizontal[{p}]")
        if self.section is not None and len(self.section) != len(self.fiber):
            msg = f"expected {len(self.fiber)} components, got {len(self.section)}"
            raise ScenarioInputError(msg, path="section")
        return self


RenderedForm = dict[str, str]
"""Basis label (e.g. `dt^dx`, or `dx1^dx2 (x) d/du` for vector-valued forms) to canonical expression."""


class CheckResult(_Strict):
    """Outcome of one exact identity or residual."""

    name: str = Field(description="Identity or residual name.")
    passed: bool = Field(description="Whether the residual is exactly zero (or the predicate holds).")
    asserted: bool = Field(default=True, description="Whether the check counts towards the verdict.")
    residual: RenderedForm = Field(default_factory=dict, description="Offending residual when the check fails.")


class ReportFile(_Strict):
    """Report produced by `split`, `check` and `ehresmann`."""

    command: Literal["split", "check", "ehresmann"]
    source: str = Field(description="Scenario file, connection file or demo name.")
    name: str | None = Field(default=None, description="Scenario label.")
    verdict: Literal["PASS", "FAIL"] = Field(description="PASS iff every asserted check passed.")
    properties: dict[str, bool] = Field(default_factory=dict, description="Flags such as holonomic or metric_compatible.")
    quantities: dict[str, RenderedForm] = Field(default_factory=dict, description="Named forms rendered component by component.")
    checks: list[CheckResult] = Field(default_factory=list)

    @classmethod
    def from_checks(cls, *, checks: list[CheckResult], **kwargs: Any) -> "ReportFile":  # noqa: ANN401
        verdict = "PASS" if all(check.passed for check in checks if check.asserted) else "FAIL"
        return cls(checks=checks, verdict=verdict, **kwargs)
