"""Maxwell's equations `dF = 0`, `d hodge(F) = j` split along an observer.

For an observer `(T, tau)` the spatial exterior derivative is `d3 w = i_T(tau ^ dw)` and the
time derivative is `L_T`. A closed form split along a non-trivial observer picks up two extra
source terms: the torque contraction `(L_T tau) ^ i_T w` and the curvature contraction
`-i_T(tau ^ d tau) ^ i_T w`. Every residual below is exactly zero for a consistent scenario.
"""

import logging
from dataclasses import dataclass, field
from typing import NamedTuple, cast

from observerforms.calculus import d, lie_derivative
from observerforms.errors import DegreeMismatchError, InconsistentScenarioError, MissingPotentialError
from observerforms.forms import KForm, interior, wedge, zero_form
from observerforms.lorentz import hodge
from observerforms.observer import (
    EMFields,
    Observer,
    curvature_contract,
    curvature_form,
    is_holonomic,
    is_metric_compatible,
    reduced_hodge,
    split,
    split_em,
    torque_contract,
    torque_form,
)

logger = logging.getLogger(__name__)


def d3(obs: Observer, w: KForm) -> KForm:
    """Spatial exterior derivative `i_T(tau ^ dw)`."""
    return interior(obs.T, wedge(obs.tau, d(w)))


def dot(obs: Observer, w: KForm) -> KForm:
    """Time derivative `L_T w`."""
    return lie_derivative(obs.T, w)


class SplitResiduals(NamedTuple):
    spatial: KForm
    temporal: KForm


def split_equation(obs: Observer, w: KForm, sigma: KForm) -> SplitResiduals:
    """Residuals of the observer split of `dw = sigma`.

    With `w = tau ^ w_T + w_S` and `sigma` split the same way:

    - spatial: `d3 w_S - sigma_S - Curv ⌟ w`
    - temporal: `(-L_T w_S + d3 w_T) + (sigma_T - Torq ⌟ w)`

    Both vanish whenever `dw = sigma`.

    Raises:
        DegreeMismatchError: If `deg sigma != deg w + 1`.
    """
    if sigma.degree != w.degree + 1:
        msg = f"sigma must have degree {w.degree + 1}, got {sigma.degree}"
        raise DegreeMismatchError(msg)
    w_t, w_s = split(obs, w)
    sigma_t, sigma_s = split(obs, sigma)
    spatial = d3(obs, w_s) - sigma_s - curvature_contract(obs, w)
    temporal = (d3(obs, w_t) - dot(obs, w_s)) + (sigma_t - torque_contract(obs, w))
    return SplitResiduals(spatial, temporal)


@dataclass(frozen=True, eq=False)
class EMScenario:
    """An observer with a consistent electromagnetic configuration.

    Build instances with `build_scenario`, which validates `F = da` and `j = d hodge(F)`.
    """

    observer: Observer
    F: KForm
    """Field strength 2-form."""
    G: KForm
    """Excitation `hodge(F)`."""
    j: KForm
    """Current 3-form."""
    a: KForm | None = None
    """Potential 1-form, when known."""


def build_scenario(
    observer: Observer,
    *,
    a: KForm | None = None,
    F: KForm | None = None,  # noqa: N803
    j: KForm | None = None,
    compute_j: bool = True,
) -> EMScenario:
    """Validate inputs and complete the missing forms.

    Args:
        observer: The observer to split along.
        a: Potential 1-form.
        F: Field strength 2-form; derived as `da` when absent.
        j: Current 3-form; must equal `d hodge(F)` when given.
        compute_j: Derive an absent `j` as `d hodge(F)`. When false an absent current is the zero
            3-form, so the source equations test the field against the vacuum.

    Raises:
        InconsistentScenarioError: If neither `a` nor `F` is given, `F != da`, or `j != d hodge(F)`.
        DegreeMismatchError: If an input has the wrong degree.
    """
    chart = observer.chart
    for name, form, degree in (("a", a, 1), ("F", F, 2), ("j", j, 3)):
        if form is not None and form.degree != degree:
            msg = f"{name} must be a {degree}-form, got degree {form.degree}"
            raise DegreeMismatchError(msg)
    if a is not None:
        strength = d(a)
        if F is not None and F != strength:
            msg = f"F is not the exterior derivative of a: F - da = {(F - strength).render()}"
            raise InconsistentScenarioError(msg)
    elif F is not None:
        strength = F
    else:
        msg = "A scenario needs a potential a or a field strength F"
        raise InconsistentScenarioError(msg)
    g = hodge(strength)
    expected_j = d(g)
    if j is not None and j != expected_j:
        msg = f"j differs from d hodge(F) by {(j - expected_j).render()}"
        raise InconsistentScenarioError(msg)
    if j is None:
        j = expected_j if compute_j else zero_form(chart, 3)
    logger.debug("Scenario built: F = %s, j = %s", strength.render(), j.render())
    return EMScenario(observer, strength, g, j, a)


@dataclass(frozen=True, eq=False)
class SplitReport:
    """Split fields, source terms and residuals of one scenario."""

    fields: EMFields
    torque_term_F: KForm
    """`Torq ⌟ F`."""
    curv_term_F: KForm
    """`Curv ⌟ F`, the apparent magnetic charge."""
    torque_term_G: KForm
    """`Torq ⌟ G`."""
    curv_term_G: KForm
    """`Curv ⌟ G`."""
    residuals: dict[str, KForm]
    """Named residual forms, in report order."""
    holonomic: bool
    torque_free: bool
    metric_compatible: bool
    constitutive: dict[str, KForm] = field(default_factory=dict)
    """Constitutive residuals; asserted only for metric-compatible observers."""

    def failing(self, *, check_constitutive: bool | None = None) -> list[str]:
        """Names of the residuals that are not exactly zero.

        Args:
            check_constitutive: Include the constitutive residuals. `None` includes them exactly
                when the observer is metric compatible.
        """
        names = [name for name, value in self.residuals.items() if not value.is_zero]
        include = self.metric_compatible if check_constitutive is None else check_constitutive
        if include:
            names += [name for name, value in self.constitutive.items() if not value.is_zero]
        return names

    def is_valid(self, *, check_constitutive: bool | None = None) -> bool:
        return not self.failing(check_constitutive=check_constitutive)


def field_equation_residuals(s: EMScenario, fields: EMFields) -> dict[str, KForm]:
    """The four split equations as residual forms."""
    obs = s.observer
    e, b = cast("KForm", fields.E), cast("KForm", fields.B)
    h, dd = cast("KForm", fields.H), cast("KForm", fields.D)
    current, rho = cast("KForm", fields.J), cast("KForm", fields.rho)
    return {
        "induction": d3(obs, e) + dot(obs, b) + torque_contract(obs, s.F),
        "magnetic_gauss": d3(obs, b) - curvature_contract(obs, s.F),
        "ampere": d3(obs, h) - dot(obs, dd) - current - torque_contract(obs, s.G),
        "gauss": d3(obs, dd) - rho - curvature_contract(obs, s.G),
    }


def continuity_residual(s: EMScenario) -> KForm:
    """`L_T rho + d3 J + Torq ⌟ j`; zero whenever `dj = 0`."""
    obs = s.observer
    temporal, rho = split(obs, s.j)
    return dot(obs, rho) - d3(obs, temporal) + torque_contract(obs, s.j)


def potential_residuals(s: EMScenario) -> tuple[KForm, KForm]:
    """`E - (-L_T A + d3 phi - Torq ⌟ a)` and `B - (d3 A - Curv ⌟ a)`.

    Raises:
        MissingPotentialError: If the scenario has no potential.
    """
    if s.a is None:
        msg = "Potential residuals need the potential a"
        raise MissingPotentialError(msg)
    obs = s.observer
    temporal, b = split(obs, s.F)
    phi, a3 = split(obs, s.a)
    electric = -temporal - (d3(obs, phi) - dot(obs, a3) - torque_contract(obs, s.a))
    magnetic = b - (d3(obs, a3) - curvature_contract(obs, s.a))
    return electric, magnetic


def constitutive_residuals(s: EMScenario) -> tuple[KForm, KForm]:
    """`*3 E - D` and `*3 H - B`, with `*3 = i_T o hodge`."""
    obs = s.observer
    temporal, b = split(obs, s.F)
    h, dd = split(obs, s.G)
    return reduced_hodge(obs, -temporal) - dd, reduced_hodge(obs, h) - b


def maxwell_residuals(s: EMScenario) -> SplitReport:
    """Split every field of the scenario and evaluate all residuals."""
    obs = s.observer
    fields = split_em(obs, F=s.F, G=s.G, j=s.j, a=s.a)
    logger.debug("Computing split residuals for T = %s", obs.T.render())
    residuals = field_equation_residuals(s, fields)
    residuals["continuity"] = continuity_residual(s)
    if s.a is not None:
        residuals["potential_E"], residuals["potential_B"] = potential_residuals(s)
    constitutive_e, constitutive_h = constitutive_residuals(s)
    report = SplitReport(
        fields=fields,
        torque_term_F=torque_contract(obs, s.F),
        curv_term_F=curvature_contract(obs, s.F),
        torque_term_G=torque_contract(obs, s.G),
        curv_term_G=curvature_contract(obs, s.G),
        residuals=residuals,
        holonomic=is_holonomic(obs),
        torque_free=torque_form(obs).is_zero,
        metric_compatible=is_metric_compatible(obs),
        constitutive={"constitutive_E": constitutive_e, "constitutive_H": constitutive_h},
    )
    logger.debug("Residuals failing: %s", report.failing() or "none")
    return report


def standard_split_residuals(s: EMScenario) -> dict[str, KForm]:
    """The split equations without torque and curvature terms, the form they take when `d tau = 0`."""
    obs = s.observer
    temporal_f, b = split(obs, s.F)
    h, dd = split(obs, s.G)
    temporal_j, rho = split(obs, s.j)
    e, current = -temporal_f, -temporal_j
    return {
        "induction": d3(obs, e) + dot(obs, b),
        "magnetic_gauss": d3(obs, b),
        "ampere": d3(obs, h) - dot(obs, dd) - current,
        "gauss": d3(obs, dd) - rho,
    }


def source_terms_vanish(obs: Observer) -> bool:
    """Whether the torque and curvature forms of the observer are both zero."""
    return torque_form(obs).is_zero and curvature_form(obs).is_zero
