"""Exact exterior calculus on coordinate charts with rational-function coefficients."""

from observerforms.calculus import (
    VectorForm,
    d,
    fn_bracket_endo,
    fn_bracket_vf,
    homogeneous,
    lie_bracket,
    lie_derivative,
    lie_derivative_vf,
    nijenhuis_torsion,
    superbracket,
)
from observerforms.ehresmann import BundleChart, ConnectionField, connection_from_horizontal, curvature_omega, lift, torque_general
from observerforms.errors import ObserverFormsError
from observerforms.forms import Chart, KForm, VectorField, interior, wedge
from observerforms.lorentz import hodge, minkowski_chart
from observerforms.maxwell import EMScenario, SplitReport, build_scenario, d3, maxwell_residuals, split_equation
from observerforms.observer import Observer, curvature, kappa, make_observer, observer_from_T, split, torque
from observerforms.ratfunc import CoordinateRing, ScalarField

__all__ = [
    "BundleChart",
    "Chart",
    "ConnectionField",
    "CoordinateRing",
    "EMScenario",
    "KForm",
    "Observer",
    "ObserverFormsError",
    "ScalarField",
    "SplitReport",
    "VectorField",
    "VectorForm",
    "build_scenario",
    "connection_from_horizontal",
    "curvature",
    "curvature_omega",
    "d",
    "d3",
    "fn_bracket_endo",
    "fn_bracket_vf",
    "hodge",
    "homogeneous",
    "interior",
    "kappa",
    "lie_bracket",
    "lie_derivative",
    "lie_derivative_vf",
    "lift",
    "make_observer",
    "maxwell_residuals",
    "minkowski_chart",
    "nijenhuis_torsion",
    "observer_from_T",
    "split",
    "split_equation",
    "superbracket",
    "torque",
    "torque_general",
    "wedge",
]
