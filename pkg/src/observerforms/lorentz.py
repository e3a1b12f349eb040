"""Constant diagonal metrics: musical isomorphisms, the induced scalar product on forms, Hodge star.

The Minkowski chart `(t, x, y, z)` with signature `(+, -, -, -)` and orientation
`dt ^ dx ^ dy ^ dz` is the case everything else in the package uses, but the formulas only need
a diagonal `metric_signature` on the chart.
"""

from math import prod

from observerforms.errors import ChartMismatchError, DegreeMismatchError, MetricError
from observerforms.forms import Chart, KForm, MultiIndex, VectorField, sort_with_sign, zero_form
from observerforms.ratfunc import ScalarField

MINKOWSKI_COORDINATES = ("t", "x", "y", "z")
MINKOWSKI_SIGNATURE = (1, -1, -1, -1)


def minkowski_chart(*, cancel_common_factors: bool = True) -> Chart:
    """The flat chart `(t, x, y, z)` with signature `(+, -, -, -)`."""
    return Chart(MINKOWSKI_COORDINATES, metric_signature=MINKOWSKI_SIGNATURE, cancel_common_factors=cancel_common_factors)


def signature(chart: Chart) -> tuple[int, ...]:
    """Diagonal of the chart metric.

    Raises:
        MetricError: If the chart carries no metric signature.
    """
    if chart.metric_signature is None:
        msg = f"Chart {chart.coordinates} has no metric signature"
        raise MetricError(msg)
    return chart.metric_signature


def _metric_factor(eta: tuple[int, ...], indices: MultiIndex) -> int:
    return prod((eta[i] for i in indices), start=1)


def flat(x: VectorField) -> KForm:
    """Lower the index: `g(X, .)`."""
    eta = signature(x.chart)
    return KForm(x.chart, 1, {(i,): value * eta[i] for i, value in enumerate(x.components)})


def sharp(alpha: KForm) -> VectorField:
    """Raise the index of a 1-form; inverse of `flat`.

    Raises:
        DegreeMismatchError: If `alpha` is not a 1-form.
    """
    if alpha.degree != 1:
        msg = f"sharp needs a 1-form, got degree {alpha.degree}"
        raise DegreeMismatchError(msg)
    eta = signature(alpha.chart)
    return VectorField(alpha.chart, [alpha[(i,)] * eta[i] for i in range(alpha.chart.dimension)])


def metric_norm(x: VectorField) -> ScalarField:
    """`g(X, X)`."""
    eta = signature(x.chart)
    total = x.chart.zero()
    for sign, value in zip(eta, x.components, strict=True):
        if not value.is_zero:
            total += value * value * sign
    return total


def inner(a: KForm, b: KForm) -> ScalarField:
    """Scalar product of two forms of equal degree.

    The Gram-determinant extension of the inverse metric; on a diagonal metric the coordinate
    basis is orthogonal and `(dx^I, dx^I)` is the product of the metric entries over `I`.

    Raises:
        DegreeMismatchError: If the degrees differ.
        ChartMismatchError: If the charts differ.
    """
    if a.chart != b.chart:
        msg = f"Scalar product across charts {a.chart.coordinates} and {b.chart.coordinates}"
        raise ChartMismatchError(msg)
    if a.degree != b.degree:
        msg = f"Scalar product needs equal degrees, got {a.degree} and {b.degree}"
        raise DegreeMismatchError(msg)
    eta = signature(a.chart)
    total = a.chart.zero()
    other = b.components
    for key, value in a.components.items():
        if key in other:
            total += value * other[key] * _metric_factor(eta, key)
    return total


def volume_form(chart: Chart) -> KForm:
    """The orientation form `dx^0 ^ ... ^ dx^(n-1)`."""
    return KForm(chart, chart.dimension, {tuple(range(chart.dimension)): 1})


def hodge(w: KForm) -> KForm:
    """Hodge star, fixed by `alpha ^ hodge(beta) = inner(alpha, beta) * volume_form` for all alpha.

    On the basis, `hodge(dx^I) = (prod of metric entries over I) * sign(I, I^c) * dx^(I^c)`.
    Forms of degree outside `0..n` map to the zero form of degree `n - k`.
    """
    chart = w.chart
    n = chart.dimension
    eta = signature(chart)
    result_degree = n - w.degree
    if not 0 <= w.degree <= n:
        return zero_form(chart, result_degree)
    components: dict[MultiIndex, ScalarField] = {}
    for key, value in w.components.items():
        complement = tuple(i for i in range(n) if i not in key)
        parity, _ = sort_with_sign(key + complement)
        components[complement] = value * (parity * _metric_factor(eta, key))
    return KForm(chart, result_degree, components)


def double_star_sign(degree: int, dimension: int = 4) -> int:
    """Sign `s` with `hodge(hodge(w)) = s * w` on `degree`-forms of a Lorentzian chart."""
    return -((-1) ** (degree * (dimension - degree)))
