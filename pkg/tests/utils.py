from itertools import combinations

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from observerforms.calculus import VectorForm
from observerforms.cli.expressions import parse_expression
from observerforms.ehresmann import BundleChart, ConnectionField, connection_from_horizontal
from observerforms.forms import Chart, KForm, VectorField
from observerforms.lorentz import minkowski_chart
from observerforms.observer import Observer, make_observer
from observerforms.ratfunc import ScalarField

CHART = minkowski_chart()

SLOW = settings(deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])


def field(src: str, chart: Chart = CHART) -> ScalarField:
    return parse_expression(src, chart)


def one_form(*components: str, chart: Chart = CHART) -> KForm:
    return KForm(chart, 1, {(i,): field(src, chart) for i, src in enumerate(components)})


def form(degree: int, components: dict[str, str], chart: Chart = CHART) -> KForm:
    """Form from labels such as `{"tx": "y"}` meaning `y dt^dx`."""
    names = chart.coordinates
    terms = [(tuple(names.index(name) for name in label) if label != "1" else (), field(src, chart)) for label, src in components.items()]
    return KForm.from_terms(chart, degree, terms)


def vector(*components: str, chart: Chart = CHART) -> VectorField:
    return VectorField(chart, [field(src, chart) for src in components])


def observer(t: tuple[str, ...], tau: tuple[str, ...], chart: Chart = CHART) -> Observer:
    return make_observer(vector(*t, chart=chart), one_form(*tau, chart=chart))


TRIVIAL = ("1", "0", "0", "0"), ("1", "0", "0", "0")
BOOSTED = ("5/3", "4/3", "0", "0"), ("5/3", "-4/3", "0", "0")
TORQUED = ("1", "0", "0", "0"), ("1", "t", "0", "0")
ANHOLONOMIC = ("1", "0", "0", "0"), ("1", "0", "x", "0")
CANONICAL_OBSERVERS = {"trivial": TRIVIAL, "boosted": BOOSTED, "torqued": TORQUED, "anholonomic": ANHOLONOMIC}


###########################
# Strategies
###########################


@st.composite
def polynomials(draw, chart: Chart = CHART, max_degree: int = 2, max_terms: int = 4) -> ScalarField:
    """Sparse polynomials with small integer coefficients."""
    n = chart.dimension
    total = chart.zero()
    for _ in range(draw(st.integers(min_value=0, max_value=max_terms))):
        coefficient = draw(st.integers(min_value=-3, max_value=3))
        term = chart.scalar(coefficient)
        for _ in range(draw(st.integers(min_value=0, max_value=max_degree))):
            term *= chart.coordinate(chart.coordinates[draw(st.integers(min_value=0, max_value=n - 1))])
        total += term
    return total


@st.composite
def rational_fields(draw, chart: Chart = CHART) -> ScalarField:
    numerator = draw(polynomials(chart))
    denominator = draw(polynomials(chart, max_degree=1, max_terms=2))
    if denominator.is_zero:
        return numerator
    return numerator / denominator


@st.composite
def forms(draw, degree: int | None = None, chart: Chart = CHART, max_degree: int = 2) -> KForm:
    if degree is None:
        degree = draw(st.integers(min_value=0, max_value=chart.dimension))
    keys = list(combinations(range(chart.dimension), degree))
    chosen = draw(st.lists(st.sampled_from(keys), max_size=3, unique=True)) if keys else []
    return KForm(chart, degree, {key: draw(polynomials(chart, max_degree=max_degree, max_terms=2)) for key in chosen})


@st.composite
def vector_fields(draw, chart: Chart = CHART) -> VectorField:
    return VectorField(chart, [draw(polynomials(chart, max_degree=1, max_terms=2)) for _ in range(chart.dimension)])


@st.composite
def endomorphisms(draw, chart: Chart = CHART) -> VectorForm:
    """Sparse endomorphism fields with linear entries."""
    n = chart.dimension
    matrix = [[chart.zero() for _ in range(n)] for _ in range(n)]
    for _ in range(draw(st.integers(min_value=1, max_value=3))):
        i, j = draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))
        matrix[i][j] = draw(polynomials(chart, max_degree=1, max_terms=2))
    return VectorForm.from_matrix(chart, matrix)


@st.composite
def observers(draw, chart: Chart = CHART) -> Observer:
    """`tau = dt + sum b_i dx^i` and `T = (1 - sum b_i v^i) d/dt + sum v^i d/dx^i`, so that `tau(T) = 1`."""
    n = chart.dimension
    b = [draw(polynomials(chart, max_degree=1, max_terms=2)) for _ in range(n - 1)]
    v = [draw(polynomials(chart, max_degree=1, max_terms=2)) for _ in range(n - 1)]
    lead = chart.one()
    for bi, vi in zip(b, v, strict=True):
        lead -= bi * vi
    tau = KForm(chart, 1, {(0,): 1, **{(i + 1,): bi for i, bi in enumerate(b)}})
    return make_observer(VectorField(chart, [lead, *v]), tau)


BUNDLE_SHAPES = [(("x1", "x2"), ("u",)), (("x1", "x2"), ("u1", "u2")), (("x1", "x2", "x3"), ("u",))]


@st.composite
def connections(draw) -> ConnectionField:
    """Connections with a linear horizontal matrix that may depend on the fiber coordinates."""
    base, fiber = draw(st.sampled_from(BUNDLE_SHAPES))
    bundle = BundleChart(base, fiber)
    horizontal = [[draw(polynomials(bundle.total, max_degree=1, max_terms=2)) for _ in base] for _ in fiber]
    return connection_from_horizontal(bundle, horizontal)
