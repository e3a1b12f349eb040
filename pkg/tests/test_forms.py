import pytest
from hypothesis import given, settings

from observerforms.errors import ChartMismatchError, DegreeMismatchError
from observerforms.forms import (
    Chart,
    KForm,
    VectorField,
    add_scale,
    basis_forms,
    coordinate_differential,
    coordinate_vector,
    exterior,
    interior,
    scalar_form,
    sort_with_sign,
    wedge,
    zero_form,
)
from tests.utils import CHART, SLOW, field, form, forms, one_form, vector, vector_fields

dt, dx, dy, dz = (coordinate_differential(CHART, name) for name in CHART.coordinates)
d_t, d_x, d_y, d_z = (coordinate_vector(CHART, name) for name in CHART.coordinates)


class TestConstruction:
    def test_rejects_unsorted_keys(self):
        with pytest.raises(DegreeMismatchError):
            KForm(CHART, 2, {(1, 0): 1})

    def test_rejects_wrong_length(self):
        with pytest.raises(DegreeMismatchError):
            KForm(CHART, 2, {(0,): 1})

    def test_rejects_out_of_range(self):
        with pytest.raises(DegreeMismatchError):
            KForm(CHART, 1, {(4,): 1})

    def test_drops_zero_components(self):
        assert KForm(CHART, 1, {(0,): 0, (1,): field("x - x")}).is_zero

    def test_from_terms_antisymmetrizes(self):
        w = KForm.from_terms(CHART, 2, [((1, 0), 1), ((2, 2), 5)])
        assert w == -wedge(dt, dx)
        assert w[(1, 0)] == 1
        assert w[(0, 1)] == -1

    def test_sort_with_sign(self):
        assert sort_with_sign((2, 0, 1)) == (1, (0, 1, 2))
        assert sort_with_sign((1, 0)) == (-1, (0, 1))
        assert sort_with_sign((1, 1)) == (0, ())

    def test_basis_forms(self):
        assert [len(basis_forms(CHART, k)) for k in range(5)] == [1, 4, 6, 4, 1]
        assert basis_forms(CHART, 2)[0] == wedge(dt, dx)

    def test_chart_signature_length(self):
        with pytest.raises(ValueError, match="Metric signature"):
            Chart(("t", "x"), metric_signature=(1,))

    def test_vector_field_component_count(self):
        with pytest.raises(ChartMismatchError):
            VectorField(CHART, [1, 0])


class TestAlgebra:
    def test_wedge_of_differentials(self):
        assert wedge(dx, dt) == -wedge(dt, dx)
        assert wedge(dx, dx).is_zero

    def test_wedge_above_top_degree(self):
        top = wedge(wedge(dt, dx), wedge(dy, dz))
        assert top.degree == 4
        assert wedge(dt, top).is_zero
        assert wedge(dt, top).degree == 5

    def test_chart_mismatch(self):
        other = Chart(("t", "x"))
        with pytest.raises(ChartMismatchError):
            wedge(dt, coordinate_differential(other, "t"))

    def test_degree_mismatch_on_add(self):
        with pytest.raises(DegreeMismatchError):
            dt + wedge(dt, dx)

    def test_add_scale(self):
        assert add_scale(dt, dx, field("x")) == one_form("1", "x", "0", "0")

    def test_scalar_forms(self):
        assert wedge(scalar_form(field("x"), CHART), dy) == dy.scale(field("x"))
        assert zero_form(CHART, 3).is_zero

    @SLOW
    @given(forms(), forms())
    def test_graded_commutativity(self, a, b):
        sign = -1 if a.degree * b.degree % 2 else 1
        assert wedge(a, b) == wedge(b, a).scale(sign)

    @settings(SLOW, max_examples=30)
    @given(forms(degree=1), forms(degree=1), forms(degree=2))
    def test_associativity(self, a, b, c):
        assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))


class TestInterior:
    def test_on_basis(self):
        assert interior(d_x, wedge(dt, dx)) == -dt
        assert interior(d_t, wedge(dt, dx)) == dx

    def test_on_zero_forms(self):
        result = interior(d_t, scalar_form(1, CHART))
        assert result.is_zero
        assert result.degree == -1

    def test_evaluate_on(self):
        w = form(2, {"tx": "y"})
        assert w.evaluate_on(d_t, d_x) == field("y")
        assert w.evaluate_on(d_x, d_t) == field("-y")
        with pytest.raises(DegreeMismatchError):
            w.evaluate_on(d_t)

    @SLOW
    @given(vector_fields(), forms())
    def test_nilpotent(self, x, w):
        assert interior(x, interior(x, w)).is_zero

    @SLOW
    @given(vector_fields(), forms(), forms())
    def test_antiderivation(self, x, a, b):
        sign = -1 if a.degree % 2 else 1
        assert interior(x, wedge(a, b)) == wedge(interior(x, a), b) + wedge(a, interior(x, b)).scale(sign)

    @settings(SLOW, max_examples=100)
    @given(vector_fields(), forms(degree=1), forms())
    def test_anticommutator_with_exterior(self, x, alpha, w):
        # i_X e_alpha + e_alpha i_X = alpha(X)
        lhs = interior(x, exterior(alpha, w)) + exterior(alpha, interior(x, w))
        assert lhs == w.scale(alpha.evaluate_on(x))


class TestVectorField:
    def test_directional_derivative(self):
        assert vector("x", "0", "1", "0").apply(field("t^2 + x*y")) == field("2*t*x + x")

    def test_arithmetic(self):
        assert d_t + d_x.scale(field("t")) == vector("1", "t", "0", "0")
        assert (d_t - d_t).is_zero

    def test_render(self):
        assert vector("1", "x", "0", "0").render() == "(1)*d/dt + (x)*d/dx"
        assert form(2, {"tx": "y"}).render() == "(y)*dt^dx"
