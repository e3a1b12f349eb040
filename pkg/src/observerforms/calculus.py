"""Exterior derivative, Lie derivatives and the Frölicher-Nijenhuis layer.

Vector-valued forms (`VectorForm`) carry one ordinary form per output direction. Graded
operators on forms are kept as small expression trees (`DerivationOp`) so that identities between
them can be checked extensionally with `derivation_is_zero`.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from observerforms.errors import ChartMismatchError, DegreeMismatchError
from observerforms.forms import (
    Chart,
    KForm,
    MultiIndex,
    VectorField,
    coordinate_differential,
    coordinate_vector,
    interior,
    scalar_form,
    wedge,
    zero_form,
)
from observerforms.ratfunc import Coefficient, ScalarField


def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


def d(w: KForm) -> KForm:
    """Exterior derivative; raises the degree by one."""
    names = w.chart.coordinates
    terms = [((i, *key), value.partial(name)) for key, value in w.components.items() for i, name in enumerate(names)]
    return KForm.from_terms(w.chart, w.degree + 1, [(key, value) for key, value in terms if not value.is_zero])


def lie_bracket(x: VectorField, y: VectorField) -> VectorField:
    """`[X, Y]^i = X(Y^i) - Y(X^i)`.

    Raises:
        ChartMismatchError: If the fields live on different charts.
    """
    if x.chart != y.chart:
        msg = f"Cannot bracket vector fields on {x.chart.coordinates} and {y.chart.coordinates}"
        raise ChartMismatchError(msg)
    return VectorField(x.chart, [x.apply(b) - y.apply(a) for a, b in zip(x.components, y.components, strict=True)])


def lie_derivative(x: VectorField, w: KForm) -> KForm:
    """Lie derivative of a form along a vector field, by Cartan's formula `i_X d + d i_X`."""
    return interior(x, d(w)) + d(interior(x, w))


class VectorForm:
    """A vector-valued k-form `sum_i A^i (x) d/dx^i`.

    Degree 0 is a vector field, degree 1 an endomorphism field of the tangent bundle.
    """

    __slots__ = ("_chart", "_degree", "_forms")

    def __init__(self, chart: Chart, degree: int, forms: Sequence[KForm]) -> None:
        """Build a vector-valued form from its output components.

        Raises:
            ChartMismatchError: If the number of components or their chart does not fit `chart`.
            DegreeMismatchError: If a component has a degree other than `degree`.
        """
        if len(forms) != chart.dimension:
            msg = f"A vector-valued form on a {chart.dimension}-chart needs {chart.dimension} components, got {len(forms)}"
            raise ChartMismatchError(msg)
        for form in forms:
            if form.chart != chart:
                msg = f"Component form lives on {form.chart.coordinates}, expected {chart.coordinates}"
                raise ChartMismatchError(msg)
            if form.degree != degree:
                msg = f"Component of degree {form.degree} in a vector-valued {degree}-form"
                raise DegreeMismatchError(msg)
        self._chart = chart
        self._degree = degree
        self._forms = tuple(forms)

    @classmethod
    def zero(cls, chart: Chart, degree: int) -> VectorForm:
        return cls(chart, degree, [zero_form(chart, degree)] * chart.dimension)

    @classmethod
    def from_vector_field(cls, x: VectorField) -> VectorForm:
        return cls(x.chart, 0, [scalar_form(value, x.chart) for value in x.components])

    @classmethod
    def from_matrix(cls, chart: Chart, matrix: Sequence[Sequence[ScalarField | Coefficient]]) -> VectorForm:
        """Endomorphism with `K(d/dx^j) = sum_i matrix[i][j] d/dx^i`."""
        return cls(chart, 1, [KForm(chart, 1, {(j,): value for j, value in enumerate(row)}) for row in matrix])

    @classmethod
    def from_columns(cls, chart: Chart, columns: Sequence[VectorField]) -> VectorForm:
        """Endomorphism sending `d/dx^j` to `columns[j]`."""
        return cls.from_matrix(chart, [[column[i] for column in columns] for i in range(chart.dimension)])

    @property
    def chart(self) -> Chart:
        return self._chart

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def forms(self) -> tuple[KForm, ...]:
        return self._forms

    @property
    def is_zero(self) -> bool:
        return all(form.is_zero for form in self._forms)

    def _check_compatible(self, other: VectorForm) -> None:
        if self._chart != other._chart:
            msg = f"Vector-valued forms on {self._chart.coordinates} and {other._chart.coordinates}"
            raise ChartMismatchError(msg)
        if self._degree != other._degree:
            msg = f"Cannot combine vector-valued forms of degree {self._degree} and {other._degree}"
            raise DegreeMismatchError(msg)

    def __add__(self, other: VectorForm) -> VectorForm:
        self._check_compatible(other)
        return VectorForm(self._chart, self._degree, [a + b for a, b in zip(self._forms, other._forms, strict=True)])

    def __neg__(self) -> VectorForm:
        return VectorForm(self._chart, self._degree, [-a for a in self._forms])

    def __sub__(self, other: VectorForm) -> VectorForm:
        return self + (-other)

    def scale(self, factor: ScalarField | Coefficient) -> VectorForm:
        return VectorForm(self._chart, self._degree, [a.scale(factor) for a in self._forms])

    def __mul__(self, factor: ScalarField | Coefficient) -> VectorForm:
        return self.scale(factor)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VectorForm):
            return NotImplemented
        self._check_compatible(other)
        return all(a == b for a, b in zip(self._forms, other._forms, strict=True))

    __hash__ = None  # type: ignore[assignment]

    def map_forms(self, fn: Callable[[KForm], KForm]) -> VectorForm:
        forms = [fn(form) for form in self._forms]
        return VectorForm(self._chart, forms[0].degree, forms)

    def entry(self, output: int, indices: MultiIndex) -> ScalarField:
        """Coefficient of `dx^indices (x) d/dx^output`."""
        return self._forms[output][indices]

    def evaluate(self, *vectors: VectorField) -> VectorField:
        """The vector field `A(X1, ..., Xk)`."""
        return VectorField(self._chart, [form.evaluate_on(*vectors) for form in self._forms])

    def apply(self, x: VectorField) -> VectorField:
        """Image of a vector field under an endomorphism field.

        Raises:
            DegreeMismatchError: If the form is not of degree 1.
        """
        if self._degree != 1:
            msg = f"Only vector-valued 1-forms act on vector fields, got degree {self._degree}"
            raise DegreeMismatchError(msg)
        return self.evaluate(x)

    def as_vector_field(self) -> VectorField:
        if self._degree != 0:
            msg = f"Only vector-valued 0-forms are vector fields, got degree {self._degree}"
            raise DegreeMismatchError(msg)
        return VectorField(self._chart, [form.scalar() for form in self._forms])

    def interior(self, x: VectorField) -> VectorForm:
        """Insert `X` into the form slots: `i_X A = sum_i (i_X A^i) (x) d/dx^i`."""
        return VectorForm(self._chart, self._degree - 1, [interior(x, form) for form in self._forms])

    def compose(self, other: VectorForm) -> VectorForm:
        """Endomorphism composition `(self o other)(X) = self(other(X))`."""
        if self._degree != 1 or other._degree != 1:
            msg = "Composition is defined for endomorphism fields only"
            raise DegreeMismatchError(msg)
        self._check_compatible(other)
        columns = [self.apply(other.apply(x)) for x in _basis_vectors(self._chart)]
        return VectorForm.from_columns(self._chart, columns)

    def render(self) -> str:
        names = self._chart.coordinates
        parts = [f"[{form.render()}]*d/d{name}" for name, form in zip(names, self._forms, strict=True) if not form.is_zero]
        return " + ".join(parts) or "0"

    def __repr__(self) -> str:
        return f"VectorForm(degree={self._degree}, {self.render()})"


def homogeneous(alpha: KForm, x: VectorField) -> VectorForm:
    """The decomposable vector-valued form `alpha (x) X`."""
    return VectorForm(alpha.chart, alpha.degree, [alpha.scale(component) for component in x.components])


def identity_endomorphism(chart: Chart) -> VectorForm:
    return VectorForm(chart, 1, [coordinate_differential(chart, name) for name in chart.coordinates])


def contract_vf(a: VectorForm, w: KForm) -> KForm:
    """Insertion of a vector-valued form: `i_A w = sum_i A^i ^ i_{d/dx^i} w`.

    For `A = alpha (x) X` this is `alpha ^ i_X w`. On 0-forms the result is zero.
    """
    if a.chart != w.chart:
        msg = f"Cannot contract across charts {a.chart.coordinates} and {w.chart.coordinates}"
        raise ChartMismatchError(msg)
    result = zero_form(w.chart, a.degree + w.degree - 1)
    for name, form in zip(w.chart.coordinates, a.forms, strict=True):
        if not form.is_zero:
            result += wedge(form, interior(coordinate_vector(w.chart, name), w))
    return result


class DerivationOp(ABC):
    """A graded linear operator on forms, held as an expression tree.

    Operators combine with `+`, `-`, and multiplication by rational numbers; `superbracket`
    builds graded commutators.
    """

    @property
    @abstractmethod
    def chart(self) -> Chart:
        """Chart of the forms the operator acts on."""

    @property
    @abstractmethod
    def degree(self) -> int:
        """Shift in form degree."""

    @abstractmethod
    def apply(self, w: KForm) -> KForm:
        """Apply the operator to a form."""

    def __call__(self, w: KForm) -> KForm:
        return self.apply(w)

    def __add__(self, other: DerivationOp) -> DerivationOp:
        return LinearCombination.of((Fraction(1), self), (Fraction(1), other))

    def __sub__(self, other: DerivationOp) -> DerivationOp:
        return LinearCombination.of((Fraction(1), self), (Fraction(-1), other))

    def __neg__(self) -> DerivationOp:
        return LinearCombination.of((Fraction(-1), self))

    def __rmul__(self, factor: Coefficient) -> DerivationOp:
        return LinearCombination.of((Fraction(factor), self))


@dataclass(frozen=True, repr=False)
class ExteriorDerivative(DerivationOp):
    """`d` as a degree-1 operator."""

    on: Chart

    @property
    def chart(self) -> Chart:
        return self.on

    @property
    def degree(self) -> int:
        return 1

    def apply(self, w: KForm) -> KForm:
        return d(w)

    def __repr__(self) -> str:
        return "d"


@dataclass(frozen=True, repr=False)
class Contraction(DerivationOp):
    """Insertion `i_A` of a vector-valued k-form; degree `k - 1`."""

    form: VectorForm

    @property
    def chart(self) -> Chart:
        return self.form.chart

    @property
    def degree(self) -> int:
        return self.form.degree - 1

    def apply(self, w: KForm) -> KForm:
        return contract_vf(self.form, w)

    def __repr__(self) -> str:
        return f"i[{self.form.render()}]"


@dataclass(frozen=True, repr=False)
class Superbracket(DerivationOp):
    """Graded commutator `[[a, b]] = a o b - (-1)^(deg a * deg b) b o a`."""

    left: DerivationOp
    right: DerivationOp

    @property
    def chart(self) -> Chart:
        return self.left.chart

    @property
    def degree(self) -> int:
        return self.left.degree + self.right.degree

    def apply(self, w: KForm) -> KForm:
        forward = self.left.apply(self.right.apply(w))
        backward = self.right.apply(self.left.apply(w))
        if _sign(self.left.degree * self.right.degree) == 1:
            return forward - backward
        return forward + backward

    def __repr__(self) -> str:
        return f"[[{self.left!r}, {self.right!r}]]"


@dataclass(frozen=True, repr=False)
class LinearCombination(DerivationOp):
    """Rational linear combination of operators of one degree."""

    terms: tuple[tuple[Fraction, DerivationOp], ...]
    on: Chart
    shift: int

    @classmethod
    def of(cls, *terms: tuple[Fraction, DerivationOp]) -> LinearCombination:
        """Combine operators, flattening nested combinations.

        Raises:
            DegreeMismatchError: If the operators have different degrees.
            ChartMismatchError: If they act on different charts.
        """
        flat: list[tuple[Fraction, DerivationOp]] = []
        for factor, op in terms:
            if isinstance(op, LinearCombination):
                flat.extend((factor * inner, inner_op) for inner, inner_op in op.terms)
            else:
                flat.append((factor, op))
        first = terms[0][1]
        for _, op in flat:
            if op.degree != first.degree:
                msg = f"Cannot add operators of degree {first.degree} and {op.degree}"
                raise DegreeMismatchError(msg)
            if op.chart != first.chart:
                msg = "Cannot add operators acting on different charts"
                raise ChartMismatchError(msg)
        return cls(tuple(flat), first.chart, first.degree)

    @property
    def chart(self) -> Chart:
        return self.on

    @property
    def degree(self) -> int:
        return self.shift

    def apply(self, w: KForm) -> KForm:
        result = zero_form(w.chart, w.degree + self.shift)
        for factor, op in self.terms:
            if factor:
                result += op.apply(w).scale(factor)
        return result

    def __repr__(self) -> str:
        return " + ".join(f"{factor}*{op!r}" for factor, op in self.terms) or "0"


def zero_op(chart: Chart, degree: int) -> DerivationOp:
    """The zero operator of the given degree."""
    return LinearCombination((), chart, degree)


def exterior_derivative_op(chart: Chart) -> DerivationOp:
    return ExteriorDerivative(chart)


def interior_op(a: VectorForm | VectorField) -> DerivationOp:
    """`i_A` for a vector-valued form, or `i_X` for a vector field."""
    if isinstance(a, VectorField):
        a = VectorForm.from_vector_field(a)
    return Contraction(a)


def superbracket(a: DerivationOp, b: DerivationOp) -> DerivationOp:
    return Superbracket(a, b)


def lie_derivative_vf(a: VectorForm | VectorField) -> DerivationOp:
    """`L_A = [[i_A, d]]`, of degree `k`; for a vector field it is the ordinary Lie derivative."""
    contraction = interior_op(a)
    return Superbracket(contraction, ExteriorDerivative(contraction.chart))


def derivation_is_zero(op: DerivationOp) -> bool:
    """Whether `op` annihilates every coordinate function and every coordinate differential.

    This decides vanishing for derivations, which are fixed by their action on these generators.
    """
    chart = op.chart
    for name in chart.coordinates:
        if not op.apply(scalar_form(chart.coordinate(name), chart)).is_zero:
            return False
        if not op.apply(coordinate_differential(chart, name)).is_zero:
            return False
    return True


def is_derivation_on(op: DerivationOp, a: KForm, b: KForm) -> bool:
    """Graded Leibniz rule `D(a ^ b) = Da ^ b + (-1)^(deg D * deg a) a ^ Db` on one pair."""
    lhs = op.apply(wedge(a, b))
    rhs = wedge(op.apply(a), b) + wedge(a, op.apply(b)).scale(_sign(op.degree * a.degree))
    return lhs == rhs


def _basis_vectors(chart: Chart) -> list[VectorField]:
    return [coordinate_vector(chart, name) for name in chart.coordinates]


def _check_endomorphism(*ks: VectorForm) -> Chart:
    chart = ks[0].chart
    for k in ks:
        if k.degree != 1:
            msg = f"Expected an endomorphism field (vector-valued 1-form), got degree {k.degree}"
            raise DegreeMismatchError(msg)
        if k.chart != chart:
            msg = f"Endomorphism fields on {chart.coordinates} and {k.chart.coordinates}"
            raise ChartMismatchError(msg)
    return chart


def fn_bracket_vf(t: VectorField, k: VectorForm) -> VectorForm:
    """Bracket of a vector field with an endomorphism field: the Lie derivative `L_T K`.

    Column by column, `(L_T K)(X) = [T, K X] - K [T, X]`.
    """
    chart = _check_endomorphism(k)
    if t.chart != chart:
        msg = f"Vector field on {t.chart.coordinates}, endomorphism on {chart.coordinates}"
        raise ChartMismatchError(msg)
    columns = [lie_bracket(t, k.apply(x)) - k.apply(lie_bracket(t, x)) for x in _basis_vectors(chart)]
    return VectorForm.from_columns(chart, columns)


def fn_bracket_endo_on(k: VectorForm, l: VectorForm, x: VectorField, y: VectorField) -> VectorField:  # noqa: E741
    """The eight-term expression of `[K, L](X, Y)` for two endomorphism fields."""
    _check_endomorphism(k, l)
    kx, ky, lx, ly = k.apply(x), k.apply(y), l.apply(x), l.apply(y)
    xy = lie_bracket(x, y)
    return (
        lie_bracket(kx, ly)
        - lie_bracket(ky, lx)
        - l.apply(lie_bracket(kx, y))
        + l.apply(lie_bracket(ky, x))
        - k.apply(lie_bracket(lx, y))
        + k.apply(lie_bracket(ly, x))
        + l.apply(k.apply(xy))
        + k.apply(l.apply(xy))
    )


def _biform_from_pairs(chart: Chart, value_on: Callable[[VectorField, VectorField], VectorField]) -> VectorForm:
    basis = _basis_vectors(chart)
    n = chart.dimension
    values = {(j, m): value_on(basis[j], basis[m]) for j in range(n) for m in range(j + 1, n)}
    forms = [KForm(chart, 2, {pair: vector[i] for pair, vector in values.items()}) for i in range(n)]
    return VectorForm(chart, 2, forms)


def fn_bracket_endo(k: VectorForm, l: VectorForm) -> VectorForm:  # noqa: E741
    """Frölicher-Nijenhuis bracket of two endomorphism fields, a vector-valued 2-form."""
    chart = _check_endomorphism(k, l)
    return _biform_from_pairs(chart, lambda x, y: fn_bracket_endo_on(k, l, x, y))


def nijenhuis_torsion(k: VectorForm) -> VectorForm:
    """`N_K(X, Y) = [KX, KY] - K[KX, Y] - K[X, KY] + K^2[X, Y]`, which is half of `[K, K]`."""
    chart = _check_endomorphism(k)

    def value_on(x: VectorField, y: VectorField) -> VectorField:
        kx, ky = k.apply(x), k.apply(y)
        return lie_bracket(kx, ky) - k.apply(lie_bracket(kx, y)) - k.apply(lie_bracket(x, ky)) + k.apply(k.apply(lie_bracket(x, y)))

    return _biform_from_pairs(chart, value_on)


def doubled_torsion_on(k: VectorForm, x: VectorField, y: VectorField) -> VectorField:
    """`2[KX, KY] - 2K[KX, Y] - 2K[X, KY] + 2KK[X, Y]`, the doubled torsion expression."""
    _check_endomorphism(k)
    kx, ky = k.apply(x), k.apply(y)
    value = lie_bracket(kx, ky) - k.apply(lie_bracket(kx, y)) - k.apply(lie_bracket(x, ky)) + k.apply(k.apply(lie_bracket(x, y)))
    return value * 2


TorsionVariant = Literal["lie", "exact"]


def homogeneous_torsion(a: VectorField, alpha: KForm, *, variant: TorsionVariant = "lie") -> VectorForm:
    """Closed forms of the torsion of `K = alpha (x) A`.

    Args:
        a: The vector field `A`.
        alpha: The 1-form `alpha`.
        variant: `"lie"` for `A (x) (alpha ^ L_A alpha - alpha(A) d alpha)`, `"exact"` for
            `A (x) (alpha ^ d(alpha(A)) - i_A(alpha ^ d alpha))`.

    Returns:
        The vector-valued 2-form, equal to `nijenhuis_torsion(homogeneous(alpha, a))`.
    """
    if alpha.degree != 1:
        msg = f"Expected a 1-form, got degree {alpha.degree}"
        raise DegreeMismatchError(msg)
    alpha_a = interior(a, alpha)
    if variant == "lie":
        form = wedge(alpha, lie_derivative(a, alpha)) - d(alpha).scale(alpha_a.scalar())
    elif variant == "exact":
        form = wedge(alpha, d(alpha_a)) - interior(a, wedge(alpha, d(alpha)))
    else:
        msg = f"Unknown torsion variant {variant!r}"
        raise ValueError(msg)
    return homogeneous(form, a)
