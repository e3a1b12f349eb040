"""Differential forms and vector fields on a single global chart.

A `KForm` stores only the components on strictly increasing multi-indices; every reordering sign
is computed from permutation parity when an operation needs it. Both value types are immutable.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from sympy.combinatorics import Permutation

from observerforms.errors import ChartMismatchError, DegreeMismatchError
from observerforms.ratfunc import Coefficient, CoordinateRing, ScalarField

MultiIndex = tuple[int, ...]


@dataclass(frozen=True)
class Chart:
    """A global coordinate chart of dimension 1 to 8.

    Example:
        ```python
        chart = Chart(("t", "x", "y", "z"), metric_signature=(1, -1, -1, -1))
        dt = coordinate_differential(chart, "t")
        ```
    """

    coordinates: tuple[str, ...]
    """Ordered coordinate names; index `i` in a multi-index refers to `coordinates[i]`."""

    metric_signature: tuple[int, ...] | None = None
    """Diagonal of a constant metric, one `+1` or `-1` per coordinate. Only `lorentz` reads it."""

    cancel_common_factors: bool = True
    """Passed through to the coordinate ring of the chart's scalar fields."""

    ring: CoordinateRing = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        """Validate the signature and build the coordinate ring."""
        coordinates = tuple(self.coordinates)
        object.__setattr__(self, "coordinates", coordinates)
        object.__setattr__(self, "ring", CoordinateRing(coordinates, cancel_common_factors=self.cancel_common_factors))
        if self.metric_signature is not None:
            signature = tuple(self.metric_signature)
            if len(signature) != len(coordinates) or any(s not in {1, -1} for s in signature):
                msg = f"Metric signature must have one entry of +1 or -1 per coordinate, got {signature}"
                raise ValueError(msg)
            object.__setattr__(self, "metric_signature", signature)

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    def index(self, name: str) -> int:
        return self.ring.index(name)

    def scalar(self, value: ScalarField | Coefficient) -> ScalarField:
        """Coerce a number or field to a scalar field on this chart.

        Raises:
            ChartMismatchError: If `value` is a field on another coordinate ring.
        """
        if isinstance(value, ScalarField):
            if value.ring.names != self.coordinates:
                msg = f"Scalar field on {value.ring.names} used on chart {self.coordinates}"
                raise ChartMismatchError(msg)
            return value
        return self.ring.constant(value)

    def coordinate(self, name: str) -> ScalarField:
        return self.ring.coordinate(name)

    def zero(self) -> ScalarField:
        return self.ring.zero()

    def one(self) -> ScalarField:
        return self.ring.one()


def _check_chart(a: Chart, b: Chart) -> None:
    if a != b:
        msg = f"Operands live on different charts: {a.coordinates} and {b.coordinates}"
        raise ChartMismatchError(msg)


@lru_cache(maxsize=4096)
def sort_with_sign(indices: MultiIndex) -> tuple[int, MultiIndex]:
    """Sort a multi-index, returning the permutation sign and the increasing tuple.

    A repeated index gives sign `0`, since the corresponding wedge product vanishes.
    """
    if len(set(indices)) != len(indices):
        return 0, ()
    ordered = tuple(sorted(indices))
    if len(indices) < 2:  # noqa: PLR2004
        return 1, ordered
    order = sorted(range(len(indices)), key=indices.__getitem__)
    return Permutation(order).signature(), ordered


class KForm:
    """A differential form of fixed degree with scalar-field coefficients.

    The degree may be any integer, but components exist only for `0 <= degree <= dimension`;
    outside that range the form is necessarily zero. This keeps operations such as
    `interior` on a 0-form or `wedge` past the top degree total.
    """

    __slots__ = ("_chart", "_components", "_degree")

    def __init__(self, chart: Chart, degree: int, components: Mapping[MultiIndex, ScalarField | Coefficient] | None = None) -> None:
        """Build a form from components on strictly increasing multi-indices.

        Args:
            chart: Chart the form lives on.
            degree: Form degree.
            components: Coefficient per increasing multi-index of length `degree`. Zero
                coefficients are dropped.

        Raises:
            DegreeMismatchError: If a key has the wrong length, is not strictly increasing or is out of range.
        """
        self._chart = chart
        self._degree = degree
        stored: dict[MultiIndex, ScalarField] = {}
        for key, value in (components or {}).items():
            indices = tuple(key)
            if len(indices) != degree:
                msg = f"Multi-index {indices} does not match form degree {degree}"
                raise DegreeMismatchError(msg)
            if any(b <= a for a, b in zip(indices, indices[1:], strict=False)) or any(not 0 <= i < chart.dimension for i in indices):
                msg = f"Multi-index {indices} must be strictly increasing within 0..{chart.dimension - 1}"
                raise DegreeMismatchError(msg)
            coefficient = chart.scalar(value)
            if not coefficient.is_zero:
                stored[indices] = coefficient
        self._components = dict(sorted(stored.items()))

    @classmethod
    def from_terms(cls, chart: Chart, degree: int, terms: Iterable[tuple[Sequence[int], ScalarField | Coefficient]]) -> KForm:
        """Build a form from terms on arbitrary multi-indices, antisymmetrizing as needed."""
        acc: dict[MultiIndex, ScalarField] = {}
        for indices, value in terms:
            sign, key = sort_with_sign(tuple(indices))
            if sign == 0:
                continue
            term = chart.scalar(value) * sign
            acc[key] = acc[key] + term if key in acc else term
        return cls(chart, degree, acc)

    @property
    def chart(self) -> Chart:
        return self._chart

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def components(self) -> dict[MultiIndex, ScalarField]:
        """Copy of the stored components, sorted by multi-index."""
        return dict(self._components)

    @property
    def is_zero(self) -> bool:
        return not self._components

    def __getitem__(self, indices: Sequence[int]) -> ScalarField:
        sign, key = sort_with_sign(tuple(indices))
        if sign == 0 or key not in self._components:
            return self._chart.zero()
        return self._components[key] * sign

    def scalar(self) -> ScalarField:
        """The function carried by a 0-form.

        Raises:
            DegreeMismatchError: If the form is not of degree 0.
        """
        if self._degree != 0:
            msg = f"Expected a 0-form, got degree {self._degree}"
            raise DegreeMismatchError(msg)
        return self[()]

    def _check_compatible(self, other: KForm) -> None:
        _check_chart(self._chart, other._chart)
        if self._degree != other._degree:
            msg = f"Cannot combine forms of degree {self._degree} and {other._degree}"
            raise DegreeMismatchError(msg)

    def __add__(self, other: KForm) -> KForm:
        self._check_compatible(other)
        acc = dict(self._components)
        for key, value in other._components.items():
            acc[key] = acc[key] + value if key in acc else value
        return KForm(self._chart, self._degree, acc)

    def __neg__(self) -> KForm:
        return KForm(self._chart, self._degree, {key: -value for key, value in self._components.items()})

    def __sub__(self, other: KForm) -> KForm:
        return self + (-other)

    def scale(self, factor: ScalarField | Coefficient) -> KForm:
        factor = self._chart.scalar(factor)
        if factor.is_zero:
            return zero_form(self._chart, self._degree)
        return KForm(self._chart, self._degree, {key: factor * value for key, value in self._components.items()})

    def __mul__(self, factor: ScalarField | Coefficient) -> KForm:
        return self.scale(factor)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KForm):
            return NotImplemented
        _check_chart(self._chart, other._chart)
        if self._degree != other._degree:
            return False
        if self._components.keys() != other._components.keys():
            return False
        return all(value == other._components[key] for key, value in self._components.items())

    __hash__ = None  # type: ignore[assignment]

    def map_coefficients(self, fn: Callable[[ScalarField], ScalarField], chart: Chart | None = None) -> KForm:
        """Apply `fn` to every coefficient, optionally moving the result to another chart of equal dimension."""
        target = chart or self._chart
        return KForm(target, self._degree, {key: fn(value) for key, value in self._components.items()})

    def wedge(self, other: KForm) -> KForm:
        return wedge(self, other)

    def interior(self, vector: VectorField) -> KForm:
        return interior(vector, self)

    def evaluate_on(self, *vectors: VectorField) -> ScalarField:
        """Value of the form on `degree` vector fields, `w(X1, ..., Xk)`.

        Raises:
            DegreeMismatchError: If the number of vectors differs from the degree.
        """
        if len(vectors) != self._degree:
            msg = f"A {self._degree}-form takes {self._degree} vector fields, got {len(vectors)}"
            raise DegreeMismatchError(msg)
        result = self
        for vector in vectors:
            result = interior(vector, result)
        return result.scalar()

    def render(self) -> str:
        if not self._components:
            return "0"
        names = self._chart.coordinates
        parts = []
        for key, value in self._components.items():
            basis = "^".join(f"d{names[i]}" for i in key) or "1"
            parts.append(f"({value.render()})*{basis}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"KForm(degree={self._degree}, {self.render()})"


class VectorField:
    """A vector field `sum_i X^i d/dx^i` with one scalar-field component per coordinate."""

    __slots__ = ("_chart", "_components")

    def __init__(self, chart: Chart, components: Sequence[ScalarField | Coefficient]) -> None:
        """Build a vector field.

        Raises:
            ChartMismatchError: If the component count differs from the chart dimension.
        """
        if len(components) != chart.dimension:
            msg = f"A vector field on a {chart.dimension}-chart needs {chart.dimension} components, got {len(components)}"
            raise ChartMismatchError(msg)
        self._chart = chart
        self._components = tuple(chart.scalar(value) for value in components)

    @property
    def chart(self) -> Chart:
        return self._chart

    @property
    def components(self) -> tuple[ScalarField, ...]:
        return self._components

    @property
    def is_zero(self) -> bool:
        return all(value.is_zero for value in self._components)

    def __getitem__(self, index: int) -> ScalarField:
        return self._components[index]

    def __add__(self, other: VectorField) -> VectorField:
        _check_chart(self._chart, other._chart)
        return VectorField(self._chart, [a + b for a, b in zip(self._components, other._components, strict=True)])

    def __neg__(self) -> VectorField:
        return VectorField(self._chart, [-a for a in self._components])

    def __sub__(self, other: VectorField) -> VectorField:
        return self + (-other)

    def scale(self, factor: ScalarField | Coefficient) -> VectorField:
        factor = self._chart.scalar(factor)
        return VectorField(self._chart, [factor * a for a in self._components])

    def __mul__(self, factor: ScalarField | Coefficient) -> VectorField:
        return self.scale(factor)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VectorField):
            return NotImplemented
        _check_chart(self._chart, other._chart)
        return all(a == b for a, b in zip(self._components, other._components, strict=True))

    __hash__ = None  # type: ignore[assignment]

    def apply(self, function: ScalarField | Coefficient) -> ScalarField:
        """Directional derivative `X(f) = sum_i X^i df/dx^i`."""
        function = self._chart.scalar(function)
        total = self._chart.zero()
        for name, component in zip(self._chart.coordinates, self._components, strict=True):
            if not component.is_zero:
                total += component * function.partial(name)
        return total

    def map_coefficients(self, fn: Callable[[ScalarField], ScalarField], chart: Chart | None = None) -> VectorField:
        return VectorField(chart or self._chart, [fn(value) for value in self._components])

    def render(self) -> str:
        parts = [f"({value.render()})*d/d{name}" for name, value in zip(self._chart.coordinates, self._components, strict=True) if not value.is_zero]
        return " + ".join(parts) or "0"

    def __repr__(self) -> str:
        return f"VectorField({self.render()})"


def zero_form(chart: Chart, degree: int) -> KForm:
    return KForm(chart, degree)


def scalar_form(function: ScalarField | Coefficient, chart: Chart) -> KForm:
    """The 0-form carrying `function`."""
    return KForm(chart, 0, {(): function})


def coordinate_differential(chart: Chart, name: str) -> KForm:
    """The 1-form `d(name)`."""
    return KForm(chart, 1, {(chart.index(name),): 1})


def coordinate_vector(chart: Chart, name: str) -> VectorField:
    """The coordinate vector field `d/d(name)`."""
    index = chart.index(name)
    return VectorField(chart, [1 if i == index else 0 for i in range(chart.dimension)])


def basis_forms(chart: Chart, degree: int) -> list[KForm]:
    """All `dx^I` with `I` strictly increasing of length `degree`, in lexicographic order."""
    return [KForm(chart, degree, {indices: 1}) for indices in combinations(range(chart.dimension), degree)]


def wedge(a: KForm, b: KForm) -> KForm:
    """Exterior product `a ^ b`; of degree `deg a + deg b`, zero above the chart dimension.

    Raises:
        ChartMismatchError: If the forms live on different charts.
    """
    _check_chart(a.chart, b.chart)
    degree = a.degree + b.degree
    terms = [
        (left + right, f * g)
        for left, f in a._components.items()
        for right, g in b._components.items()
        if not set(left) & set(right)
    ]
    return KForm.from_terms(a.chart, degree, terms)


def exterior(alpha: KForm, w: KForm) -> KForm:
    """Exterior multiplication `e_alpha(w) = alpha ^ w`."""
    return wedge(alpha, w)


def interior(vector: VectorField, w: KForm) -> KForm:
    """Contraction `i_X w = w(X, ...)`; the zero form of degree -1 on 0-forms.

    Raises:
        ChartMismatchError: If the operands live on different charts.
    """
    _check_chart(vector.chart, w.chart)
    acc: dict[MultiIndex, ScalarField] = {}
    for key, value in w._components.items():
        for position, index in enumerate(key):
            component = vector[index]
            if component.is_zero:
                continue
            rest = key[:position] + key[position + 1 :]
            term = component * value if position % 2 == 0 else -(component * value)
            acc[rest] = acc[rest] + term if rest in acc else term
    return KForm(w.chart, w.degree - 1, acc)


def add_scale(a: KForm, b: KForm, c: ScalarField | Coefficient) -> KForm:
    """`a + c * b`.

    Raises:
        DegreeMismatchError: If the degrees differ.
        ChartMismatchError: If the charts differ.
    """
    return a + b.scale(c)

