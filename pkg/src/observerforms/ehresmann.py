"""Ehresmann connections on a trivialized bundle chart.

The total chart lists the `n` base coordinates first and the `N` fiber coordinates last; the
projection forgets the fiber coordinates. A connection is the vertical projection `kappa`, an
endomorphism field of the total chart with `kappa o kappa = kappa`, vertical image and identity on
vertical vectors. In terms of a horizontal matrix `A` (one row per fiber coordinate `u^p`, one
column per base coordinate `x^i`):

    kappa = sum_p (du^p - sum_i A^p_i dx^i) (x) d/du^p,    lift(d/dx^i) = d/dx^i + sum_p A^p_i d/du^p

No structure group is assumed; torque is measured against fiber translations.
"""

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from observerforms.calculus import (
    VectorForm,
    derivation_is_zero,
    fn_bracket_endo,
    fn_bracket_vf,
    lie_derivative_vf,
    superbracket,
)
from observerforms.errors import ChartMismatchError, InvalidConnectionError
from observerforms.forms import Chart, KForm, VectorField, coordinate_differential, coordinate_vector, zero_form
from observerforms.observer import Observer
from observerforms.ratfunc import MAX_VARIABLES, Coefficient, ScalarField

logger = logging.getLogger(__name__)

DEMOS = ("product", "u1-like", "non-principal")


@dataclass(frozen=True)
class BundleChart:
    """A trivialized bundle chart `E = base x fiber`."""

    base: tuple[str, ...]
    """Base coordinate names `x^1..x^n`."""

    fiber: tuple[str, ...]
    """Fiber coordinate names `u^1..u^N`."""

    cancel_common_factors: bool = True

    total: Chart = field(init=False, repr=False, compare=False)
    base_chart: Chart = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        """Validate the dimensions and build the total and base charts."""
        base, fiber = tuple(self.base), tuple(self.fiber)
        if not base or not fiber or len(base) + len(fiber) > MAX_VARIABLES:
            msg = f"Bundle chart needs n >= 1, N >= 1 and n + N <= {MAX_VARIABLES}; got n = {len(base)}, N = {len(fiber)}"
            raise ValueError(msg)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "fiber", fiber)
        object.__setattr__(self, "total", Chart(base + fiber, cancel_common_factors=self.cancel_common_factors))
        object.__setattr__(self, "base_chart", Chart(base, cancel_common_factors=self.cancel_common_factors))

    @property
    def n(self) -> int:
        return len(self.base)

    @property
    def N(self) -> int:  # noqa: N802
        return len(self.fiber)

    def vertical_vectors(self) -> list[VectorField]:
        return [coordinate_vector(self.total, name) for name in self.fiber]

    def to_total(self, value: ScalarField | Coefficient) -> ScalarField:
        """Coerce a base-chart field (or a total-chart field or number) onto the total chart."""
        if isinstance(value, ScalarField) and value.ring.names == self.base:
            return value.extend_to(self.total.ring)
        return self.total.scalar(value)


@dataclass(frozen=True, eq=False)
class ConnectionField:
    """A validated vertical projection on a bundle chart."""

    bundle: BundleChart
    kappa: VectorForm
    """The endomorphism field `kappa` on the total chart."""


@dataclass(frozen=True, eq=False)
class SectionGraph:
    """A section `x -> (x, psi(x))`; components are fields on the base chart."""

    bundle: BundleChart
    components: tuple[ScalarField, ...]

    def __post_init__(self) -> None:
        """Check the component count and that every component lives on the base chart."""
        if len(self.components) != self.bundle.N:
            msg = f"A section needs {self.bundle.N} fiber components, got {len(self.components)}"
            raise ChartMismatchError(msg)
        object.__setattr__(self, "components", tuple(self.bundle.base_chart.scalar(value) for value in self.components))


def connection_from_horizontal(bundle: BundleChart, horizontal: Sequence[Sequence[ScalarField | Coefficient]]) -> ConnectionField:
    """Connection whose horizontal space is spanned by `d/dx^i + sum_p A^p_i d/du^p`.

    Args:
        bundle: The bundle chart.
        horizontal: `N x n` matrix `A`; entries are numbers or fields on the base or total chart
            and may depend on the fiber coordinates.

    Raises:
        ChartMismatchError: If the matrix shape does not match the bundle.
    """
    if len(horizontal) != bundle.N or any(len(row) != bundle.n for row in horizontal):
        msg = f"Horizontal matrix must be {bundle.N} x {bundle.n}"
        raise ChartMismatchError(msg)
    total = bundle.total
    forms = [zero_form(total, 1) for _ in bundle.base]
    for p, row in enumerate(horizontal):
        components: dict[tuple[int, ...], ScalarField] = {(bundle.n + p,): total.one()}
        for i, value in enumerate(row):
            components[(i,)] = -bundle.to_total(value)
        forms.append(KForm(total, 1, components))
    return ConnectionField(bundle, VectorForm(total, 1, forms))


def connection_from_kappa(bundle: BundleChart, kappa: VectorForm) -> ConnectionField:
    """Validate a raw endomorphism field as a connection.

    Raises:
        InvalidConnectionError: If `kappa` is not idempotent, has non-vertical image, or is not the
            identity on vertical vectors.
    """
    if kappa.chart != bundle.total or kappa.degree != 1:
        msg = "kappa must be an endomorphism field on the total chart"
        raise InvalidConnectionError(msg)
    for i, name in enumerate(bundle.base):
        if not kappa.forms[i].is_zero:
            msg = f"kappa has a non-vertical image: component along d/d{name} is {kappa.forms[i].render()}"
            raise InvalidConnectionError(msg)
    for vertical in bundle.vertical_vectors():
        if kappa.apply(vertical) != vertical:
            msg = f"kappa is not the identity on the vertical vector {vertical.render()}"
            raise InvalidConnectionError(msg)
    if kappa.compose(kappa) != kappa:
        msg = "kappa is not idempotent"
        raise InvalidConnectionError(msg)
    return ConnectionField(bundle, kappa)


def horizontal_matrix(c: ConnectionField) -> list[list[ScalarField]]:
    """The `N x n` matrix `A` with `kappa(d/dx^i) = -sum_p A^p_i d/du^p`."""
    n = c.bundle.n
    return [[-c.kappa.entry(n + p, (i,)) for i in range(n)] for p in range(c.bundle.N)]


def pi_star(bundle: BundleChart, vector: VectorField) -> list[ScalarField]:
    """Base components of a total-chart vector field (the pushforward along the projection)."""
    return list(vector.components[: bundle.n])


def _base_to_total(bundle: BundleChart, v: VectorField) -> VectorField:
    if v.chart != bundle.base_chart:
        msg = f"Expected a vector field on the base chart {bundle.base}, got one on {v.chart.coordinates}"
        raise ChartMismatchError(msg)
    components = [bundle.to_total(value) for value in v.components]
    return VectorField(bundle.total, components + [bundle.total.zero()] * bundle.N)


def lift(c: ConnectionField, v: VectorField) -> VectorField:
    """Horizontal lift of a base vector field: `v - kappa(v)` with `v` viewed on the total chart."""
    pushed = _base_to_total(c.bundle, v)
    return pushed - c.kappa.apply(pushed)


def lift_at(c: ConnectionField, v: VectorField, point: Mapping[str, Coefficient]) -> tuple[Fraction, ...]:
    """Components of the horizontal lift at a point of the total space."""
    return tuple(value.evaluate(point) for value in lift(c, v).components)


def covariant_derivative(c: ConnectionField, s: SectionGraph) -> list[list[ScalarField]]:
    """`kappa o Psi_*` as an `N x n` matrix of base-chart fields.

    Entry `(p, i)` is `d psi^p / dx^i - A^p_i`, with the fiber coordinates of `A` replaced by the
    section. It vanishes exactly when the graph of the section is horizontal.
    """
    bundle = c.bundle
    total = bundle.total
    psi = [bundle.to_total(value) for value in s.components]
    on_section = dict(zip(bundle.fiber, psi, strict=True))
    rows: list[list[ScalarField]] = [[] for _ in bundle.fiber]
    for name in bundle.base:
        tangent = coordinate_vector(total, name) + VectorField(total, [total.zero()] * bundle.n + [value.partial(name) for value in psi])
        image = c.kappa.apply(tangent)
        for p in range(bundle.N):
            value = image[bundle.n + p].substitute(on_section)
            rows[p].append(value.restrict_to(bundle.base_chart.ring))
    return rows


def curvature_omega(c: ConnectionField) -> VectorForm:
    """`Omega = 1/2 [kappa, kappa]`, a vertical-valued 2-form."""
    return fn_bracket_endo(c.kappa, c.kappa).scale(Fraction(1, 2))


def base_curvature(c: ConnectionField, v: VectorField, w: VectorField) -> VectorField:
    """`Omega(lift v, lift w)` for base vector fields `v`, `w`."""
    return curvature_omega(c).evaluate(lift(c, v), lift(c, w))


def bianchi_check(c: ConnectionField) -> bool:
    """`[[L_Omega, L_kappa]] = 0` on every generator of the total chart."""
    return derivation_is_zero(superbracket(lie_derivative_vf(curvature_omega(c)), lie_derivative_vf(c.kappa)))


def torque_general(c: ConnectionField) -> list[VectorForm]:
    """`L_{d/du^p} kappa` for each fiber coordinate; all zero iff `kappa` is translation invariant."""
    return [fn_bracket_vf(vertical, c.kappa) for vertical in c.bundle.vertical_vectors()]


def torque_along(c: ConnectionField, weights: Sequence[Coefficient]) -> VectorForm:
    """Torque evaluated on the Lie-algebra element `sum_p weights[p] e_p`."""
    if len(weights) != c.bundle.N:
        msg = f"Expected {c.bundle.N} weights, got {len(weights)}"
        raise ChartMismatchError(msg)
    result = VectorForm.zero(c.bundle.total, 1)
    for weight, component in zip(weights, torque_general(c), strict=True):
        result += component.scale(weight)
    return result


@dataclass(frozen=True)
class ConnectionAxioms:
    """Outcome of the exact projection and exact-sequence checks."""

    idempotent: bool
    vertical_image: bool
    identity_on_vertical: bool
    kills_lifts: bool
    projects_lifts: bool
    curvature_vertical: bool

    @property
    def all_hold(self) -> bool:
        return all(vars(self).values())


def check_axioms(c: ConnectionField) -> ConnectionAxioms:
    """Check `kappa^2 = kappa`, vertical image, `kappa|V = id`, `kappa o lift = 0`, `pi_* o lift = id` and `i_v Omega = 0`."""
    bundle = c.bundle
    kappa = c.kappa
    base_vectors = [coordinate_vector(bundle.base_chart, name) for name in bundle.base]
    lifts = [lift(c, v) for v in base_vectors]
    omega = curvature_omega(c)
    return ConnectionAxioms(
        idempotent=kappa.compose(kappa) == kappa,
        vertical_image=all(kappa.forms[i].is_zero for i in range(bundle.n)),
        identity_on_vertical=all(kappa.apply(v) == v for v in bundle.vertical_vectors()),
        kills_lifts=all(kappa.apply(lifted).is_zero for lifted in lifts),
        projects_lifts=all(
            pi_star(bundle, lifted) == list(_base_to_total(bundle, v).components[: bundle.n]) for lifted, v in zip(lifts, base_vectors, strict=True)
        ),
        curvature_vertical=all(omega.interior(v).is_zero for v in bundle.vertical_vectors()),
    )


def demo_connection(name: str) -> ConnectionField:
    """One of the shipped two-dimensional-base, one-dimensional-fiber connections.

    - `product`: `A = (0, 0)`, flat and translation invariant.
    - `u1-like`: `A = (0, x1)`, curvature `dx1 ^ dx2 (x) d/du`.
    - `non-principal`: `A = (u, 0)`, fiber dependent with integrable horizontal distribution.

    Raises:
        ValueError: If `name` is not one of `DEMOS`.
    """
    bundle = BundleChart(("x1", "x2"), ("u",))
    total = bundle.total
    matrices = {
        "product": [[0, 0]],
        "u1-like": [[0, total.coordinate("x1")]],
        "non-principal": [[total.coordinate("u"), 0]],
    }
    if name not in matrices:
        msg = f"Unknown demo {name!r}; expected one of {list(DEMOS)}"
        raise ValueError(msg)
    return connection_from_horizontal(bundle, matrices[name])


def to_bundle_chart(bundle: BundleChart, a: VectorForm) -> VectorForm:
    """Re-express a vector-valued form given on a chart with the same coordinates in another order."""
    source = a.chart
    if sorted(source.coordinates) != sorted(bundle.total.coordinates):
        msg = f"Chart {source.coordinates} does not carry the coordinates of {bundle.total.coordinates}"
        raise ChartMismatchError(msg)
    total = bundle.total
    position = [total.index(name) for name in source.coordinates]
    moved = {}
    for output, form in enumerate(a.forms):
        terms = [(tuple(position[i] for i in key), value.extend_to(total.ring)) for key, value in form.components.items()]
        moved[position[output]] = KForm.from_terms(total, a.degree, terms)
    return VectorForm(total, a.degree, [moved[i] for i in range(total.dimension)])


def embed_observer(obs: Observer, *, time: str = "t") -> ConnectionField:
    """The observer connection `tau (x) T` as a bundle with the single fiber coordinate `time`.

    Requires `T = d/d(time)`, so that fiber translations are the flow of `T`.

    Raises:
        InvalidConnectionError: If `T` is not the coordinate field of `time`.
    """
    chart = obs.chart
    if obs.T != coordinate_vector(chart, time):
        msg = f"Embedding needs T = d/d{time}, got {obs.T.render()}"
        raise InvalidConnectionError(msg)
    bundle = BundleChart(tuple(name for name in chart.coordinates if name != time), (time,), cancel_common_factors=chart.cancel_common_factors)
    kappa = VectorForm(chart, 1, [obs.tau if name == time else zero_form(chart, 1) for name in chart.coordinates])
    logger.debug("Embedding observer with tau = %s over base %s", obs.tau.render(), bundle.base)
    return connection_from_kappa(bundle, to_bundle_chart(bundle, kappa))


def identity_on_fiber(bundle: BundleChart) -> VectorForm:
    """The product connection `sum_p du^p (x) d/du^p`."""
    total = bundle.total
    forms = [zero_form(total, 1) for _ in bundle.base] + [coordinate_differential(total, name) for name in bundle.fiber]
    return VectorForm(total, 1, forms)
