"""Observers `(T, tau)` with `tau(T) = 1`: connection endomorphism, torque, curvature and splits.

An observer splits every form into a temporal and a spatial part. With `e_tau` the wedge by
`tau` and `i_T` the contraction with `T`, the split is `w = tau ^ i_T w + i_T(tau ^ w)`.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from observerforms.calculus import (
    VectorForm,
    d,
    fn_bracket_endo,
    fn_bracket_vf,
    homogeneous,
    lie_derivative,
)
from observerforms.errors import ChartMismatchError, DegreeMismatchError, InvalidObserverError, NullObserverError
from observerforms.forms import Chart, KForm, VectorField, interior, wedge
from observerforms.lorentz import flat, hodge, metric_norm

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Observer:
    """A direction field `T` together with a 1-form `tau` normalized by `tau(T) = 1`.

    Constructing an `Observer` checks the normalization exactly.
    """

    T: VectorField
    """Time direction."""

    tau: KForm
    """Time 1-form; its kernel is the space distribution."""

    def __post_init__(self) -> None:
        """Check chart, degree and normalization.

        Raises:
            InvalidObserverError: If `tau` is not a 1-form on the chart of `T` or `tau(T) != 1`.
        """
        if self.tau.chart != self.T.chart:
            msg = f"T lives on {self.T.chart.coordinates}, tau on {self.tau.chart.coordinates}"
            raise InvalidObserverError(msg)
        if self.tau.degree != 1:
            msg = f"tau must be a 1-form, got degree {self.tau.degree}"
            raise InvalidObserverError(msg)
        pairing = self.tau.evaluate_on(self.T)
        if pairing != 1:
            msg = f"tau(T) must equal 1, got {pairing.render()}"
            raise InvalidObserverError(msg)

    @property
    def chart(self) -> Chart:
        return self.T.chart


def make_observer(t: VectorField, tau: KForm) -> Observer:
    """Observer from an explicit pair, validated."""
    return Observer(t, tau)


def observer_from_T(t: VectorField) -> Observer:  # noqa: N802
    """Observer whose time form is the metric dual of `T`, `tau = g(T, .) / g(T, T)`.

    Spacelike `T` are accepted; a warning is logged when `g(T, T)` is a negative constant.

    Raises:
        NullObserverError: If `g(T, T)` is identically zero.
        MetricError: If the chart carries no metric.
    """
    norm = metric_norm(t)
    if norm.is_zero:
        msg = f"g(T, T) vanishes identically for T = {t.render()}"
        raise NullObserverError(msg)
    value = norm.constant_value()
    if value is not None and value < 0:
        logger.warning("Observer built from spacelike T = %s (g(T, T) = %s)", t.render(), value)
    return Observer(t, flat(t).scale(norm.inverse()))


def is_metric_compatible(obs: Observer) -> bool:
    """Whether `tau = g(T, .)` and `g(T, T) = 1`, the setting of the metric identities."""
    if obs.chart.metric_signature is None:
        return False
    return metric_norm(obs.T) == 1 and flat(obs.T) == obs.tau


def kappa(obs: Observer) -> VectorForm:
    """The connection endomorphism `tau (x) T`, projecting onto the time direction."""
    return homogeneous(obs.tau, obs.T)


def torque_form(obs: Observer) -> KForm:
    """`L_T tau`."""
    return lie_derivative(obs.T, obs.tau)


def torque(obs: Observer) -> VectorForm:
    """`[T, kappa]`, equal to `(L_T tau) (x) T`."""
    return fn_bracket_vf(obs.T, kappa(obs))


def curvature_form(obs: Observer) -> KForm:
    """`-i_T(tau ^ d tau)`."""
    return -interior(obs.T, wedge(obs.tau, d(obs.tau)))


def curvature(obs: Observer) -> VectorForm:
    """Half the self-bracket of `kappa`, equal to `curvature_form (x) T`."""
    return fn_bracket_endo(kappa(obs), kappa(obs)).scale(Fraction(1, 2))


def is_holonomic(obs: Observer) -> bool:
    """Frobenius test: the space distribution is integrable iff `tau ^ d tau = 0`."""
    return wedge(obs.tau, d(obs.tau)).is_zero


def exterior_tau(obs: Observer, w: KForm) -> KForm:
    return wedge(obs.tau, w)


def contract_T(obs: Observer, w: KForm) -> KForm:  # noqa: N802
    return interior(obs.T, w)


class FormSplit(NamedTuple):
    """Temporal and spatial parts of a form, `w = tau ^ temporal + spatial`."""

    temporal: KForm
    spatial: KForm


def split(obs: Observer, w: KForm) -> FormSplit:
    """`(i_T w, i_T(tau ^ w))`; both parts vanish under `i_T`."""
    return FormSplit(interior(obs.T, w), interior(obs.T, wedge(obs.tau, w)))


def torque_contract(obs: Observer, w: KForm) -> KForm:
    """`Torq ⌟ w = (L_T tau) ^ i_T w`."""
    return wedge(torque_form(obs), interior(obs.T, w))


def curvature_contract(obs: Observer, w: KForm) -> KForm:
    """`Curv ⌟ w = -i_T(tau ^ d tau) ^ i_T w`."""
    return wedge(curvature_form(obs), interior(obs.T, w))


@dataclass(frozen=True, eq=False)
class EMFields:
    """Observer split of the electromagnetic forms; a field is `None` when its source form was absent."""

    E: KForm | None = None
    """Electric field 1-form, `-i_T F`."""
    B: KForm | None = None
    """Magnetic 2-form, `i_T(tau ^ F)`."""
    H: KForm | None = None
    """Magnetic excitation 1-form, `i_T G`."""
    D: KForm | None = None
    """Electric displacement 2-form, `i_T(tau ^ G)`."""
    J: KForm | None = None
    """Current density 2-form, `-i_T j`."""
    rho: KForm | None = None
    """Charge density 3-form, `i_T(tau ^ j)`."""
    phi: KForm | None = None
    """Scalar potential, `i_T a`."""
    A3: KForm | None = None
    """Spatial vector potential, `i_T(tau ^ a)`."""


class EMForms(NamedTuple):
    F: KForm | None
    G: KForm | None
    j: KForm | None
    a: KForm | None


def split_em(obs: Observer, *, F: KForm | None = None, G: KForm | None = None, j: KForm | None = None, a: KForm | None = None) -> EMFields:  # noqa: N803
    """Split field strength, excitation, current and potential into their observer parts.

    Raises:
        DegreeMismatchError: If an input has the wrong degree.
    """
    for name, form, degree in (("F", F, 2), ("G", G, 2), ("j", j, 3), ("a", a, 1)):
        if form is not None and form.degree != degree:
            msg = f"{name} must be a {degree}-form, got degree {form.degree}"
            raise DegreeMismatchError(msg)
    fields: dict[str, KForm] = {}
    if F is not None:
        temporal, fields["B"] = split(obs, F)
        fields["E"] = -temporal
    if G is not None:
        fields["H"], fields["D"] = split(obs, G)
    if j is not None:
        temporal, fields["rho"] = split(obs, j)
        fields["J"] = -temporal
    if a is not None:
        fields["phi"], fields["A3"] = split(obs, a)
    return EMFields(**fields)


def reconstruct_em(obs: Observer, fields: EMFields) -> EMForms:
    """Invert `split_em`: `F = E ^ tau + B`, `G = tau ^ H + D`, `j = rho - tau ^ J`, `a = phi tau + A`."""
    tau = obs.tau
    f = wedge(fields.E, tau) + fields.B if fields.E is not None and fields.B is not None else None
    g = wedge(tau, fields.H) + fields.D if fields.H is not None and fields.D is not None else None
    j = fields.rho - wedge(tau, fields.J) if fields.rho is not None and fields.J is not None else None
    a = tau.scale(fields.phi.scalar()) + fields.A3 if fields.phi is not None and fields.A3 is not None else None
    return EMForms(f, g, j, a)


def reduced_hodge(obs: Observer, w: KForm) -> KForm:
    """Spatial Hodge star of the observer, `i_T o hodge`."""
    return interior(obs.T, hodge(w))


def decomposition_residual(obs: Observer, w: KForm) -> KForm:
    """`(e_tau i_T + i_T e_tau) w - w`; zero for every observer."""
    return wedge(obs.tau, interior(obs.T, w)) + interior(obs.T, wedge(obs.tau, w)) - w


def temperley_lieb_residuals(obs: Observer, w: KForm) -> tuple[KForm, KForm]:
    """`i_T e_tau i_T w - i_T w` and `e_tau i_T e_tau w - e_tau w`."""
    i_w = interior(obs.T, w)
    e_w = wedge(obs.tau, w)
    return (
        interior(obs.T, wedge(obs.tau, i_w)) - i_w,
        wedge(obs.tau, interior(obs.T, e_w)) - e_w,
    )


def torque_bracket_residual(obs: Observer) -> VectorForm:
    """`[T, kappa] - (L_T tau) (x) T`."""
    return torque(obs) - homogeneous(torque_form(obs), obs.T)


def curvature_bracket_residual(obs: Observer) -> VectorForm:
    """`[kappa, kappa] + 2 i_T(tau ^ d tau) (x) T`."""
    return fn_bracket_endo(kappa(obs), kappa(obs)) - homogeneous(curvature_form(obs), obs.T).scale(2)


def intertwining_residuals(obs: Observer, w: KForm) -> tuple[KForm, KForm]:
    """Residuals of `i_T hodge = (-1)^k hodge e_tau` and `e_tau hodge = (-1)^(k+1) hodge i_T` on `w`.

    Both vanish for metric-compatible observers.
    """
    if w.chart != obs.chart:
        msg = "Form and observer live on different charts"
        raise ChartMismatchError(msg)
    sign = -1 if w.degree % 2 else 1
    first = interior(obs.T, hodge(w)) - hodge(wedge(obs.tau, w)).scale(sign)
    second = wedge(obs.tau, hodge(w)) + hodge(interior(obs.T, w)).scale(sign)
    return first, second

