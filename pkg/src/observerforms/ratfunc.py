"""Exact rational functions of chart coordinates.

Everything in the package is built on `ScalarField`: a quotient of two sparse multivariate
polynomials with rational coefficients. The polynomial layer is sympy's distributed
`PolyRing` over `QQ` in graded-lexicographic order; this module only decides how quotients are
normalized, compared, differentiated and evaluated.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Literal

from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing

from observerforms.errors import (
    ChartMismatchError,
    DivisionByZeroFieldError,
    ExponentOverflowError,
    PoleAtPointError,
    UnknownCoordinateError,
)

Rational = Fraction
"""Arbitrary-precision rational, always in lowest terms with a positive denominator."""

Polynomial = PolyElement
"""Sparse multivariate polynomial over the rationals."""

Coefficient = int | Fraction
"""Plain numbers accepted wherever a `ScalarField` is expected."""

MAX_VARIABLES = 8
MAX_EXPONENT = 2**31 - 1

ArithOp = Literal["add", "sub", "mul", "div", "neg"]


@lru_cache(maxsize=64)
def _poly_ring(names: tuple[str, ...]) -> PolyRing:
    return PolyRing(names, QQ, grlex)


@dataclass(frozen=True)
class CoordinateRing:
    """Ordered coordinate names plus the normalization policy of their rational functions.

    Two rings are the same only if their names agree in the same order; fields from different
    rings never mix.
    """

    names: tuple[str, ...]
    """Coordinate names, in chart order."""

    cancel_common_factors: bool = True
    """Cancel the multivariate polynomial GCD of numerator and denominator after each operation."""

    poly_ring: PolyRing = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        """Validate the names and attach the polynomial ring."""
        names = tuple(self.names)
        if not 1 <= len(names) <= MAX_VARIABLES:
            msg = f"A chart needs between 1 and {MAX_VARIABLES} coordinates, got {len(names)}"
            raise ValueError(msg)
        if len(set(names)) != len(names):
            msg = f"Coordinate names must be distinct: {names}"
            raise ValueError(msg)
        bad = [name for name in names if not name.isidentifier()]
        if bad:
            msg = f"Coordinate names must be identifiers: {bad}"
            raise ValueError(msg)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "poly_ring", _poly_ring(names))

    def index(self, name: str) -> int:
        """Position of a coordinate.

        Raises:
            UnknownCoordinateError: If `name` is not a coordinate of this ring.
        """
        try:
            return self.names.index(name)
        except ValueError:
            msg = f"Unknown coordinate {name!r}; chart coordinates are {self.names}"
            raise UnknownCoordinateError(msg) from None

    def zero(self) -> ScalarField:
        return ScalarField(self, self.poly_ring.zero)

    def one(self) -> ScalarField:
        return ScalarField(self, self.poly_ring.one)

    def constant(self, value: Coefficient) -> ScalarField:
        """The constant function with the given rational value."""
        value = Fraction(value)
        return ScalarField(self, self.poly_ring.ground_new(QQ(value.numerator, value.denominator)))

    def coordinate(self, name: str) -> ScalarField:
        """The coordinate function `name`."""
        return ScalarField(self, self.poly_ring.gens[self.index(name)])


def _normalize(num: PolyElement, den: PolyElement, *, cancel: bool) -> tuple[PolyElement, PolyElement]:
    """Bring a quotient to canonical form.

    The denominator ends up primitive with integer coefficients and a positive leading
    coefficient; all numeric content moves to the numerator. With `cancel` the polynomial GCD is
    removed as well.
    """
    ring = num.ring
    if not num:
        return ring.zero, ring.one
    if cancel and not den.is_ground:
        num, den = num.cancel(den)
    num_content, num = num.primitive()
    den_content, den = den.primitive()
    content = num_content / den_content
    if den.LC < 0:
        den, content = -den, -content
    return num.mul_ground(content), den


class ScalarField:
    """Exact rational function `numerator / denominator` on a coordinate ring.

    Values are immutable. Arithmetic accepts other fields of the same ring as well as plain ints
    and `Fraction`s. Equality is decided by cross-multiplication, so it never depends on whether
    common factors were cancelled.
    """

    __slots__ = ("_den", "_num", "_ring")

    def __init__(self, ring: CoordinateRing, numerator: PolyElement, denominator: PolyElement | None = None) -> None:
        """Build and normalize a quotient.

        Args:
            ring: Coordinate ring both polynomials belong to.
            numerator: Numerator polynomial.
            denominator: Denominator polynomial, `1` when omitted.

        Raises:
            DivisionByZeroFieldError: If the denominator is the zero polynomial.
        """
        if denominator is None:
            denominator = ring.poly_ring.one
        if not denominator:
            msg = "Denominator is the zero polynomial"
            raise DivisionByZeroFieldError(msg)
        self._ring = ring
        self._num, self._den = _normalize(numerator, denominator, cancel=ring.cancel_common_factors)

    @property
    def ring(self) -> CoordinateRing:
        return self._ring

    @property
    def numerator(self) -> PolyElement:
        return self._num

    @property
    def denominator(self) -> PolyElement:
        return self._den

    @property
    def is_zero(self) -> bool:
        return not self._num

    @property
    def is_polynomial(self) -> bool:
        return self._den.is_ground

    @property
    def is_constant(self) -> bool:
        return self._num.is_ground and self._den.is_ground

    def constant_value(self) -> Fraction | None:
        """The rational value of a constant field, `None` if the field is not constant."""
        if not self.is_constant:
            return None
        return _to_fraction(self._num.LC / self._den.LC) if self._num else Fraction(0)

    def _coerce(self, other: object) -> ScalarField | None:
        if isinstance(other, ScalarField):
            if other._ring.names != self._ring.names:
                msg = f"Cannot combine fields on {self._ring.names} and {other._ring.names}"
                raise ChartMismatchError(msg)
            return other
        if isinstance(other, int | Fraction):
            return self._ring.constant(other)
        return None

    def _new(self, num: PolyElement, den: PolyElement) -> ScalarField:
        return ScalarField(self._ring, num, den)

    def __add__(self, other: object) -> ScalarField:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        if self._den == rhs._den:
            return self._new(self._num + rhs._num, self._den)
        return self._new(self._num * rhs._den + rhs._num * self._den, self._den * rhs._den)

    __radd__ = __add__

    def __neg__(self) -> ScalarField:
        return self._new(-self._num, self._den)

    def __sub__(self, other: object) -> ScalarField:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other: object) -> ScalarField:
        return (-self) + other

    def __mul__(self, other: object) -> ScalarField:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        if self.is_zero or rhs.is_zero:
            return self._ring.zero()
        return self._new(self._num * rhs._num, self._den * rhs._den)

    __rmul__ = __mul__

    def inverse(self) -> ScalarField:
        """Multiplicative inverse.

        Raises:
            DivisionByZeroFieldError: If the field is identically zero.
        """
        if self.is_zero:
            msg = "Cannot invert the zero rational function"
            raise DivisionByZeroFieldError(msg)
        return self._new(self._den, self._num)

    def __truediv__(self, other: object) -> ScalarField:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self * rhs.inverse()

    def __rtruediv__(self, other: object) -> ScalarField:
        lhs = self._coerce(other)
        if lhs is None:
            return NotImplemented
        return lhs * self.inverse()

    def __pow__(self, exponent: int) -> ScalarField:
        if abs(exponent) > MAX_EXPONENT:
            msg = f"Exponent {exponent} exceeds {MAX_EXPONENT}"
            raise ExponentOverflowError(msg)
        base = self if exponent >= 0 else self.inverse()
        power = abs(exponent)
        top = max(max(base._num.degrees(), default=0), max(base._den.degrees(), default=0), 0)
        if top * power > MAX_EXPONENT:
            msg = f"Raising a degree-{top} field to the power {power} overflows exponents"
            raise ExponentOverflowError(msg)
        return base._new(base._num**power, base._den**power)

    def __eq__(self, other: object) -> bool:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self._num * rhs._den == rhs._num * self._den

    __hash__ = None  # type: ignore[assignment]

    def partial(self, coordinate: str) -> ScalarField:
        """Exact partial derivative along a coordinate (quotient rule).

        Raises:
            UnknownCoordinateError: If `coordinate` is not in the ring.
        """
        gen = self._ring.poly_ring.gens[self._ring.index(coordinate)]
        dnum = self._num.diff(gen)
        if self._den.is_ground:
            return self._new(dnum, self._den)
        dden = self._den.diff(gen)
        return self._new(self._den * dnum - self._num * dden, self._den**2)

    def evaluate(self, point: Mapping[str, Coefficient]) -> Fraction:
        """Exact value at a point.

        Args:
            point: Rational value for every coordinate of the ring.

        Raises:
            UnknownCoordinateError: If a coordinate is missing or an unknown name is given.
            PoleAtPointError: If the (normalized) denominator vanishes at the point.
        """
        extra = set(point) - set(self._ring.names)
        if extra:
            msg = f"Point assigns unknown coordinates {sorted(extra)}"
            raise UnknownCoordinateError(msg)
        missing = [name for name in self._ring.names if name not in point]
        if missing:
            msg = f"Point does not assign coordinates {missing}"
            raise UnknownCoordinateError(msg)
        values = [Fraction(point[name]) for name in self._ring.names]
        den = _evaluate_poly(self._den, values)
        if den == 0:
            msg = f"Denominator {self._render_poly(self._den)} vanishes at {point}"
            raise PoleAtPointError(msg)
        return _evaluate_poly(self._num, values) / den

    def substitute(self, mapping: Mapping[str, ScalarField]) -> ScalarField:
        """Compose with rational functions: replace coordinates by fields of the same ring."""
        for name in mapping:
            self._ring.index(name)
        return _compose_poly(self._ring, self._num, mapping) / _compose_poly(self._ring, self._den, mapping)

    def extend_to(self, target: CoordinateRing) -> ScalarField:
        """Re-express the field on a ring whose coordinates include all of ours.

        Raises:
            UnknownCoordinateError: If a coordinate of this ring is missing from `target`.
        """
        positions = [target.index(name) for name in self._ring.names]
        width = len(target.names)

        def lift(poly: PolyElement) -> PolyElement:
            terms = {}
            for monom, coeff in poly.iterterms():
                exponents = [0] * width
                for pos, exp in zip(positions, monom, strict=True):
                    exponents[pos] = exp
                terms[tuple(exponents)] = coeff
            return target.poly_ring.from_dict(terms)

        return ScalarField(target, lift(self._num), lift(self._den))

    def restrict_to(self, target: CoordinateRing) -> ScalarField:
        """Re-express the field on a ring with fewer coordinates.

        Raises:
            UnknownCoordinateError: If the field depends on a coordinate missing from `target`.
        """
        dropped = [name for name in self._ring.names if name not in target.names]
        for name in dropped:
            if self.depends_on(name):
                msg = f"Field {self.render()} depends on {name!r}, which {target.names} lacks"
                raise UnknownCoordinateError(msg)
        sources = [self._ring.index(name) for name in target.names if name in self._ring.names]
        targets = [target.index(name) for name in target.names if name in self._ring.names]
        width = len(target.names)

        def project(poly: PolyElement) -> PolyElement:
            terms = {}
            for monom, coeff in poly.iterterms():
                exponents = [0] * width
                for source, pos in zip(sources, targets, strict=True):
                    exponents[pos] = monom[source]
                terms[tuple(exponents)] = coeff
            return target.poly_ring.from_dict(terms)

        return ScalarField(target, project(self._num), project(self._den))

    def depends_on(self, coordinate: str) -> bool:
        index = self._ring.index(coordinate)
        return any(monom[index] for poly in (self._num, self._den) for monom in poly.itermonoms())

    def _render_poly(self, poly: PolyElement) -> str:
        if not poly:
            return "0"
        names = self._ring.names
        parts: list[str] = []
        for monom, coeff in poly.terms():
            value = _to_fraction(coeff)
            factors = [name if exp == 1 else f"{name}^{exp}" for name, exp in zip(names, monom, strict=True) if exp]
            magnitude = abs(value)
            if not factors:
                text = str(magnitude)
            elif magnitude == 1:
                text = "*".join(factors)
            else:
                text = "*".join([str(magnitude), *factors])
            if not parts:
                parts.append(f"-{text}" if value < 0 else text)
            else:
                parts.append(f"- {text}" if value < 0 else f"+ {text}")
        return " ".join(parts)

    def render(self) -> str:
        """Canonical text: grlex-sorted terms, reduced fractions, parseable by the expression grammar."""
        if self._den.is_ground:
            return self._render_poly(self._num)
        return f"({self._render_poly(self._num)})/({self._render_poly(self._den)})"

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"ScalarField({self.render()!r})"


def _to_fraction(value: object) -> Fraction:
    return Fraction(int(QQ.numer(value)), int(QQ.denom(value)))


def _evaluate_poly(poly: PolyElement, values: list[Fraction]) -> Fraction:
    if not poly:
        return Fraction(0)
    if poly.is_ground:
        return _to_fraction(poly.LC)
    ring = poly.ring
    result = poly.evaluate([(gen, QQ(v.numerator, v.denominator)) for gen, v in zip(ring.gens, values, strict=True)])
    return _to_fraction(result)


def _compose_poly(ring: CoordinateRing, poly: PolyElement, mapping: Mapping[str, ScalarField]) -> ScalarField:
    total = ring.zero()
    for monom, coeff in poly.iterterms():
        term = ring.constant(_to_fraction(coeff))
        for name, exp in zip(ring.names, monom, strict=True):
            if exp:
                term *= (mapping[name] if name in mapping else ring.coordinate(name)) ** exp
        total += term
    return total


_ARITH: dict[str, Callable[[ScalarField, ScalarField], ScalarField]] = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
    "neg": lambda a, _: -a,
}


def arith(a: ScalarField, b: ScalarField, op: ArithOp) -> ScalarField:
    """Exact field arithmetic; `neg` ignores `b`.

    Raises:
        DivisionByZeroFieldError: For `div` when `b` is the zero function.
        ChartMismatchError: If the operands live on different rings.
    """
    if op not in _ARITH:
        msg = f"Unknown operation {op!r}; expected one of {sorted(_ARITH)}"
        raise ValueError(msg)
    return _ARITH[op](a, b)


def partial(a: ScalarField, coordinate: str) -> ScalarField:
    """Partial derivative of `a` along `coordinate`."""
    return a.partial(coordinate)


def equals(a: ScalarField, b: ScalarField) -> bool:
    """Decide `a == b` as rational functions.

    Raises:
        ChartMismatchError: If the operands live on different rings.
    """
    return a == b


def evaluate(a: ScalarField, point: Mapping[str, Coefficient]) -> Fraction:
    """Exact value of `a` at `point`."""
    return a.evaluate(point)
