"""Text front-end for scalar fields.

Grammar, loosest binding first: `+ -` (left associative), `* /` (left associative), unary `-`,
then `^` with a non-negative integer exponent. Atoms are integer literals, coordinate names and
parenthesized expressions; rational literals such as `5/3` are integer divisions. Whitespace is
ignored. The text produced by `ScalarField.render` is accepted back.
"""

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from observerforms.errors import (
    ExponentOverflowError,
    ExpressionSyntaxError,
    NegativeExponentError,
    UnknownIdentifierError,
)
from observerforms.forms import Chart
from observerforms.ratfunc import MAX_EXPONENT, CoordinateRing, ScalarField

GRAMMAR = r"""
?start: sum

?sum: product
    | sum "+" product   -> add
    | sum "-" product   -> sub

?product: unary
    | product "*" unary -> mul
    | product "/" unary -> div

?unary: power
    | "-" unary         -> neg

?power: atom
    | atom "^" INT      -> raised
    | atom "^" "-" INT  -> negative_power

?atom: INT              -> number
    | NAME              -> name
    | "(" sum ")"

%import common.INT
%import common.CNAME -> NAME
%import common.WS
%ignore WS
"""

_PARSER = Lark(GRAMMAR, parser="lalr")


class _FieldBuilder(Transformer[Token, ScalarField]):
    """Evaluate the parse tree bottom-up into a `ScalarField`."""

    def __init__(self, ring: CoordinateRing) -> None:
        super().__init__()
        self._ring = ring

    @v_args(inline=True)
    def number(self, token: Token) -> ScalarField:
        return self._ring.constant(int(token))

    @v_args(inline=True)
    def name(self, token: Token) -> ScalarField:
        if str(token) not in self._ring.names:
            msg = f"Unknown identifier {str(token)!r}; chart coordinates are {', '.join(self._ring.names)}"
            raise UnknownIdentifierError(msg, token.start_pos or 0)
        return self._ring.coordinate(str(token))

    @v_args(inline=True)
    def add(self, a: ScalarField, b: ScalarField) -> ScalarField:
        return a + b

    @v_args(inline=True)
    def sub(self, a: ScalarField, b: ScalarField) -> ScalarField:
        return a - b

    @v_args(inline=True)
    def mul(self, a: ScalarField, b: ScalarField) -> ScalarField:
        return a * b

    @v_args(inline=True)
    def div(self, a: ScalarField, b: ScalarField) -> ScalarField:
        return a / b

    @v_args(inline=True)
    def neg(self, a: ScalarField) -> ScalarField:
        return -a

    @v_args(inline=True)
    def raised(self, base: ScalarField, exponent: Token) -> ScalarField:
        value = int(exponent)
        if value > MAX_EXPONENT:
            msg = f"Exponent {value} at position {exponent.start_pos} exceeds {MAX_EXPONENT}"
            raise ExponentOverflowError(msg)
        return base**value

    @v_args(inline=True)
    def negative_power(self, _base: ScalarField, exponent: Token) -> ScalarField:
        msg = f"Negative exponent -{exponent}"
        raise NegativeExponentError(msg, exponent.start_pos or 0)


def parse_expression(src: str, chart: Chart | CoordinateRing) -> ScalarField:
    """Parse an expression into an exact rational function on the chart.

    Args:
        src: Expression text, e.g. `"x^2*t - 1/2"`.
        chart: Chart (or bare coordinate ring) whose coordinates may appear in `src`.

    Returns:
        The normalized `ScalarField`.

    Raises:
        ExpressionSyntaxError: If `src` does not match the grammar.
        UnknownIdentifierError: If a name is not a chart coordinate.
        NegativeExponentError: If `^` is followed by a negative exponent.
        DivisionByZeroFieldError: If the expression divides by the zero function.

    Example:
        ```python
        chart = minkowski_chart()
        parse_expression("(t^2-x^2)/(t-x)", chart) == parse_expression("t + x", chart)
        ```
    """
    ring = chart.ring if isinstance(chart, Chart) else chart
    try:
        tree = _PARSER.parse(src)
    except UnexpectedInput as exc:
        position = _error_position(exc, src)
        msg = f"Unexpected input {src[position]!r}" if position < len(src) else "Unexpected end of expression"
        raise ExpressionSyntaxError(msg, position) from exc
    try:
        return _FieldBuilder(ring).transform(tree)
    except VisitError as exc:
        raise exc.orig_exc from None


def _error_position(exc: UnexpectedInput, src: str) -> int:
    if isinstance(exc, UnexpectedEOF) or (isinstance(exc, UnexpectedToken) and exc.token.type == "$END"):
        return len(src)
    position = exc.pos_in_stream
    return position if position is not None and 0 <= position < len(src) else len(src)


def render_expression(value: ScalarField) -> str:
    """Canonical text of a field; `parse_expression(render_expression(f))` equals `f`."""
    return value.render()
