from fractions import Fraction

import pytest
from hypothesis import given

from observerforms.cli.expressions import parse_expression, render_expression
from observerforms.errors import (
    DivisionByZeroFieldError,
    ExponentOverflowError,
    ExpressionSyntaxError,
    NegativeExponentError,
    UnknownIdentifierError,
)
from observerforms.ratfunc import CoordinateRing
from tests.utils import CHART, SLOW, field, rational_fields

ROUND_TRIP_CORPUS = [
    "0",
    "1",
    "-1",
    "5/3",
    "-4/3",
    "t",
    "x",
    "-y",
    "z^2",
    "t*x",
    "t + x",
    "t - x",
    "x - t",
    "2*x",
    "x/2",
    "3/2*x^2*y",
    "-3/2*t*x^2 + y",
    "x^2 + y^2 + z^2 - t^2",
    "(t + x)^2",
    "(t - x)*(t + x)",
    "(t^2-x^2)/(t-x)",
    "1/x",
    "1/(x + 1)",
    "-1/(x - 1)",
    "x/(y*z)",
    "(x + y)/(x - y)",
    "(1 + t)/(1 - t)^2",
    "t^3 - 3*t*x^2",
    "x^10",
    "2^10",
    "2^0",
    "--x",
    "-(x + y)",
    "- - -t",
    "x*y*z*t",
    "x*(y + z)",
    "(x)",
    "((x))",
    "x / y / z",
    "x / (y / z)",
    "1/2/3",
    "100000000000000000000*x",
    "x/100000000000000000000",
    "7*x - 7*x",
    "(x^2 - 1)/(x - 1)",
    "(x*y + y)/(x + 1)",
    "t^2*x + t*x^2",
    "1/(t^2 + x^2)",
    "(t + 1)/(2*t + 2)",
    "  x  +  y  ",
    "-x^2",
    "(-x)^2",
    "x - -y",
    "3*(x - y)/(6*x - 6*y)",
]


class TestParse:
    def test_precedence(self):
        assert parse_expression("1 + 2*x^2", CHART) == 1 + 2 * field("x") ** 2
        assert parse_expression("-x^2", CHART) == -(field("x") ** 2)
        assert parse_expression("(-x)^2", CHART) == field("x") ** 2

    def test_left_associative(self):
        assert parse_expression("x - y - z", CHART) == field("x") - field("y") - field("z")
        assert parse_expression("8/4/2", CHART) == 1

    def test_rational_literals(self):
        assert parse_expression("5/3", CHART).constant_value() == Fraction(5, 3)
        assert parse_expression("5/3", CHART) * 3 == 5

    def test_big_integers(self):
        value = parse_expression("123456789012345678901234567890*x", CHART)
        assert value.partial("x").constant_value() == 123456789012345678901234567890

    def test_cancels(self):
        assert parse_expression("(t^2-x^2)/(t-x)", CHART) == parse_expression("t + x", CHART)

    def test_bare_coordinate_ring(self):
        ring = CoordinateRing(("u", "v"))
        assert parse_expression("u*v", ring) == ring.coordinate("u") * ring.coordinate("v")

    @pytest.mark.parametrize("src", ROUND_TRIP_CORPUS)
    def test_round_trip_corpus(self, src):
        value = parse_expression(src, CHART)
        assert parse_expression(render_expression(value), CHART) == value
        assert render_expression(parse_expression(render_expression(value), CHART)) == render_expression(value)

    @SLOW
    @given(rational_fields())
    def test_round_trip_random(self, value):
        assert parse_expression(render_expression(value), CHART) == value


class TestErrors:
    def test_unknown_identifier_position(self):
        with pytest.raises(UnknownIdentifierError) as info:
            parse_expression("x + w", CHART)
        assert info.value.position == 4

    def test_negative_exponent(self):
        with pytest.raises(NegativeExponentError):
            parse_expression("x^-2", CHART)

    @pytest.mark.parametrize(
        ("src", "position"),
        [
            ("x +", 3),
            ("(x", 2),
            ("x)", 1),
            ("x $ y", 2),
            ("", 0),
            ("x ^ y", 4),
            ("1.5", 1),
        ],
    )
    def test_syntax_error_position(self, src, position):
        with pytest.raises(ExpressionSyntaxError) as info:
            parse_expression(src, CHART)
        assert info.value.position == position

    def test_division_by_zero(self):
        with pytest.raises(DivisionByZeroFieldError):
            parse_expression("1/(x - x)", CHART)

    def test_exponent_overflow(self):
        with pytest.raises(ExponentOverflowError):
            parse_expression("x^99999999999", CHART)
