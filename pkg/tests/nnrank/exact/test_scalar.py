import math
import mpmath
import numpy as np
import pytest

from fractions import Fraction

from nnrank.exact.scalar import (
    QS3,
    SQRT3,
    ArithOp,
    bit_length,
    format_scalar,
    parse_scalar,
    qs3_arith,
    rational_lower_bound,
    rationalize,
    sign,
    sqrt3_bounds,
    to_scalar
)


class TestQS3:
    def test_sqrt3_squares_to_three(self):
        assert SQRT3 * SQRT3 == 3
        assert (SQRT3 * SQRT3).is_rational

    @pytest.mark.parametrize("x, y, op, expected", [
        (QS3(1, 1), QS3(2, -1), ArithOp.ADD, QS3(3, 0)),
        (QS3(1, 1), QS3(2, -1), ArithOp.SUB, QS3(-1, 2)),
        (QS3(1, 1), QS3(1, -1), ArithOp.MUL, QS3(-2, 0)),
        (QS3(-2, 0), QS3(1, -1), ArithOp.DIV, QS3(1, 1)),
        (QS3(Fraction(1, 2), 0), QS3(0, 1), ArithOp.DIV, QS3(0, Fraction(1, 6))),
    ])
    def test_arith(self, x, y, op, expected):
        assert qs3_arith(x, y, op) == expected

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            qs3_arith(QS3(1, 1), QS3(0, 0), ArithOp.DIV)

    @pytest.mark.parametrize("value, expected", [
        (QS3(0, 0), 0),
        (QS3(2, -1), 1),
        (QS3(1, -1), -1),
        (QS3(-2, 1), -1),
        (QS3(-1, 1), 1),
        (QS3(0, -3), -1),
        (QS3(Fraction(7, 4), -1), 1),
        (QS3(Fraction(173, 100), -1), -1),
    ])
    def test_sign(self, value, expected):
        assert value.sign() == expected
        assert sign(value) == expected

    def test_sign_agrees_with_float(self):
        for a in range(-4, 5):
            for b in range(-3, 4):
                value = QS3(a, b)
                approx = float(value)
                assert value.sign() == (approx > 0) - (approx < 0)

    def test_ordering_and_mixed_types(self):
        assert QS3(1, 1) > 2
        assert QS3(2, -1) < 1
        assert 1 + SQRT3 == QS3(1, 1)
        assert 2 - SQRT3 == QS3(2, -1)
        assert QS3(3, 0) == Fraction(3)
        assert hash(QS3(3, 0)) == hash(Fraction(3))

    def test_power(self):
        assert QS3(1, 1) ** 2 == QS3(4, 2)
        assert QS3(2, 1) ** -1 == QS3(2, -1)
        assert QS3(5, 7) ** 0 == 1

    def test_float(self):
        assert math.isclose(float(QS3(1, 1)), 1 + math.sqrt(3))

    @pytest.mark.parametrize("seed", range(50))
    def test_field_axioms(self, seed):
        rng = np.random.default_rng(seed)
        x, y, z = (QS3(Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 7))),
                       Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 7)))) for _ in range(3))

        assert x + y == y + x
        assert x * y == y * x
        assert (x + y) + z == x + (y + z)
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert x + 0 == x and x * 1 == x
        assert x + (-x) == 0
        assert x - y == x + (-y)
        if x != 0:
            assert x * (1 / x) == 1
            assert (y / x) * x == y
        assert x.norm() == x.a ** 2 - 3 * x.b ** 2
        assert sign(x - y) == (float(x) > float(y)) - (float(x) < float(y))


class TestScalarHelpers:
    @pytest.mark.parametrize("text, expected", [
        ("3", Fraction(3)),
        ("-3/6", Fraction(-1, 2)),
        ("1/2~-1/3", QS3(Fraction(1, 2), Fraction(-1, 3))),
        ("0~1", SQRT3),
    ])
    def test_parse_scalar(self, text, expected):
        assert parse_scalar(text) == expected

    @pytest.mark.parametrize("text", ["1.5", "1/0", "", "a/b", "1/2~"])
    def test_parse_scalar_malformed(self, text):
        with pytest.raises(ValueError):
            parse_scalar(text)

    @pytest.mark.parametrize("value, expected", [
        (Fraction(4, 2), "2"),
        (Fraction(-1, 3), "-1/3"),
        (QS3(0, 1), "0~1"),
        (QS3(Fraction(1, 2), 0), "1/2"),
    ])
    def test_format_scalar(self, value, expected):
        assert format_scalar(value) == expected

    def test_to_scalar_rejects_float(self):
        with pytest.raises(TypeError):
            to_scalar(0.5)

        assert to_scalar(2) == Fraction(2)
        assert to_scalar("1/3") == Fraction(1, 3)

    def test_rationalize(self):
        assert rationalize(0.333333333, 10) == Fraction(1, 3)
        assert rationalize(math.pi, 1000) == Fraction(355, 113)
        assert rationalize(3.14159265, 120) == Fraction(355, 113)

        with pytest.raises(ValueError):
            rationalize(float("nan"), 10)
        with pytest.raises(ValueError):
            rationalize(0.5, 0)

    def test_sqrt3_bounds(self):
        lower, upper = sqrt3_bounds(6)
        assert lower * lower < 3 < upper * upper
        assert upper - lower == Fraction(1, 10 ** 6)

    def test_rational_lower_bound(self):
        assert rational_lower_bound(Fraction(1, 2)) == Fraction(1, 2)
        for value in [QS3(1, 1), QS3(1, -1), QS3(-3, 2)]:
            bound = rational_lower_bound(value)
            assert bound <= value
            assert float(value) - float(bound) < 1e-9

    def test_bit_length(self):
        assert bit_length(Fraction(255, 2)) == 8
        assert bit_length(QS3(1, Fraction(1, 1024))) == 11


def _mp(value: Fraction) -> mpmath.mpf:
    return mpmath.mpf(value.numerator) / value.denominator


class TestHighPrecision:
    # solutions of a^2 - 3*b^2 = 1, so a - b*√3 = 1 / (a + b*√3)
    PELL = [(2, 1), (7, 4), (26, 15), (97, 56), (362, 209), (1351, 780), (70226, 40545), (3650401, 2107560)]

    @pytest.mark.parametrize("a, b", PELL)
    def test_sign_near_zero(self, a, b):
        with mpmath.workdps(80):
            for value in [QS3(a, -b), QS3(-a, b), QS3(a, -b - 1), QS3(a + 1, -b)]:
                expected = mpmath.sign(_mp(value.a) + _mp(value.b) * mpmath.sqrt(3))
                assert sign(value) == int(expected)

    @pytest.mark.parametrize("digits", [6, 12, 30])
    def test_sqrt3_bounds_bracket(self, digits):
        lower, upper = sqrt3_bounds(digits)
        with mpmath.workdps(digits + 20):
            assert _mp(lower) < mpmath.sqrt(3) < _mp(upper)

    def test_float_conversion(self):
        value = QS3(Fraction(1, 3), Fraction(-2, 7))
        with mpmath.workdps(40):
            expected = _mp(value.a) + _mp(value.b) * mpmath.sqrt(3)
        assert float(value) == pytest.approx(float(expected), rel=1e-15)
