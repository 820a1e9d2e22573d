import math
import re
import typing

from enum import Enum
from fractions import Fraction


Rat = Fraction

_RATIONAL_PATTERN = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")


class QS3:
    """Exact element `a + b·√3` of the quadratic field Q(√3).

    Both components are kept as reduced `Fraction` values, so two equal field
    elements always have identical components. Elements with `b == 0` compare
    and hash equal to the corresponding `Fraction`.
    """

    __slots__ = ("_a", "_b")

    def __init__(self, a: typing.Union[int, Fraction] = 0, b: typing.Union[int, Fraction] = 0):
        self._a = Fraction(a)
        self._b = Fraction(b)

    @property
    def a(self) -> Fraction:
        return self._a

    @property
    def b(self) -> Fraction:
        return self._b

    @property
    def is_rational(self) -> bool:
        return self._b == 0

    @staticmethod
    def _coerce(value: typing.Any) -> typing.Optional["QS3"]:
        if isinstance(value, QS3):
            return value
        if isinstance(value, (int, Fraction)):
            return QS3(value, 0)
        return None

    def conjugate(self) -> "QS3":
        return QS3(self._a, -self._b)

    def norm(self) -> Fraction:
        """Field norm `a² − 3b²`, zero only for the zero element"""
        return self._a * self._a - 3 * self._b * self._b

    def sign(self) -> int:
        sa = _rational_sign(self._a)
        sb = _rational_sign(self._b)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb

        # opposite signs: the larger of a² and 3b² wins
        return sa if self.norm() > 0 else sb

    def __add__(self, other):
        other = QS3._coerce(other)
        if other is None:
            return NotImplemented
        return QS3(self._a + other._a, self._b + other._b)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        other = QS3._coerce(other)
        if other is None:
            return NotImplemented
        return QS3(self._a - other._a, self._b - other._b)

    def __rsub__(self, other):
        other = QS3._coerce(other)
        if other is None:
            return NotImplemented
        return other.__sub__(self)

    def __mul__(self, other):
        other = QS3._coerce(other)
        if other is None:
            return NotImplemented
        return QS3(self._a * other._a + 3 * self._b * other._b,
                   self._a * other._b + self._b * other._a)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        other = QS3._coerce(other)
        if other is None:
            return NotImplemented

        norm = other.norm()
        if norm == 0:
            raise ZeroDivisionError("QS3 division by zero")

        numerator = self * other.conjugate()
        return QS3(numerator._a / norm, numerator._b / norm)

    def __rtruediv__(self, other):
        other = QS3._coerce(other)
        if other is None:
            return NotImplemented
        return other.__truediv__(self)

    def __pow__(self, exponent: int) -> "QS3":
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return QS3(1) / (self ** -exponent)

        result = QS3(1)
        base = self
        while exponent > 0:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __neg__(self) -> "QS3":
        return QS3(-self._a, -self._b)

    def __pos__(self) -> "QS3":
        return self

    def __abs__(self) -> "QS3":
        return -self if self.sign() < 0 else self

    def __bool__(self) -> bool:
        return self._a != 0 or self._b != 0

    def __eq__(self, other) -> bool:
        other = QS3._coerce(other)
        if other is None:
            return NotImplemented
        return self._a == other._a and self._b == other._b

    def __hash__(self) -> int:
        if self._b == 0:
            return hash(self._a)
        return hash((self._a, self._b))

    def _compare(self, other) -> typing.Optional[int]:
        other = QS3._coerce(other)
        if other is None:
            return None
        return (self - other).sign()

    def __lt__(self, other):
        result = self._compare(other)
        return NotImplemented if result is None else result < 0

    def __le__(self, other):
        result = self._compare(other)
        return NotImplemented if result is None else result <= 0

    def __gt__(self, other):
        result = self._compare(other)
        return NotImplemented if result is None else result > 0

    def __ge__(self, other):
        result = self._compare(other)
        return NotImplemented if result is None else result >= 0

    def __float__(self) -> float:
        return float(self._a) + float(self._b) * math.sqrt(3)

    def __repr__(self) -> str:
        return f"QS3({self._a}, {self._b})"

    def __str__(self) -> str:
        return format_scalar(self)


Scalar = typing.Union[Fraction, QS3]

SQRT3 = QS3(0, 1)


class ArithOp(Enum):
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"


def qs3_arith(x: QS3, y: QS3, op: ArithOp) -> QS3:
    """Exact field operation on two QS3 values.

    Raises
    ------
    ZeroDivisionError
        For `ArithOp.DIV` when `y` is zero
    """
    x = QS3._coerce(x)
    y = QS3._coerce(y)
    if op is ArithOp.ADD:
        return x + y
    elif op is ArithOp.SUB:
        return x - y
    elif op is ArithOp.MUL:
        return x * y
    return x / y


def _rational_sign(value: Fraction) -> int:
    return (value > 0) - (value < 0)


def sign(value: typing.Union[int, Scalar]) -> int:
    """Exact sign of a rational or QS3 value: -1, 0 or +1"""
    if isinstance(value, QS3):
        return value.sign()
    return _rational_sign(value)


def to_scalar(value: typing.Any) -> Scalar:
    """Converts int, Fraction, QS3 or scalar text into an exact scalar"""
    if isinstance(value, QS3):
        return value
    if isinstance(value, str):
        return parse_scalar(value)
    if isinstance(value, float):
        raise TypeError(f"Refusing to convert float {value} implicitly, use `rationalize`")
    return Fraction(value)


def rationalize(value: float, denom_bound: int) -> Fraction:
    """Best rational approximation of `value` with denominator at most `denom_bound`.

    Parameters
    ----------
    value : float
        Finite real number produced by a numeric routine
    denom_bound : int
        Largest admissible denominator (>= 1)
    """
    if not math.isfinite(value):
        raise ValueError(f"Cannot rationalize non-finite value {value}")
    if denom_bound < 1:
        raise ValueError(f"Denominator bound has to be positive, got {denom_bound}")

    return Fraction(value).limit_denominator(denom_bound)


def sqrt3_bounds(digits: int = 12) -> typing.Tuple[Fraction, Fraction]:
    """Rational bounds `lower < √3 < upper` with `10**-digits` spacing"""
    scale = 10 ** digits
    root = math.isqrt(3 * scale * scale)
    return Fraction(root, scale), Fraction(root + 1, scale)


def rational_lower_bound(value: typing.Union[int, Scalar], digits: int = 12) -> Fraction:
    if not isinstance(value, QS3):
        return Fraction(value)

    lower, upper = sqrt3_bounds(digits)
    return value.a + value.b * (lower if value.b >= 0 else upper)


def _format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_scalar(value: typing.Union[int, Scalar]) -> str:
    """Canonical text: `p/q` for rationals, `p/q~u/v` for `p/q + (u/v)√3`"""
    if isinstance(value, QS3):
        if value.b == 0:
            return _format_rational(value.a)
        return f"{_format_rational(value.a)}~{_format_rational(value.b)}"
    return _format_rational(Fraction(value))


def _parse_rational(text: str) -> Fraction:
    match = _RATIONAL_PATTERN.match(text)
    if match is None:
        raise ValueError(f"Malformed rational `{text}`")

    denominator = int(match.group(2)) if match.group(2) is not None else 1
    if denominator == 0:
        raise ValueError(f"Zero denominator in `{text}`")

    return Fraction(int(match.group(1)), denominator)


def parse_scalar(text: str) -> Scalar:
    """Parses the shared scalar syntax, see `format_scalar`"""
    text = text.strip()
    if "~" in text:
        rational_part, root_part = text.split("~", 1)
        return QS3(_parse_rational(rational_part), _parse_rational(root_part))

    return _parse_rational(text)


def bit_length(value: typing.Union[int, Scalar]) -> int:
    """Largest bit size among the numerators and denominators of `value`"""
    if isinstance(value, QS3):
        return max(bit_length(value.a), bit_length(value.b))

    value = Fraction(value)
    return max(abs(value.numerator).bit_length(), value.denominator.bit_length())
