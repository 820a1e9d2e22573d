import functools
import itertools
import typing

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from nnrank.exact.matrix import IndexSet
from nnrank.exact.scalar import Scalar


class Mode(Enum):
    TAKE1 = "take1"
    TAKE2 = "take2"


class Role(Enum):
    A_U = "A_U"
    W_V = "W_V"
    B = "B"
    C = "C"


@dataclass(frozen=True)
class Variable:
    """Binding of a variable to a matrix entry, e.g. `A_U[0,2]` or `B[1,0,1]`"""

    role: Role
    coords: typing.Tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.role.value}[{','.join(str(c) for c in self.coords)}]"


@dataclass(frozen=True)
class Monomial:
    coefficient: Scalar
    # sparse exponent vector: (variable index, exponent) pairs sorted by index
    exponents: typing.Tuple[typing.Tuple[int, int], ...] = ()

    def __post_init__(self):
        assert all(exponent > 0 for _, exponent in self.exponents)

    @property
    def degree(self) -> int:
        return sum(exponent for _, exponent in self.exponents)

    def evaluate(self, point: typing.Sequence[Scalar]) -> Scalar:
        value = self.coefficient
        for index, exponent in self.exponents:
            value = value * point[index] ** exponent
        return value


@dataclass(frozen=True)
class Polynomial:
    family: str
    indices: typing.Tuple[int, ...]
    monomials: typing.Tuple[Monomial, ...]

    @property
    def name(self) -> str:
        return f"{self.family}[{','.join(str(i) for i in self.indices)}]"

    @property
    def degree(self) -> int:
        return max((monomial.degree for monomial in self.monomials), default=0)

    def variables(self) -> typing.Set[int]:
        return {index for monomial in self.monomials for index, _ in monomial.exponents}

    def evaluate(self, point: typing.Sequence[Scalar]) -> Scalar:
        return sum((monomial.evaluate(point) for monomial in self.monomials), Fraction(0))


@dataclass(frozen=True)
class SystemMeta:
    m: int
    n: int
    r: int
    s: int
    t: int
    U: IndexSet
    V: IndexSet
    p: int
    q: int


def column_subsets(r: int, size: int) -> typing.List[IndexSet]:
    return list(itertools.combinations(range(r), size))


@dataclass(frozen=True)
class PolySystem:
    mode: Mode
    variables: typing.Tuple[Variable, ...]
    polynomials: typing.Tuple[Polynomial, ...]
    meta: SystemMeta

    @property
    def var_count(self) -> int:
        return len(self.variables)

    @functools.cached_property
    def lookup(self) -> typing.Dict[typing.Tuple[str, typing.Tuple[int, ...]], Polynomial]:
        return {(polynomial.family, polynomial.indices): polynomial for polynomial in self.polynomials}

    def counts(self) -> typing.Dict[str, int]:
        return dict(Counter(polynomial.family for polynomial in self.polynomials))

    @property
    def max_degree(self) -> int:
        return max((polynomial.degree for polynomial in self.polynomials), default=0)

    def referenced_variables(self) -> typing.Set[int]:
        return set().union(*(polynomial.variables() for polynomial in self.polynomials))
