import itertools
import numpy as np
import typing

from dataclasses import dataclass

from nnrank.errors import CapExceededError, DimensionError, FactorizationError
from nnrank.exact.matrix import ExactMatrix, IndexSet, exact_equal, is_nonnegative, zeros
from nnrank.exact.simplex import nonneg_solve
from nnrank.settings import MAX_INNER_DIMENSION


@dataclass(frozen=True, eq=False)
class Factorization:
    """Pair `(A, W)` with `A` of shape (m, r) and `W` of shape (r, n)"""

    A: ExactMatrix
    W: ExactMatrix

    def __post_init__(self):
        if self.A.ndim != 2 or self.W.ndim != 2 or self.A.shape[1] != self.W.shape[0]:
            raise DimensionError(f"Inner dimensions don't agree: A{self.A.shape} W{self.W.shape}")

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.W.shape[1]

    @property
    def r(self) -> int:
        return self.A.shape[1]

    def product(self) -> ExactMatrix:
        if self.r == 0:
            return zeros(self.m, self.n)
        return self.A @ self.W

    def is_nonnegative(self) -> bool:
        return is_nonnegative(self.A) and is_nonnegative(self.W)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Factorization):
            return NotImplemented
        return exact_equal(self.A, other.A) and exact_equal(self.W, other.W)


@dataclass(frozen=True)
class SupportProfile:
    """Supports of the columns of `W` and of the rows of `A`"""

    column_supports: typing.Tuple[IndexSet, ...]
    row_supports: typing.Tuple[IndexSet, ...]


def support(vector: typing.Sequence) -> IndexSet:
    return tuple(index for index, value in enumerate(vector) if value != 0)


def support_profile(factorization: Factorization) -> SupportProfile:
    return SupportProfile(
        column_supports=tuple(support(factorization.W[:, i]) for i in range(factorization.n)),
        row_supports=tuple(support(factorization.A[j, :]) for j in range(factorization.m)))


def lex_key(subset: IndexSet) -> typing.Tuple[int, IndexSet]:
    """Sort key of the order: smaller size first, then lexicographic on sorted elements"""
    return len(subset), tuple(sorted(subset))


def lex_compare_subsets(left: IndexSet, right: IndexSet) -> int:
    left_key, right_key = lex_key(left), lex_key(right)
    return (left_key > right_key) - (left_key < right_key)


def lex_less(left: IndexSet, right: IndexSet) -> bool:
    return lex_compare_subsets(left, right) < 0


def iter_subsets(size: int) -> typing.Iterator[IndexSet]:
    """All subsets of `range(size)` in the size-then-lex order"""
    for count in range(size + 1):
        yield from itertools.combinations(range(size), count)


def lex_first_admissible_with_witness(
        matrix: ExactMatrix,
        vector: np.ndarray) -> typing.Optional[typing.Tuple[IndexSet, np.ndarray]]:
    """First admissible support of `vector` for `matrix` together with a witness.

    A subset `S` is admissible when some `x ≥ 0` with `supp(x) ⊆ S` solves
    `matrix·x == vector`. The witness returned has support exactly `S`: a
    witness with a strictly smaller support would make a smaller subset
    admissible, contradicting minimality.
    """
    inner = matrix.shape[1]
    if inner > MAX_INNER_DIMENSION:
        raise CapExceededError(f"Inner dimension {inner} exceeds the cap {MAX_INNER_DIMENSION}")
    if matrix.shape[0] != len(vector):
        raise DimensionError(f"Vector of length {len(vector)} doesn't match matrix {matrix.shape}")

    for subset in iter_subsets(inner):
        witness = nonneg_solve(matrix, subset, vector)
        if witness is not None:
            return subset, witness

    return None


def lex_first_admissible(matrix: ExactMatrix, vector: np.ndarray) -> typing.Optional[IndexSet]:
    found = lex_first_admissible_with_witness(matrix, vector)
    return None if found is None else found[0]


def verify_factorization(M: ExactMatrix, factorization: Factorization) -> bool:
    """Whether `(A, W)` is a nonnegative factorization of `M`.

    Raises
    ------
    DimensionError
        If the outer dimensions don't match `M`
    """
    if (factorization.m, factorization.n) != M.shape:
        raise DimensionError(f"Factorization of shape {(factorization.m, factorization.n)} "
                             f"doesn't match matrix of shape {M.shape}")

    return factorization.is_nonnegative() and exact_equal(factorization.product(), M)


def is_stable(M: ExactMatrix, factorization: Factorization) -> bool:
    """Every column of `W` and every row of `A` carries the first admissible support"""
    if not verify_factorization(M, factorization):
        raise FactorizationError("Not a nonnegative factorization of M")

    A, W = factorization.A, factorization.W
    for i in range(factorization.n):
        if lex_first_admissible(A, M[:, i]) != support(W[:, i]):
            return False

    for j in range(factorization.m):
        if lex_first_admissible(W.T, M[j, :]) != support(A[j, :]):
            return False

    return True


def pad_factorization(factorization: Factorization, r: int) -> Factorization:
    """Extends the inner dimension to `r` with zero columns of `A` and zero rows of `W`"""
    if r < factorization.r:
        raise ValueError(f"Can't pad inner dimension {factorization.r} down to {r}")

    A = zeros(factorization.m, r)
    W = zeros(r, factorization.n)
    A[:, :factorization.r] = factorization.A
    W[:factorization.r, :] = factorization.W
    return Factorization(A, W)
