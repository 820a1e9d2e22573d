import numpy as np
import typing

from enum import Enum
from fractions import Fraction

from nnrank.exact.scalar import QS3, Scalar, bit_length, to_scalar


ExactMatrix = np.ndarray
IndexSet = typing.Tuple[int, ...]


class Field(Enum):
    RAT = "rat"
    QS3 = "qs3"


def exact_matrix(rows: typing.Any) -> ExactMatrix:
    """Builds a 2-D object array of exact scalars.

    Parameters
    ----------
    rows : Any
        Nested sequence or numpy array of ints, Fractions, QS3 values or scalar strings
    """
    source = np.asarray(rows, dtype=object)
    if source.ndim != 2:
        raise ValueError(f"Expected a 2-D matrix, got {source.ndim} dimension(s)")

    result = np.empty(source.shape, dtype=object)
    for index, value in np.ndenumerate(source):
        result[index] = to_scalar(value)

    return result


def exact_vector(values: typing.Iterable[typing.Any]) -> np.ndarray:
    values = list(values)
    result = np.empty(len(values), dtype=object)
    for index, value in enumerate(values):
        result[index] = to_scalar(value)
    return result


def zeros(rows: int, cols: int) -> ExactMatrix:
    result = np.empty((rows, cols), dtype=object)
    result.fill(Fraction(0))
    return result


def zero_vector(size: int) -> np.ndarray:
    result = np.empty(size, dtype=object)
    result.fill(Fraction(0))
    return result


def identity(size: int) -> ExactMatrix:
    result = zeros(size, size)
    for index in range(size):
        result[index, index] = Fraction(1)
    return result


def matmul(left: ExactMatrix, right: ExactMatrix) -> ExactMatrix:
    """Exact product that also handles an empty inner dimension"""
    if left.shape[-1] != right.shape[0]:
        raise ValueError(f"Cannot multiply {left.shape} by {right.shape}")

    if left.shape[-1] == 0:
        shape = left.shape[:-1] + right.shape[1:]
        result = np.empty(shape, dtype=object)
        result.fill(Fraction(0))
        return result

    return left @ right


def field_of(matrix: np.ndarray) -> Field:
    for value in matrix.flat:
        if isinstance(value, QS3):
            return Field.QS3
    return Field.RAT


def is_nonnegative(matrix: np.ndarray) -> bool:
    return all(value >= 0 for value in matrix.flat)


def is_zero(matrix: np.ndarray) -> bool:
    return all(value == 0 for value in matrix.flat)


def exact_equal(left: np.ndarray, right: np.ndarray) -> bool:
    if left.shape != right.shape:
        return False
    return all(x == y for x, y in zip(left.flat, right.flat))


def index_set(indices: typing.Iterable[int]) -> IndexSet:
    """Sorted tuple of distinct indices"""
    indices = tuple(sorted(int(index) for index in indices))
    if len(set(indices)) != len(indices):
        raise ValueError(f"Index set contains duplicates: {indices}")
    return indices


def as_float(matrix: np.ndarray) -> np.ndarray:
    return np.array([float(value) for value in matrix.flat], dtype=np.float64).reshape(matrix.shape)


def max_bit_length(matrix: np.ndarray) -> int:
    return max((bit_length(value) for value in matrix.flat), default=0)


def block_diagonal(blocks: typing.Sequence[ExactMatrix]) -> ExactMatrix:
    rows = sum(block.shape[0] for block in blocks)
    cols = sum(block.shape[1] for block in blocks)
    result = zeros(rows, cols)

    row, col = 0, 0
    for block in blocks:
        result[row:row + block.shape[0], col:col + block.shape[1]] = block
        row += block.shape[0]
        col += block.shape[1]

    return result


def scalar_zero(like: typing.Optional[Scalar] = None) -> Scalar:
    if isinstance(like, QS3):
        return QS3(0)
    return Fraction(0)
