import math
import numpy as np
import typing

from enum import Enum
from fractions import Fraction

from nnrank.errors import SingularMatrixError
from nnrank.exact.matrix import ExactMatrix, Field, IndexSet, field_of, identity, zeros
from nnrank.exact.scalar import Scalar


class Axis(Enum):
    ROWS = "rows"
    COLS = "cols"


def _first_nonzero(vector: typing.Sequence[Scalar]) -> typing.Optional[int]:
    for index, value in enumerate(vector):
        if value != 0:
            return index
    return None


def rank_and_basis(matrix: ExactMatrix, axis: typing.Union[Axis, str] = Axis.ROWS) -> typing.Tuple[int, IndexSet]:
    """Rank of `matrix` and the lexicographically first maximal independent set
    of rows (or columns), found by greedy elimination in index order.

    Parameters
    ----------
    matrix : ExactMatrix
        2-D object array of exact scalars
    axis : Axis
        Whether to select rows or columns

    Returns
    -------
    typing.Tuple[int, IndexSet]
        Rank and the selected indices in increasing order
    """
    axis = Axis(axis)
    vectors = matrix if axis is Axis.ROWS else matrix.T

    # reduced basis: every vector has 1 at its pivot and 0 at the other pivots
    basis: typing.List[typing.Tuple[int, typing.List[Scalar]]] = []
    chosen = []
    for index in range(vectors.shape[0]):
        vector = list(vectors[index])
        for pivot, reduced in basis:
            factor = vector[pivot]
            if factor != 0:
                vector = [x - factor * y for x, y in zip(vector, reduced)]

        pivot = _first_nonzero(vector)
        if pivot is None:
            continue

        head = vector[pivot]
        vector = [x / head for x in vector]
        for position, (other_pivot, reduced) in enumerate(basis):
            factor = reduced[pivot]
            if factor != 0:
                basis[position] = (other_pivot, [x - factor * y for x, y in zip(reduced, vector)])
        basis.append((pivot, vector))
        chosen.append(index)

    return len(chosen), tuple(chosen)


def rank(matrix: ExactMatrix) -> int:
    return rank_and_basis(matrix, Axis.ROWS)[0]


def _check_square(matrix: ExactMatrix):
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {matrix.shape}")


def _bareiss(matrix: ExactMatrix) -> Fraction:
    """Fraction-free determinant after clearing row denominators"""
    size = matrix.shape[0]
    scale = 1
    rows = []
    for row in matrix:
        row = [Fraction(value) for value in row]
        multiplier = math.lcm(*(value.denominator for value in row))
        rows.append([int(value * multiplier) for value in row])
        scale *= multiplier

    sign, previous = 1, 1
    for k in range(size - 1):
        if rows[k][k] == 0:
            swap = next((i for i in range(k + 1, size) if rows[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            rows[k], rows[swap] = rows[swap], rows[k]
            sign = -sign

        for i in range(k + 1, size):
            for j in range(k + 1, size):
                rows[i][j] = (rows[i][j] * rows[k][k] - rows[i][k] * rows[k][j]) // previous
        previous = rows[k][k]

    return Fraction(sign * rows[size - 1][size - 1], scale)


def _gaussian_determinant(matrix: ExactMatrix) -> Scalar:
    rows = [list(row) for row in matrix]
    size = len(rows)
    result = Fraction(1)
    for k in range(size):
        pivot = next((i for i in range(k, size) if rows[i][k] != 0), None)
        if pivot is None:
            return rows[0][0] * 0
        if pivot != k:
            rows[k], rows[pivot] = rows[pivot], rows[k]
            result = -result

        result = result * rows[k][k]
        for i in range(k + 1, size):
            factor = rows[i][k] / rows[k][k]
            if factor != 0:
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[k])]

    return result


def determinant(matrix: ExactMatrix) -> Scalar:
    _check_square(matrix)
    if matrix.shape[0] == 0:
        return Fraction(1)
    if field_of(matrix) is Field.RAT:
        return _bareiss(matrix)
    return _gaussian_determinant(matrix)


def inverse(matrix: ExactMatrix) -> ExactMatrix:
    """Gauss-Jordan inverse.

    Raises
    ------
    SingularMatrixError
        If `matrix` is singular
    """
    _check_square(matrix)
    size = matrix.shape[0]
    rows = [list(matrix[i]) + list(identity(size)[i]) for i in range(size)]

    for k in range(size):
        pivot = next((i for i in range(k, size) if rows[i][k] != 0), None)
        if pivot is None:
            raise SingularMatrixError(f"Matrix of shape {matrix.shape} is singular")
        rows[k], rows[pivot] = rows[pivot], rows[k]

        head = rows[k][k]
        rows[k] = [value / head for value in rows[k]]
        for i in range(size):
            factor = rows[i][k]
            if i != k and factor != 0:
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[k])]

    result = zeros(size, size)
    for i in range(size):
        result[i, :] = rows[i][size:]
    return result


def det_adjugate(matrix: ExactMatrix) -> typing.Tuple[Scalar, ExactMatrix]:
    """Determinant and adjugate, `adj(R)·R = det(R)·I`"""
    _check_square(matrix)
    size = matrix.shape[0]
    det = determinant(matrix)
    if det != 0:
        return det, inverse(matrix) * det

    adjugate = zeros(size, size)
    if size == 1:
        adjugate[0, 0] = Fraction(1)
        return det, adjugate

    for i in range(size):
        for j in range(size):
            minor = np.delete(np.delete(matrix, i, axis=0), j, axis=1)
            cofactor = determinant(minor)
            adjugate[j, i] = cofactor if (i + j) % 2 == 0 else -cofactor

    return det, adjugate


def solve(matrix: ExactMatrix, rhs: np.ndarray) -> np.ndarray:
    return inverse(matrix) @ rhs


def rank_certificate(matrix: ExactMatrix) -> typing.Tuple[IndexSet, IndexSet]:
    """Rows and columns of a nonsingular square submatrix of size `rank(matrix)`"""
    _, rows = rank_and_basis(matrix, Axis.ROWS)
    _, cols = rank_and_basis(matrix[list(rows), :], Axis.COLS)
    return rows, cols


def nullspace(matrix: ExactMatrix) -> ExactMatrix:
    """Basis of `{x : matrix·x = 0}` as the columns of the result, one column per free variable"""
    rows, cols = matrix.shape
    reduced = [list(row) for row in matrix]

    pivots: typing.List[int] = []
    for col in range(cols):
        if len(pivots) == rows:
            break
        row = len(pivots)
        pivot = next((i for i in range(row, rows) if reduced[i][col] != 0), None)
        if pivot is None:
            continue
        reduced[row], reduced[pivot] = reduced[pivot], reduced[row]

        head = reduced[row][col]
        reduced[row] = [value / head for value in reduced[row]]
        for i in range(rows):
            factor = reduced[i][col]
            if i != row and factor != 0:
                reduced[i] = [x - factor * y for x, y in zip(reduced[i], reduced[row])]
        pivots.append(col)

    free = [col for col in range(cols) if col not in pivots]
    result = zeros(cols, len(free))
    for position, col in enumerate(free):
        result[col, position] = Fraction(1)
        for row, pivot in enumerate(pivots):
            result[pivot, position] = -reduced[row][col]
    return result
