import numpy as np
import typing

from fractions import Fraction

from nnrank.exact.matrix import ExactMatrix, IndexSet, zero_vector
from nnrank.exact.scalar import Scalar


class FeasibilityTableau:
    """Phase-one simplex tableau for `A·x = b, x ≥ 0` with one artificial per row.

    Pivots follow Bland's rule, so the loop terminates without cycling. All
    arithmetic is exact, the tableau entries are rationals or QS3 values.
    """

    def __init__(self, coefficients: typing.List[typing.List[Scalar]], rhs: typing.List[Scalar]):
        self.m = len(rhs)
        self.k = len(coefficients[0]) if coefficients else 0

        self.rows: typing.List[typing.List[Scalar]] = []
        self.b: typing.List[Scalar] = []
        for i, (row, value) in enumerate(zip(coefficients, rhs)):
            flip = value < 0
            row = [-x if flip else x for x in row]
            artificials = [Fraction(1) if j == i else Fraction(0) for j in range(self.m)]
            self.rows.append(row + artificials)
            self.b.append(-value if flip else value)

        self.basis = [self.k + i for i in range(self.m)]
        # reduced costs of the phase-one objective, sum of artificials
        self.cost = [-sum(self.rows[i][j] for i in range(self.m)) if j < self.k else Fraction(0)
                     for j in range(self.k + self.m)]

    def pivot(self, i: int, j: int):
        head = self.rows[i][j]
        self.rows[i] = [value / head for value in self.rows[i]]
        self.b[i] = self.b[i] / head

        for row in range(self.m):
            factor = self.rows[row][j]
            if row != i and factor != 0:
                self.rows[row] = [x - factor * y for x, y in zip(self.rows[row], self.rows[i])]
                self.b[row] = self.b[row] - factor * self.b[i]

        factor = self.cost[j]
        if factor != 0:
            self.cost = [x - factor * y for x, y in zip(self.cost, self.rows[i])]

        self.basis[i] = j

    def bland_step(self) -> bool:
        entering = next((j for j in range(self.k + self.m) if self.cost[j] < 0), None)
        if entering is None:
            return False

        candidates = [(self.b[i] / self.rows[i][entering], self.basis[i], i)
                      for i in range(self.m) if self.rows[i][entering] > 0]
        # phase one is bounded below by zero, a negative reduced cost always has a ratio row
        assert candidates, "Phase-one objective can't be unbounded"

        _, _, leaving = min(candidates)
        self.pivot(leaving, entering)
        return True

    def run(self):
        while self.bland_step():
            pass

    def infeasibility(self) -> Scalar:
        return sum((self.b[i] for i in range(self.m) if self.basis[i] >= self.k), Fraction(0))

    def solution(self) -> typing.List[Scalar]:
        values = [Fraction(0)] * self.k
        for i, var in enumerate(self.basis):
            if var < self.k:
                values[var] = self.b[i]
        return values


def nonneg_solve(matrix: ExactMatrix, support: IndexSet, rhs: np.ndarray) -> typing.Optional[np.ndarray]:
    """Finds `x ≥ 0` supported inside `support` with `matrix·x == rhs`.

    Parameters
    ----------
    matrix : ExactMatrix
        Matrix of shape (m, r)
    support : IndexSet
        Columns of `matrix` allowed to carry nonzero weight
    rhs : np.ndarray
        Target vector of length m

    Returns
    -------
    typing.Optional[np.ndarray]
        Length-r exact vector with zeros outside `support`, or `None` if infeasible
    """
    columns = list(support)
    result = zero_vector(matrix.shape[1])
    if not columns:
        return result if all(value == 0 for value in rhs) else None

    coefficients = [[matrix[i, j] for j in columns] for i in range(matrix.shape[0])]
    tableau = FeasibilityTableau(coefficients, list(rhs))
    tableau.run()
    if tableau.infeasibility() != 0:
        return None

    for column, value in zip(columns, tableau.solution()):
        result[column] = value

    return result
