import itertools
import numpy as np
import pytest

from fractions import Fraction

from nnrank.exact.linalg import Axis, inverse, rank_and_basis
from nnrank.exact.matrix import exact_equal, exact_matrix, exact_vector, is_zero
from nnrank.exact.scalar import QS3
from nnrank.exact.simplex import nonneg_solve


def feasible_by_enumeration(matrix, support, rhs) -> bool:
    """Looks for a nonnegative solution on every independent column subset of the support"""
    if is_zero(rhs):
        return True

    for size in range(1, len(support) + 1):
        for columns in itertools.combinations(support, size):
            block = matrix[:, list(columns)]
            block_rank, rows = rank_and_basis(block, Axis.ROWS)
            if block_rank < size:
                continue
            solution = inverse(block[list(rows), :]) @ rhs[list(rows)]
            if all(value >= 0 for value in solution) and exact_equal(block @ solution, rhs):
                return True
    return False


class TestNonnegSolve:
    def test_feasible_inside_support(self):
        matrix = exact_matrix([[1, 0, 1], [0, 1, 1]])
        solution = nonneg_solve(matrix, (0, 1), exact_vector([2, 3]))

        assert list(solution) == [2, 3, 0]

    def test_support_restricts_solution(self):
        matrix = exact_matrix([[1, 0, 1], [0, 1, 1]])
        solution = nonneg_solve(matrix, (2,), exact_vector([5, 5]))

        assert list(solution) == [0, 0, 5]
        assert nonneg_solve(matrix, (2,), exact_vector([1, 2])) is None

    def test_infeasible_sign(self):
        matrix = exact_matrix([[1, 1]])
        assert nonneg_solve(matrix, (0, 1), exact_vector([-1])) is None

    @pytest.mark.parametrize("rhs, expected", [
        ([0, 0], [0, 0]),
        ([1, 0], None),
    ])
    def test_empty_support(self, rhs, expected):
        matrix = exact_matrix([[1, 0], [0, 1]])
        solution = nonneg_solve(matrix, (), exact_vector(rhs))

        if expected is None:
            assert solution is None
        else:
            assert list(solution) == expected

    def test_degenerate_redundant_rows(self):
        matrix = exact_matrix([[1, 1, 0], [1, 1, 0], [0, 1, 1]])
        rhs = exact_vector([1, 1, 1])
        solution = nonneg_solve(matrix, (0, 1, 2), rhs)

        assert solution is not None
        assert all(value >= 0 for value in solution)
        assert list(matrix @ solution) == list(rhs)

    def test_qs3_entries(self):
        root = QS3(0, 1)
        matrix = exact_matrix([[1, root], [0, 1]])
        rhs = exact_vector([QS3(2, 1), Fraction(1)])
        solution = nonneg_solve(matrix, (0, 1), rhs)

        assert list(solution) == [2, 1]

    @pytest.mark.parametrize("seed", range(100))
    def test_agrees_with_enumeration(self, seed):
        rng = np.random.default_rng(seed)
        m, r = int(rng.integers(1, 5)), int(rng.integers(1, 6))
        matrix = exact_matrix(rng.integers(-2, 4, size=(m, r)).tolist())
        if seed % 2 == 0:
            weights = exact_vector(rng.integers(0, 3, size=r).tolist())
            rhs = matrix @ weights
        else:
            rhs = exact_vector(rng.integers(-1, 4, size=m).tolist())
        support = tuple(int(k) for k in np.flatnonzero(rng.random(r) < 0.7))

        solution = nonneg_solve(matrix, support, rhs)

        assert (solution is not None) == feasible_by_enumeration(matrix, support, rhs)
        if solution is not None:
            assert all(value >= 0 for value in solution)
            assert all(solution[k] == 0 for k in range(r) if k not in support)
            assert exact_equal(matrix @ solution, rhs)
