import numpy as np
import os

from fractions import Fraction

from nnrank.exact.matrix import ExactMatrix, exact_matrix, is_zero
from nnrank.factor.core import Factorization
from nnrank.io.matrix_file import read_matrix


SMALL_VALUES = (Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(1), Fraction(2))


def get_fixtures_folder() -> str:
    return os.path.join(os.path.abspath(os.path.dirname(__file__)), "fixtures")


def read_fixture_matrix(*path: str) -> ExactMatrix:
    return read_matrix(os.path.join(get_fixtures_folder(), *path))


def random_exact_matrix(rng: np.random.Generator, rows: int, cols: int) -> ExactMatrix:
    return exact_matrix([[SMALL_VALUES[rng.integers(len(SMALL_VALUES))] for _ in range(cols)] for _ in range(rows)])


def random_factorization(rng: np.random.Generator, max_size: int = 8, max_rank: int = 4) -> Factorization:
    """Nonnegative pair with a nonzero product, columns are zeroed and duplicated at random"""
    while True:
        m, n = int(rng.integers(2, max_size + 1)), int(rng.integers(2, max_size + 1))
        r = int(rng.integers(1, max_rank + 1))
        A, W = random_exact_matrix(rng, m, r), random_exact_matrix(rng, r, n)

        if rng.random() < 0.3:
            W[:, int(rng.integers(n))] = Fraction(0)
        if rng.random() < 0.3:
            source, target = rng.choice(n, size=2, replace=False)
            W[:, target] = W[:, source]
        if r > 1 and rng.random() < 0.3:
            A[:, int(rng.integers(r))] = Fraction(0)
        if r > 1 and rng.random() < 0.3:
            source, target = rng.choice(r, size=2, replace=False)
            A[:, target] = A[:, source]

        factorization = Factorization(A, W)
        if not is_zero(factorization.product()):
            return factorization
