import pytest

from fractions import Fraction

from nnrank.compiler.compile import compile_take1, compile_take2, polynomial_counts
from nnrank.compiler.evaluate import take2_point_from_factorization
from nnrank.compiler.polynomial import Mode, Monomial, Role, Variable
from nnrank.errors import CapExceededError, DimensionError
from nnrank.exact.linalg import det_adjugate, inverse
from nnrank.exact.matrix import exact_matrix, identity
from nnrank.exact.scalar import QS3, sign
from nnrank.factor.core import Factorization
from tests.utils import read_fixture_matrix


class TestCompileTake1:
    def test_counts(self):
        system = compile_take1(identity(2), r=2, s=2, t=2, U=(0, 1), V=(0, 1), p=1, q=1)
        counts = polynomial_counts(system)

        assert system.mode is Mode.TAKE1
        assert system.var_count == 8
        assert counts["prod"] == 4
        assert counts["numA"] == 2 * 1 * 2
        assert counts["numW"] == 2 * 1 * 2
        assert counts["total"] == 12
        assert counts["tally"] == 2 * (1 + 1) + 4
        assert system.max_degree <= 2

    def test_smallest_instance(self):
        system = compile_take1(exact_matrix([[2]]), r=1, s=1, t=1, U=(0,), V=(0,), p=1, q=1)

        assert system.var_count == 2
        assert system.variables == (Variable(Role.B, (0, 0, 0)), Variable(Role.C, (0, 0, 0)))

        prod = system.lookup[("prod", (0, 0, 0, 0))]
        assert prod.degree == 2
        assert prod.monomials == (Monomial(Fraction(4), ((0, 1), (1, 1))), Monomial(Fraction(-2), ()))
        assert prod.evaluate([Fraction(1, 2), Fraction(1, 2)]) == -1

    def test_caps(self):
        with pytest.raises(CapExceededError):
            compile_take1(identity(2), r=2, s=2, t=2, U=(0, 1), V=(0, 1), p=2, q=1)
        with pytest.raises(DimensionError):
            compile_take1(identity(2), r=2, s=2, t=2, U=(0,), V=(0, 1), p=1, q=1)
        with pytest.raises(DimensionError):
            compile_take1(identity(2), r=2, s=1, t=1, U=(5,), V=(0,), p=1, q=1)


class TestCompileTake2:
    def test_smallest_instance(self):
        system = compile_take2(exact_matrix([[2]]), r=1, s=1, t=1, U=(0,), V=(0,))

        assert system.counts() == {"detA": 1, "detW": 1, "numA": 1, "numW": 1, "prod": 1}
        assert system.lookup[("detA", (0,))].monomials == (Monomial(Fraction(1), ((0, 1),)),)
        assert system.lookup[("numA", (0, 0, 0))].monomials == (Monomial(Fraction(2), ()),)
        assert system.lookup[("prod", (0, 0, 0, 0))].monomials == (Monomial(Fraction(-2), ((0, 1), (1, 1))),
                                                                   Monomial(Fraction(4), ()))
        assert system.max_degree <= 2

    def test_variable_count(self):
        M = read_fixture_matrix("stable", "M.mat")
        system = compile_take2(M, r=3, s=2, t=2, U=(0, 1), V=(0, 1))

        assert system.var_count == 12
        assert system.var_count <= 2 * 3 * 3
        assert system.meta.p == 3
        assert system.meta.q == 3
        assert system.counts()["prod"] == 2 * 2 * 3 * 3
        assert polynomial_counts(system)["tally"] == 3 * 6 + 6 + 36
        assert system.max_degree <= 18
        assert system.referenced_variables() == set(range(12))

    def test_numerator_signs_match_inverse(self):
        M = read_fixture_matrix("stable", "M.mat")
        A = read_fixture_matrix("stable", "A.mat")
        W = read_fixture_matrix("stable", "W.mat")
        system = compile_take2(M, r=3, s=2, t=2, U=(0, 1), V=(0, 1))
        point = take2_point_from_factorization(Factorization(A, W), (0, 1), (0, 1))

        for k, subset in enumerate([(0, 1), (0, 2), (1, 2)]):
            block = A[:, list(subset)]
            det, _ = det_adjugate(block)
            assert system.lookup[("detA", (k,))].evaluate(point) == det
            if det == 0:
                continue

            for i in range(2):
                direct = inverse(block) @ M[:, i]
                for position in range(2):
                    numerator = system.lookup[("numA", (i, k, position))].evaluate(point)
                    assert sign(direct[position]) == sign(numerator) * sign(det)

    def test_qs3_coefficients(self):
        root = QS3(0, 1)
        M = exact_matrix([[root, 1], [1, root]])
        system = compile_take2(M, r=2, s=2, t=2, U=(0, 1), V=(0, 1))

        coefficients = [monomial.coefficient for polynomial in system.polynomials for monomial in polynomial.monomials]
        assert any(isinstance(value, QS3) for value in coefficients)
        assert all(not isinstance(value, QS3) or not value.is_rational for value in coefficients)

        point = [Fraction(1), Fraction(0), Fraction(0), Fraction(1)] * 2
        # row·column of M^0 and M_0 minus M[0,0]
        assert system.lookup[("prod", (0, 0, 0, 0))].evaluate(point) == QS3(4, -1)
