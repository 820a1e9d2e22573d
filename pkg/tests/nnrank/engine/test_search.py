import numpy as np
import pytest

from nnrank.compiler.compile import compile_take2
from nnrank.compiler.evaluate import evaluate_system_at
from nnrank.engine.config import DecisionConfig
from nnrank.engine.decide import plant_instance
from nnrank.engine.search import (
    NumericCandidate,
    SupportPattern,
    exact_factorization,
    numeric_factorizations,
    numeric_search_backend,
    support_pattern
)
from nnrank.exact.matrix import as_float, exact_equal, exact_matrix, identity
from nnrank.factor.core import Factorization, verify_factorization
from nnrank.factor.ensemble import Verdict
from nnrank.fragile.geometry import hexagram_family
from nnrank.fragile.instance import build_instance
from nnrank.utils.time_measure import Deadline


class TestNumericFactorizations:
    def test_sorted_and_cached(self):
        cfg = DecisionConfig(starts=3, seed=5)
        first = numeric_factorizations(identity(2), 2, cfg)
        second = numeric_factorizations(identity(2), 2, cfg)

        assert first is second
        assert len(first) == 3
        assert [candidate.residual for candidate in first] == sorted(candidate.residual for candidate in first)
        for candidate in first:
            assert np.all(candidate.A >= 0)
            assert np.all(candidate.W >= 0)


class TestNumericSearchBackend:
    def test_identity(self):
        cfg = DecisionConfig(starts=4)
        system = compile_take2(identity(2), 2, 2, 2, (0, 1), (0, 1))

        point = numeric_search_backend(identity(2), 2, 2, 2, (0, 1), (0, 1), cfg, system=system)

        assert point is not None
        evaluation = evaluate_system_at(system, point)
        assert evaluation.verdict is Verdict.PASS
        assert exact_equal(evaluation.factorization.product(), identity(2))

    def test_planted_rank_two(self):
        M, _ = plant_instance(4, 4, 2, np.random.default_rng(7))
        cfg = DecisionConfig(starts=8, seed=1)

        point = numeric_search_backend(M, 2, 2, 2, (0, 1), (0, 1), cfg, deadline=Deadline(120))

        assert point is not None
        evaluation = evaluate_system_at(compile_take2(M, 2, 2, 2, (0, 1), (0, 1)), point)
        assert evaluation.verdict is Verdict.PASS
        assert exact_equal(evaluation.factorization.product(), M)

    def test_fragile_gadget_has_no_rank_three_point(self):
        M = build_instance(hexagram_family()).M
        cfg = DecisionConfig(starts=2)

        assert numeric_search_backend(M, 3, 3, 3, (0, 1, 2), (0, 1, 2), cfg, deadline=Deadline(30)) is None

    def test_expired_deadline(self):
        deadline = Deadline(1e-9)
        while not deadline.expired():
            pass

        assert numeric_search_backend(identity(2), 2, 2, 2, (0, 1), (0, 1), DecisionConfig(), deadline=deadline) is None

    def test_anchor_sizes(self):
        with pytest.raises(ValueError):
            numeric_search_backend(identity(2), 2, 2, 2, (0,), (0, 1), DecisionConfig())

    def test_rank_two_matrix_at_rank_three(self):
        M, _ = plant_instance(5, 5, 2, np.random.default_rng(11))
        cfg = DecisionConfig(starts=8, seed=1)

        point = numeric_search_backend(M, 3, 2, 2, (0, 1), (0, 1), cfg, deadline=Deadline(120))

        assert point is not None
        evaluation = evaluate_system_at(compile_take2(M, 3, 2, 2, (0, 1), (0, 1)), point)
        assert evaluation.verdict is Verdict.PASS
        assert evaluation.factorization.r == 3
        assert exact_equal(evaluation.factorization.product(), M)


def noisy_candidate(factorization: Factorization, noise: float = 1e-13) -> NumericCandidate:
    A, W = as_float(factorization.A), as_float(factorization.W)
    return NumericCandidate(A=A + noise * (A > 0), W=W - noise * (W > 0), residual=1e-12, start=0)


class TestSupportPattern:
    def test_small_entries_are_zeros(self):
        candidate = NumericCandidate(A=np.array([[1.0, 1e-12], [0.5, 0.0]]),
                                     W=np.array([[1.0, 0.0], [2e-11, 1.0]]),
                                     residual=0.0,
                                     start=0)

        assert support_pattern(candidate) == SupportPattern(zero_rows=((), (0, 1)), column_supports=((0,), (1,)))

    def test_all_zero(self):
        candidate = NumericCandidate(A=np.zeros((2, 1)), W=np.zeros((1, 2)), residual=0.0, start=0)

        assert support_pattern(candidate) == SupportPattern(zero_rows=((0, 1),), column_supports=((), ()))


class TestExactFactorization:
    A = exact_matrix([[1, 0, 2], [0, 1, 1], [2, 1, 0], [1, 1, 1], [0, 2, 1]])
    W = exact_matrix([[1, 0, 2, 1, 0], [0, 1, 1, 2, 1], [2, 1, 0, 0, 1]])

    def test_recovers_zero_pattern(self):
        planted = Factorization(self.A, self.W)
        M = planted.product()

        factorization = exact_factorization(M, noisy_candidate(planted), 10 ** 6)

        assert factorization is not None
        assert verify_factorization(M, factorization)
        assert factorization == planted

    def test_non_separable_plant(self):
        M, planted = plant_instance(5, 5, 3, np.random.default_rng(101), separable=False)

        factorization = exact_factorization(M, noisy_candidate(planted), 10 ** 6)

        assert factorization is not None
        assert verify_factorization(M, factorization)
        assert np.array_equal(factorization.A == 0, planted.A == 0)

    def test_rank_mismatch(self):
        candidate = NumericCandidate(A=np.eye(3)[:, :2], W=np.eye(3)[:2, :], residual=1.0, start=0)

        assert exact_factorization(identity(3), candidate, 10 ** 6) is None
