import numpy as np
import pytest

from nnrank.errors import CapExceededError, FactorizationError, RecoveryError
from nnrank.exact.matrix import exact_equal, exact_matrix, exact_vector, identity, zeros
from nnrank.factor.core import Factorization, verify_factorization
from nnrank.factor.ensemble import (
    Ensemble,
    FailureReason,
    Side,
    Verdict,
    build_ensemble,
    build_row_ensemble,
    check_ensemble_identities,
    evaluate_predicate,
    extract_factorization,
    first_candidate,
    recover_factor
)
from nnrank.factor.stabilizer import stabilize
from tests.utils import random_factorization, read_fixture_matrix


def _stable_example():
    return (read_fixture_matrix("stable", "M.mat"),
            read_fixture_matrix("stable", "A.mat"),
            read_fixture_matrix("stable", "W.mat"))


class TestBuildEnsemble:
    def test_identity(self):
        ensemble = build_ensemble(identity(2))

        assert ensemble.side is Side.COLUMN
        assert ensemble.rank == 2
        assert ensemble.anchor == (0, 1)
        assert ensemble.size == 1
        assert exact_equal(ensemble.transforms[0], identity(2))

    def test_generic_subsets(self):
        ensemble = build_ensemble(exact_matrix([[1, 0, 1], [0, 1, 1]]))

        assert ensemble.subsets == ((0, 1), (0, 2), (1, 2))
        assert exact_equal(ensemble.transforms[1], exact_matrix([[1, -1], [0, 0], [0, 1]]))

    def test_dependent_subsets_are_skipped(self):
        ensemble = build_ensemble(exact_matrix([[1, 0, 1], [0, 0, 1]]))

        assert ensemble.rank == 2
        assert ensemble.anchor == (0, 1)
        assert ensemble.subsets == ((0, 2),)

    def test_zero_factor(self):
        ensemble = build_ensemble(zeros(3, 2))

        assert ensemble.rank == 0
        assert ensemble.subsets == ((),)
        assert all(value == 0 for value in ensemble.candidates(zeros(3, 2), 0)[0])

    def test_cap(self):
        with pytest.raises(CapExceededError):
            build_ensemble(exact_matrix([[1, 0, 1], [0, 1, 1]]), cap=2)

    def test_row_ensemble(self):
        _, _, W = _stable_example()
        ensemble = build_row_ensemble(W)

        assert ensemble.side is Side.ROW
        assert ensemble.anchor == (0, 1)
        assert ensemble.transforms[0].shape == (2, 3)


class TestFirstCandidate:
    def test_minimal_support(self):
        selection = first_candidate([exact_vector([1, 0]), exact_vector([0, 1]), exact_vector([-1, 2])])

        assert selection.ok
        assert selection.index == 0

    @pytest.mark.parametrize("vectors, reason", [
        ([[-1, 0], [0, -1]], FailureReason.NO_CANDIDATE),
        ([[1, 0], [2, 0]], FailureReason.TIE),
    ])
    def test_failures(self, vectors, reason):
        selection = first_candidate([exact_vector(vector) for vector in vectors])

        assert not selection.ok
        assert selection.failure is reason

    def test_identical_duplicates_are_not_a_tie(self):
        selection = first_candidate([exact_vector([0, 3]), exact_vector([0, 3]), exact_vector([1, 1])])

        assert selection.ok
        assert selection.index == 0


class TestRecovery:
    def test_identity(self):
        assert exact_equal(recover_factor(identity(2), build_ensemble(identity(2))), identity(2))

    def test_stable_example(self):
        M, A, W = _stable_example()

        assert exact_equal(recover_factor(M, build_ensemble(A)), W)
        assert exact_equal(recover_factor(M, build_row_ensemble(W)), A)

    def test_zero_column(self):
        M = exact_matrix([[1, 0], [1, 0]])
        A = exact_matrix([[1], [1]])

        recovered = recover_factor(M, build_ensemble(A))

        assert exact_equal(recovered, exact_matrix([[1, 0]]))

    @pytest.mark.parametrize("seed", range(100))
    def test_stable_factorizations(self, seed):
        factorization = random_factorization(np.random.default_rng(seed), max_size=6)
        M = factorization.product()
        stable, _ = stabilize(M, factorization)

        assert exact_equal(recover_factor(M, build_ensemble(stable.A)), stable.W)
        assert exact_equal(recover_factor(M, build_row_ensemble(stable.W)), stable.A)

    def test_failure_reports_index(self):
        ensemble = build_ensemble(identity(2))
        M = exact_matrix([[1, -1], [0, 1]])

        with pytest.raises(RecoveryError) as error:
            recover_factor(M, ensemble)

        assert error.value.index == 1
        assert error.value.reason == FailureReason.NO_CANDIDATE.value


class TestPredicate:
    def test_stable_pass_and_extract(self):
        M, A, W = _stable_example()
        column_side, row_side = build_ensemble(A), build_row_ensemble(W)

        report = evaluate_predicate(M, column_side, row_side)

        assert report.verdict is Verdict.PASS
        assert len(report.choices) == 4
        assert extract_factorization(M, column_side, row_side, report) == Factorization(A, W)

    def test_zero_transform_mismatch(self):
        column_side = build_ensemble(identity(2))
        zeroed = Ensemble(side=Side.COLUMN,
                          anchor=column_side.anchor,
                          subsets=column_side.subsets,
                          transforms=(zeros(2, 2),),
                          rank=2,
                          inner_dimension=2)

        report = evaluate_predicate(identity(2), zeroed, build_row_ensemble(identity(2)))

        assert report.verdict is Verdict.FAIL
        assert report.failures[(0, 0)] is FailureReason.PRODUCT_MISMATCH
        with pytest.raises(FactorizationError):
            extract_factorization(identity(2), zeroed, build_row_ensemble(identity(2)), report)

    def test_negated_transforms(self):
        row_side = build_row_ensemble(identity(2))
        negated = Ensemble(side=Side.ROW,
                           anchor=row_side.anchor,
                           subsets=row_side.subsets,
                           transforms=tuple(-transform for transform in row_side.transforms),
                           rank=2,
                           inner_dimension=2)

        report = evaluate_predicate(identity(2), build_ensemble(identity(2)), negated)

        assert report.verdict is Verdict.FAIL
        assert set(report.failures.values()) == {FailureReason.NO_CANDIDATE}

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        A = exact_matrix(rng.integers(0, 3, size=(4, 3)).tolist())
        W = exact_matrix(rng.integers(0, 3, size=(3, 5)).tolist())
        M = A @ W
        stable, _ = stabilize(M, Factorization(A, W))

        column_side, row_side = build_ensemble(stable.A), build_row_ensemble(stable.W)
        check = check_ensemble_identities(M, stable, column_side)
        report = evaluate_predicate(M, column_side, row_side)

        assert check.ok
        assert report.verdict is Verdict.PASS
        assert extract_factorization(M, column_side, row_side, report) == stable


def _corrupted(ensemble: Ensemble, index: int, row: int, col: int) -> Ensemble:
    transforms = list(ensemble.transforms)
    transforms[index] = transforms[index].copy()
    transforms[index][row, col] += 1
    return Ensemble(side=ensemble.side,
                    anchor=ensemble.anchor,
                    subsets=ensemble.subsets,
                    transforms=tuple(transforms),
                    rank=ensemble.rank,
                    inner_dimension=ensemble.inner_dimension)


def _corrupted_entries(ensemble: Ensemble):
    for index, transform in enumerate(ensemble.transforms):
        for row in range(transform.shape[0]):
            for col in range(transform.shape[1]):
                yield _corrupted(ensemble, index, row, col)


class TestCorruptedTransforms:
    def _assert_sound(self, M, column_side, row_side):
        report = evaluate_predicate(M, column_side, row_side)
        if report.verdict is Verdict.PASS:
            assert verify_factorization(M, extract_factorization(M, column_side, row_side, report))

    def test_stable_example(self):
        M, A, W = _stable_example()
        column_side, row_side = build_ensemble(A), build_row_ensemble(W)

        for corrupted in _corrupted_entries(column_side):
            self._assert_sound(M, corrupted, row_side)
        for corrupted in _corrupted_entries(row_side):
            self._assert_sound(M, column_side, corrupted)

    @pytest.mark.parametrize("seed", range(10))
    def test_random_stable_factorizations(self, seed):
        factorization = random_factorization(np.random.default_rng(seed), max_size=5, max_rank=3)
        M = factorization.product()
        stable, _ = stabilize(M, factorization)
        column_side, row_side = build_ensemble(stable.A), build_row_ensemble(stable.W)

        for corrupted in _corrupted_entries(column_side):
            self._assert_sound(M, corrupted, row_side)
        for corrupted in _corrupted_entries(row_side):
            self._assert_sound(M, column_side, corrupted)

    def test_single_corruption_fails(self):
        column_side = build_ensemble(identity(2))

        report = evaluate_predicate(identity(2), _corrupted(column_side, 0, 0, 1), build_row_ensemble(identity(2)))

        assert report.verdict is Verdict.FAIL
