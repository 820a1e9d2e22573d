import itertools
import numpy as np
import typing

from dataclasses import dataclass, field
from enum import Enum

from nnrank.errors import CapExceededError, DimensionError, FactorizationError, RecoveryError
from nnrank.exact.linalg import Axis, determinant, inverse, rank_and_basis
from nnrank.exact.matrix import ExactMatrix, IndexSet, exact_equal, is_nonnegative, zero_vector, zeros
from nnrank.factor.core import Factorization, lex_key, support, verify_factorization
from nnrank.settings import MAX_ENSEMBLE_SIZE, MAX_INNER_DIMENSION


class Side(Enum):
    # transforms act on columns of M and produce columns of W
    COLUMN = "column"
    # transforms act on rows of M and produce rows of A
    ROW = "row"


class FailureReason(Enum):
    NO_CANDIDATE = "no-nonnegative-candidate"
    TIE = "tie"
    PRODUCT_MISMATCH = "product-mismatch"


class Verdict(Enum):
    PASS = "PASS"
    FAIL = "FAIL"


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Transforms recovering one factor from `M` given the other one.

    A column-side ensemble holds r×s matrices `B_k`, zero outside the rows
    `S_k`, with `B_k·M_i^U` a candidate for the column `W_i`. A row-side
    ensemble holds t×r matrices `C_l`, zero outside the columns `T_l`, with
    `M^j_V·C_l` a candidate for the row `A^j`.
    """

    side: Side
    anchor: IndexSet
    subsets: typing.Tuple[IndexSet, ...]
    transforms: typing.Tuple[ExactMatrix, ...]
    rank: int
    inner_dimension: int

    @property
    def size(self) -> int:
        return len(self.transforms)

    def anchor_values(self, M: ExactMatrix, index: int) -> np.ndarray:
        if self.side is Side.COLUMN:
            return M[list(self.anchor), index]
        return M[index, list(self.anchor)]

    def candidates(self, M: ExactMatrix, index: int) -> typing.List[np.ndarray]:
        """Candidate vectors for column `index` of W (column side) or row `index` of A (row side)"""
        values = self.anchor_values(M, index)
        if self.rank == 0:
            return [zero_vector(self.inner_dimension) for _ in self.transforms]

        if self.side is Side.COLUMN:
            return [transform @ values for transform in self.transforms]
        return [values @ transform for transform in self.transforms]


def build_ensemble(A: ExactMatrix, cap: int = MAX_ENSEMBLE_SIZE) -> Ensemble:
    """Column-side ensemble of `A`.

    Parameters
    ----------
    A : ExactMatrix
        Left factor of shape (m, r)
    cap : int
        Largest admissible number of transforms

    Returns
    -------
    Ensemble
        Anchor `U` is the first independent row set, subsets are all
        size-s independent column sets of `A^U` in lex order
    """
    r = A.shape[1]
    if r > MAX_INNER_DIMENSION:
        raise CapExceededError(f"Inner dimension {r} exceeds the cap {MAX_INNER_DIMENSION}")

    s, anchor = rank_and_basis(A, Axis.ROWS)
    anchored = A[list(anchor), :]

    subsets, transforms = [], []
    for subset in itertools.combinations(range(r), s):
        block = anchored[:, list(subset)]
        if s > 0 and determinant(block) == 0:
            continue

        transform = zeros(r, s)
        if s > 0:
            transform[list(subset), :] = inverse(block)

        subsets.append(subset)
        transforms.append(transform)
        if len(transforms) > cap:
            raise CapExceededError(f"Ensemble size exceeds the cap {cap}")

    return Ensemble(side=Side.COLUMN,
                    anchor=anchor,
                    subsets=tuple(subsets),
                    transforms=tuple(transforms),
                    rank=s,
                    inner_dimension=r)


def build_row_ensemble(W: ExactMatrix, cap: int = MAX_ENSEMBLE_SIZE) -> Ensemble:
    """Row-side ensemble of `W`, the column-side ensemble of `W^T` transposed"""
    transposed = build_ensemble(W.T, cap=cap)
    return Ensemble(side=Side.ROW,
                    anchor=transposed.anchor,
                    subsets=transposed.subsets,
                    transforms=tuple(transform.T for transform in transposed.transforms),
                    rank=transposed.rank,
                    inner_dimension=transposed.inner_dimension)


@dataclass(frozen=True, eq=False)
class Selection:
    index: typing.Optional[int] = None
    vector: typing.Optional[np.ndarray] = None
    failure: typing.Optional[FailureReason] = None

    @property
    def ok(self) -> bool:
        return self.failure is None


def first_candidate(vectors: typing.Sequence[np.ndarray]) -> Selection:
    """Nonnegative vector with the lex-minimal support.

    Identical duplicates don't count as a tie. Fails when no vector is
    nonnegative or when distinct vectors share the minimal support.
    """
    best: typing.Optional[typing.Tuple[typing.Tuple, int, np.ndarray]] = None
    tied = False
    for index, vector in enumerate(vectors):
        if not is_nonnegative(vector):
            continue

        key = lex_key(support(vector))
        if best is None or key < best[0]:
            best = (key, index, vector)
            tied = False
        elif key == best[0] and not exact_equal(vector, best[2]):
            tied = True

    if best is None:
        return Selection(failure=FailureReason.NO_CANDIDATE)
    if tied:
        return Selection(failure=FailureReason.TIE)
    return Selection(index=best[1], vector=best[2])


def recover_factor(M: ExactMatrix, ensemble: Ensemble) -> ExactMatrix:
    """Recovers `W` from a column-side ensemble or `A` from a row-side one.

    Raises
    ------
    RecoveryError
        With the failing column (or row) index and reason
    """
    r = ensemble.inner_dimension
    if ensemble.side is Side.COLUMN:
        result = zeros(r, M.shape[1])
        for i in range(M.shape[1]):
            selection = first_candidate(ensemble.candidates(M, i))
            if not selection.ok:
                raise RecoveryError(i, selection.failure.value)
            result[:, i] = selection.vector
        return result

    result = zeros(M.shape[0], r)
    for j in range(M.shape[0]):
        selection = first_candidate(ensemble.candidates(M, j))
        if not selection.ok:
            raise RecoveryError(j, selection.failure.value)
        result[j, :] = selection.vector
    return result


@dataclass
class PredicateReport:
    """Outcome of the predicate, cells are keyed by (column i, row j) of M"""

    verdict: Verdict
    choices: typing.Dict[typing.Tuple[int, int], typing.Tuple[int, int]] = field(default_factory=dict)
    failures: typing.Dict[typing.Tuple[int, int], FailureReason] = field(default_factory=dict)


def _check_pair(M: ExactMatrix, column_side: Ensemble, row_side: Ensemble):
    if column_side.side is not Side.COLUMN or row_side.side is not Side.ROW:
        raise ValueError("Expected a column-side and a row-side ensemble")
    if column_side.inner_dimension != row_side.inner_dimension:
        raise DimensionError("Ensembles disagree on the inner dimension")
    if any(index >= M.shape[0] for index in column_side.anchor) or \
            any(index >= M.shape[1] for index in row_side.anchor):
        raise DimensionError("Anchors fall outside of M")


def evaluate_predicate(M: ExactMatrix, column_side: Ensemble, row_side: Ensemble) -> PredicateReport:
    _check_pair(M, column_side, row_side)
    m, n = M.shape
    columns = [first_candidate(column_side.candidates(M, i)) for i in range(n)]
    rows = [first_candidate(row_side.candidates(M, j)) for j in range(m)]

    report = PredicateReport(verdict=Verdict.PASS)
    for i in range(n):
        for j in range(m):
            if not rows[j].ok:
                report.failures[(i, j)] = rows[j].failure
            elif not columns[i].ok:
                report.failures[(i, j)] = columns[i].failure
            else:
                report.choices[(i, j)] = (columns[i].index, rows[j].index)
                value = sum(x * y for x, y in zip(rows[j].vector, columns[i].vector))
                if value != M[j, i]:
                    report.failures[(i, j)] = FailureReason.PRODUCT_MISMATCH

    if report.failures:
        report.verdict = Verdict.FAIL
    return report


def extract_factorization(M: ExactMatrix,
                          column_side: Ensemble,
                          row_side: Ensemble,
                          report: PredicateReport) -> Factorization:
    """Assembles `(A, W)` from the selections of a passing report"""
    if report.verdict is not Verdict.PASS:
        raise FactorizationError("Can only extract a factorization from a passing report")

    m, n = M.shape
    r = column_side.inner_dimension
    A, W = zeros(m, r), zeros(r, n)
    for (i, j), (column_choice, row_choice) in report.choices.items():
        W[:, i] = column_side.candidates(M, i)[column_choice]
        A[j, :] = row_side.candidates(M, j)[row_choice]

    result = Factorization(A, W)
    assert verify_factorization(M, result), "Passing report has to yield a factorization"
    return result


@dataclass(frozen=True)
class EnsembleCheck:
    # A·(B_k·M_i^U) == M_i for every k and i
    validity: bool
    # W_i is one of the candidates
    occurrence: bool
    # supp(W_i) indexes independent columns of A
    independence: bool

    @property
    def ok(self) -> bool:
        return self.validity and self.occurrence and self.independence


def check_ensemble_identities(M: ExactMatrix, factorization: Factorization, ensemble: Ensemble) -> EnsembleCheck:
    """Checks the identities a column-side ensemble of `A` satisfies when `M = A·W`"""
    A, W = factorization.A, factorization.W
    validity, occurrence, independence = True, True, True
    for i in range(M.shape[1]):
        candidates = ensemble.candidates(M, i)
        validity &= all(exact_equal(A @ candidate, M[:, i]) for candidate in candidates)
        occurrence &= any(exact_equal(candidate, W[:, i]) for candidate in candidates)

        columns = support(W[:, i])
        independence &= rank_and_basis(A[:, list(columns)], Axis.COLS)[0] == len(columns)

    return EnsembleCheck(validity, occurrence, independence)
