import numpy as np
import typing

from dataclasses import dataclass, field

from nnrank.errors import DimensionError
from nnrank.exact.matrix import ExactMatrix, zero_vector, zeros
from nnrank.exact.scalar import Scalar, sign, to_scalar
from nnrank.compiler.polynomial import Mode, PolySystem, column_subsets
from nnrank.factor.core import Factorization
from nnrank.factor.ensemble import Ensemble, FailureReason, Verdict, first_candidate


@dataclass
class SystemEvaluation:
    signs: typing.Tuple[int, ...]
    verdict: Verdict
    factorization: typing.Optional[Factorization] = None
    failures: typing.Dict[typing.Tuple[int, int], FailureReason] = field(default_factory=dict)


def _select(candidates: typing.List[typing.Tuple[int, np.ndarray]]):
    selection = first_candidate([vector for _, vector in candidates])
    if not selection.ok:
        return None, selection.failure
    return (candidates[selection.index][0], selection.vector), None


def evaluate_system_at(system: PolySystem, point: typing.Sequence[Scalar]) -> SystemEvaluation:
    """Evaluates every polynomial at `point` and applies the predicate to the signs.

    For take2 a subset is a candidate only where its determinant is nonzero,
    the candidate vector is the numerator divided by the determinant. On PASS
    the factorization is reconstructed from the selected candidates.
    """
    if len(point) != system.var_count:
        raise DimensionError(f"Point of length {len(point)} for a system with {system.var_count} variables")

    point = [to_scalar(value) for value in point]
    values = {key: polynomial.evaluate(point) for key, polynomial in system.lookup.items()}
    signs = tuple(sign(values[(polynomial.family, polynomial.indices)]) for polynomial in system.polynomials)

    meta = system.meta
    take2 = system.mode is Mode.TAKE2
    column_sets = column_subsets(meta.r, meta.s)
    row_sets = column_subsets(meta.r, meta.t)

    def column_candidates(i: int):
        candidates = []
        for k in range(meta.p):
            vector = zero_vector(meta.r)
            if take2:
                det = values[("detA", (k,))]
                if det == 0:
                    continue
                for position, inner in enumerate(column_sets[k]):
                    vector[inner] = values[("numA", (i, k, position))] / det
            else:
                for inner in range(meta.r):
                    vector[inner] = values[("numA", (i, k, inner))]
            candidates.append((k, vector))
        return candidates

    def row_candidates(j: int):
        candidates = []
        for l in range(meta.q):
            vector = zero_vector(meta.r)
            if take2:
                det = values[("detW", (l,))]
                if det == 0:
                    continue
                for position, inner in enumerate(row_sets[l]):
                    vector[inner] = values[("numW", (j, l, position))] / det
            else:
                for inner in range(meta.r):
                    vector[inner] = values[("numW", (j, l, inner))]
            candidates.append((l, vector))
        return candidates

    columns = [_select(column_candidates(i)) for i in range(meta.n)]
    rows = [_select(row_candidates(j)) for j in range(meta.m)]

    failures = {}
    for i, (column, column_failure) in enumerate(columns):
        for j, (row, row_failure) in enumerate(rows):
            if row is None:
                failures[(i, j)] = row_failure
            elif column is None:
                failures[(i, j)] = column_failure
            elif values[("prod", (i, j, column[0], row[0]))] != 0:
                failures[(i, j)] = FailureReason.PRODUCT_MISMATCH

    if failures:
        return SystemEvaluation(signs=signs, verdict=Verdict.FAIL, failures=failures)

    A, W = zeros(meta.m, meta.r), zeros(meta.r, meta.n)
    for i, (column, _) in enumerate(columns):
        W[:, i] = column[1]
    for j, (row, _) in enumerate(rows):
        A[j, :] = row[1]

    return SystemEvaluation(signs=signs, verdict=Verdict.PASS, factorization=Factorization(A, W))


def take2_point(A_U: ExactMatrix, W_V: ExactMatrix) -> typing.List[Scalar]:
    """Point of a take2 system: entries of `A^U` then `W_V`, both row-major"""
    return list(A_U.flat) + list(W_V.flat)


def take2_point_from_factorization(factorization: Factorization, U, V) -> typing.List[Scalar]:
    return take2_point(factorization.A[list(U), :], factorization.W[:, list(V)])


def take1_point(column_side: Ensemble, row_side: Ensemble) -> typing.List[Scalar]:
    """Point of a take1 system: entries of every `B_k` then every `C_l`, row-major"""
    point = []
    for transform in column_side.transforms:
        point += list(transform.flat)
    for transform in row_side.transforms:
        point += list(transform.flat)
    return point
