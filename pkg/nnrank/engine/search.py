import functools
import itertools
import numpy as np
import typing

from dataclasses import dataclass
from scipy.optimize import nnls

from nnrank.compiler.compile import compile_take2
from nnrank.compiler.evaluate import evaluate_system_at, take2_point
from nnrank.compiler.polynomial import PolySystem
from nnrank.engine.config import DecisionConfig
from nnrank.errors import SingularMatrixError
from nnrank.exact.linalg import Axis, inverse, nullspace, rank, rank_and_basis
from nnrank.exact.matrix import (
    ExactMatrix,
    IndexSet,
    as_float,
    exact_matrix,
    exact_vector,
    identity,
    is_nonnegative,
    zeros
)
from nnrank.exact.scalar import Scalar, rationalize
from nnrank.factor.core import Factorization, pad_factorization, verify_factorization
from nnrank.factor.ensemble import Verdict, build_ensemble, first_candidate
from nnrank.factor.stabilizer import stabilize
from nnrank.settings import (
    MAX_COLUMN_ORDERS,
    MAX_DENOMINATOR_BOUND,
    NUMERIC_MAX_ITERATIONS,
    NUMERIC_RESIDUAL_TOLERANCE,
    NUMERIC_SUPPORT_TOLERANCE
)
from nnrank.utils.time_measure import Deadline


@dataclass(frozen=True)
class NumericCandidate:
    A: np.ndarray
    W: np.ndarray
    residual: float
    start: int


def _normalize(A: np.ndarray, W: np.ndarray) -> typing.Tuple[np.ndarray, np.ndarray]:
    """Rescales so that every nonzero column of A has maximum entry 1"""
    A, W = A.copy(), W.copy()
    for k in range(A.shape[1]):
        scale = A[:, k].max()
        if scale > 0:
            A[:, k] /= scale
            W[k, :] *= scale
    return A, W


def _alternating_nnls(M: np.ndarray,
                      r: int,
                      rng: np.random.Generator,
                      max_iterations: int) -> typing.Tuple[np.ndarray, np.ndarray, float]:
    m, n = M.shape
    norm = max(np.linalg.norm(M), np.finfo(np.float64).tiny)
    A = np.zeros((m, r))
    W = rng.random((r, n)) * M.max(initial=1.0)

    residual, previous = np.inf, np.inf
    for _ in range(max_iterations):
        for j in range(m):
            A[j, :] = nnls(W.T, M[j, :])[0]
        for i in range(n):
            W[:, i] = nnls(A, M[:, i])[0]

        residual = np.linalg.norm(A @ W - M) / norm
        if residual < NUMERIC_RESIDUAL_TOLERANCE * 1e-4 or abs(previous - residual) <= 1e-12 * residual:
            break
        previous = residual

    return A, W, float(residual)


@functools.lru_cache(maxsize=32)
def _cached_factorizations(values: typing.Tuple[float, ...],
                           shape: typing.Tuple[int, int],
                           r: int,
                           starts: int,
                           seed: int) -> typing.Tuple[NumericCandidate, ...]:
    M = np.array(values, dtype=np.float64).reshape(shape)
    candidates = []
    for start in range(starts):
        rng = np.random.default_rng(seed + start)
        A, W, residual = _alternating_nnls(M, r, rng, NUMERIC_MAX_ITERATIONS)
        A, W = _normalize(A, W)
        candidates.append(NumericCandidate(A=A, W=W, residual=residual, start=start))

    return tuple(sorted(candidates, key=lambda candidate: candidate.residual))


def numeric_factorizations(M: ExactMatrix, r: int, cfg: DecisionConfig) -> typing.Tuple[NumericCandidate, ...]:
    """Multistart alternating NNLS, best residual first, cached per (M, r, starts, seed)"""
    approx = as_float(M)
    return _cached_factorizations(tuple(approx.flat), approx.shape, r, cfg.starts, cfg.seed)


def _rationalize_matrix(values: np.ndarray, bound: int) -> ExactMatrix:
    return exact_matrix([[rationalize(float(x), bound) for x in row] for row in values])


def _rationalize_vector(values: np.ndarray, bound: int) -> np.ndarray:
    return exact_vector(rationalize(float(x), bound) for x in values)


@dataclass(frozen=True)
class SupportPattern:
    # rows j with A[j, k] = 0, per column k of A
    zero_rows: typing.Tuple[IndexSet, ...]
    # support of every column of W
    column_supports: typing.Tuple[IndexSet, ...]


def support_pattern(candidate: NumericCandidate) -> SupportPattern:
    """Zero pattern of a numeric factorization, small entries count as zeros"""
    tiny = np.finfo(np.float64).tiny
    A, W = candidate.A, candidate.W
    tolerance_A = NUMERIC_SUPPORT_TOLERANCE * max(A.max(initial=0.0), tiny)
    tolerance_W = NUMERIC_SUPPORT_TOLERANCE * max(W.max(initial=0.0), tiny)

    zero_rows = tuple(tuple(int(j) for j in np.flatnonzero(A[:, k] <= tolerance_A)) for k in range(A.shape[1]))
    supports = tuple(tuple(int(k) for k in np.flatnonzero(W[:, i] > tolerance_W)) for i in range(W.shape[1]))
    return SupportPattern(zero_rows=zero_rows, column_supports=supports)


def _complement(vectors: typing.List[np.ndarray]) -> typing.List[np.ndarray]:
    """Vectors spanning the orthogonal complement of span(vectors)"""
    basis = nullspace(exact_matrix([list(vector) for vector in vectors]))
    return [basis[:, position] for position in range(basis.shape[1])]


def _fix_columns(M_V: ExactMatrix,
                 Y: ExactMatrix,
                 G_approx: np.ndarray,
                 pattern: SupportPattern,
                 order: typing.Sequence[int],
                 bound: int) -> typing.Optional[ExactMatrix]:
    r = G_approx.shape[1]
    position = {k: p for p, k in enumerate(order)}
    G = zeros(r, r)
    for k in order:
        constraints = [M_V[j, :] for j in pattern.zero_rows[k]]

        # Y_i in span(G[:, S_i]) is linear in the column of S_i fixed last
        for i, columns in enumerate(pattern.column_supports):
            if len(columns) in (0, r) or max(columns, key=position.get) != k:
                continue
            constraints += _complement([G[:, l] for l in columns if l != k] + [Y[:, i]])

        basis = nullspace(exact_matrix([list(row) for row in constraints])) if constraints else identity(r)
        if basis.shape[1] == 0:
            return None

        coefficients = np.linalg.lstsq(as_float(basis), G_approx[:, k], rcond=None)[0]
        column = basis @ _rationalize_vector(coefficients, bound)
        if all(value == 0 for value in column):
            return None
        G[:, k] = column

    return G


def exact_factorization(M: ExactMatrix, candidate: NumericCandidate, bound: int) -> typing.Optional[Factorization]:
    """Exact factorization carrying the zero pattern of a numeric one.

    Applies when rank(M) equals the inner dimension r. Then every factorization
    is `A = M_V·G`, `W = G⁻¹·Y` for r basis columns `M_V` of M with `M = M_V·Y`,
    and the zeros of A and W are linear conditions on one column of G once
    the columns before it are fixed. Column orders are tried until one gives
    a nonnegative pair.
    """
    r = candidate.A.shape[1]
    rank_m, basis_columns = rank_and_basis(M, Axis.COLS)
    if rank_m != r:
        return None

    M_V = M[:, list(basis_columns)]
    _, basis_rows = rank_and_basis(M_V, Axis.ROWS)
    Y = inverse(M_V[list(basis_rows), :]) @ M[list(basis_rows), :]
    G_approx = np.linalg.lstsq(as_float(M_V), candidate.A, rcond=None)[0]
    pattern = support_pattern(candidate)

    for order in itertools.islice(itertools.permutations(range(r)), MAX_COLUMN_ORDERS):
        G = _fix_columns(M_V, Y, G_approx, pattern, order, bound)
        if G is None:
            continue

        A = M_V @ G
        if not is_nonnegative(A):
            continue
        try:
            W = inverse(G) @ Y
        except SingularMatrixError:
            continue

        factorization = Factorization(A, W)
        if verify_factorization(M, factorization):
            return factorization

    return None


@functools.lru_cache(maxsize=256)
def _stable_factorization(values: typing.Tuple[Scalar, ...],
                          shape: typing.Tuple[int, int],
                          r: int,
                          starts: int,
                          seed: int,
                          index: int,
                          bound: int) -> typing.Optional[Factorization]:
    """Stable exact factorization of inner dimension r, padded from the numeric
    factorization of inner dimension rank(M) with the same start index"""
    M = np.array(values, dtype=object).reshape(shape)
    rank_m = rank(M)
    if rank_m == 0 or rank_m > r:
        return None

    approx = as_float(M)
    candidate = _cached_factorizations(tuple(approx.flat), shape, rank_m, starts, seed)[index]
    if candidate.residual > NUMERIC_RESIDUAL_TOLERANCE:
        return None

    factorization = exact_factorization(M, candidate, bound)
    if factorization is None:
        return None
    return stabilize(M, pad_factorization(factorization, r))[0]


def _anchored_point(M: ExactMatrix,
                    candidate: NumericCandidate,
                    t: int,
                    U: IndexSet,
                    V: IndexSet,
                    bound: int) -> typing.Optional[typing.List[Scalar]]:
    """Rationalizes A^U and derives W_V exactly from it with the ensemble rule"""
    A_U = _rationalize_matrix(candidate.A[list(U), :], bound)
    if rank(A_U) != len(U):
        return None

    ensemble = build_ensemble(A_U)
    anchored = M[list(U), :]
    r = A_U.shape[1]
    W_V = zeros(r, t)
    for position, i in enumerate(V):
        selection = first_candidate(ensemble.candidates(anchored, i))
        if selection.ok:
            W_V[:, position] = selection.vector
        else:
            W_V[:, position] = _rationalize_matrix(candidate.W[:, [i]], bound)[:, 0]

    if rank(W_V) != t:
        return None

    return take2_point(A_U, W_V)


def _exact_points(M: ExactMatrix,
                  index: int,
                  candidate: NumericCandidate,
                  r: int,
                  s: int,
                  t: int,
                  U: IndexSet,
                  V: IndexSet,
                  cfg: DecisionConfig,
                  bound: int) -> typing.Iterator[typing.List[Scalar]]:
    stable = _stable_factorization(tuple(M.flat), M.shape, r, cfg.starts, cfg.seed, index, bound)
    if stable is not None:
        A_U, W_V = stable.A[list(U), :], stable.W[:, list(V)]
        if rank(A_U) == s and rank(W_V) == t:
            yield take2_point(A_U, W_V)

    point = _anchored_point(M, candidate, t, U, V, bound)
    if point is not None:
        yield point


def numeric_search_backend(M: ExactMatrix,
                           r: int,
                           s: int,
                           t: int,
                           U: IndexSet,
                           V: IndexSet,
                           cfg: DecisionConfig,
                           deadline: typing.Optional[Deadline] = None,
                           system: typing.Optional[PolySystem] = None) -> typing.Optional[typing.List[Scalar]]:
    """Numeric search over the take2 variables followed by exact verification.

    Every numeric factorization below the residual tolerance is turned into
    exact points two ways: the zero pattern of the factorization of inner
    dimension rank(M) is fixed exactly, padded to r and stabilized, then A^U is
    rationalized directly. Denominator bounds double
    from `cfg.denominator_bound` up to MAX_DENOMINATOR_BOUND.

    Parameters
    ----------
    M : ExactMatrix
        Nonnegative input matrix
    r, s, t : int
        Inner dimension and guessed ranks of A and W
    U, V : IndexSet
        Guessed row and column anchors
    cfg : DecisionConfig
        Multistart count, seed and the initial denominator bound
    deadline : Deadline
        Optional wall-clock limit, the search gives up once it expires
    system : PolySystem
        Compiled take2 system for this guess, compiled on first use if missing

    Returns
    -------
    typing.Optional[typing.List[Scalar]]
        Exact point on which the take2 system passes, or `None`
    """
    if len(U) != s or len(V) != t:
        raise ValueError(f"Anchor sizes |U|={len(U)}, |V|={len(V)} don't match s={s}, t={t}")

    for index, candidate in enumerate(numeric_factorizations(M, r, cfg)):
        if candidate.residual > NUMERIC_RESIDUAL_TOLERANCE:
            break

        bound, tried = cfg.denominator_bound, set()
        while bound <= MAX_DENOMINATOR_BOUND:
            if deadline is not None and deadline.expired():
                return None

            for point in _exact_points(M, index, candidate, r, s, t, U, V, cfg, bound):
                if tuple(point) in tried:
                    continue
                tried.add(tuple(point))

                if system is None:
                    system = compile_take2(M, r, s, t, U, V)
                if evaluate_system_at(system, point).verdict is Verdict.PASS:
                    return point
            bound *= 2

    return None
