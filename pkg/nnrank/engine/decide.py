import functools
import itertools
import multiprocessing
import numpy as np
import time
import typing

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from rich.console import Console
from tqdm import tqdm

from nnrank.compiler.compile import compile_take2
from nnrank.compiler.evaluate import evaluate_system_at
from nnrank.engine.config import DecisionConfig
from nnrank.engine.search import numeric_search_backend
from nnrank.errors import FactorizationError
from nnrank.exact.linalg import Axis, inverse, rank, rank_and_basis
from nnrank.exact.matrix import ExactMatrix, IndexSet, exact_matrix, identity, is_nonnegative, zeros
from nnrank.exact.scalar import sign
from nnrank.factor.core import Factorization, pad_factorization, verify_factorization
from nnrank.factor.ensemble import Verdict as PredicateVerdict
from nnrank.utils.time_measure import Deadline


console = Console(stderr=True)


class Verdict(Enum):
    YES = "YES"
    NO = "NO"
    UNKNOWN = "UNKNOWN"


class Provenance(Enum):
    EXACT_SMALL_RANK = "exact-small-rank"
    NUMERIC_THEN_VERIFIED = "numeric-then-verified"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class Guess:
    s: int
    t: int
    U: IndexSet
    V: IndexSet


@dataclass(frozen=True)
class DecisionOutcome:
    verdict: Verdict
    provenance: Provenance
    certificate: typing.Optional[Factorization] = None
    guess: typing.Optional[Guess] = None

    def __post_init__(self):
        assert self.verdict is not Verdict.YES or self.certificate is not None
        assert self.verdict is not Verdict.NO or self.provenance is Provenance.EXACT_SMALL_RANK


def _yes(M: ExactMatrix, r: int, factorization: Factorization, provenance: Provenance,
         guess: typing.Optional[Guess] = None) -> DecisionOutcome:
    certificate = pad_factorization(factorization, r)
    assert verify_factorization(M, certificate), "YES certificate has to factor M"
    return DecisionOutcome(verdict=Verdict.YES, provenance=provenance, certificate=certificate, guess=guess)


def _trivial_factorization(M: ExactMatrix) -> Factorization:
    m, n = M.shape
    if n <= m:
        return Factorization(M.copy(), identity(n))
    return Factorization(identity(m), M.copy())


def _cross(u: np.ndarray, v: np.ndarray) -> int:
    return sign(u[0] * v[1] - u[1] * v[0])


def exact_small_rank_oracle(M: ExactMatrix, r: int) -> DecisionOutcome:
    """Exact verdict for r <= 2, where the nonnegative rank equals the rank.

    A rank-2 certificate factors through the two extreme columns of the
    planar cone spanned by the columns of M.
    """
    if r > 2:
        raise ValueError(f"The exact oracle only handles r <= 2, got {r}")
    if r < 1:
        raise ValueError(f"Target rank has to be positive, got {r}")

    M = exact_matrix(M)
    m, n = M.shape
    rank_m, columns = rank_and_basis(M, Axis.COLS)
    if rank_m > r:
        return DecisionOutcome(verdict=Verdict.NO, provenance=Provenance.EXACT_SMALL_RANK)

    if rank_m == 0:
        return _yes(M, r, Factorization(zeros(m, 0), zeros(0, n)), Provenance.EXACT_SMALL_RANK)

    if rank_m == 1:
        base = M[:, columns[0]]
        pivot = next(j for j in range(m) if base[j] != 0)
        W = zeros(1, n)
        for i in range(n):
            W[0, i] = M[pivot, i] / base[pivot]
        return _yes(M, r, Factorization(base.reshape(m, 1).copy(), W), Provenance.EXACT_SMALL_RANK)

    # coordinates of every column in the basis of two independent columns
    basis = M[:, list(columns)]
    _, rows = rank_and_basis(basis, Axis.ROWS)
    to_coords = inverse(basis[list(rows), :])
    coords = [to_coords @ M[list(rows), i] for i in range(n)]

    nonzero = [i for i in range(n) if any(value != 0 for value in coords[i])]
    order = functools.cmp_to_key(lambda i, k: -_cross(coords[i], coords[k]))
    first = min(nonzero, key=order)
    last = max(nonzero, key=order)

    extremes = exact_matrix([coords[first], coords[last]]).T
    to_extremes = inverse(extremes)
    W = zeros(2, n)
    for i in range(n):
        W[:, i] = to_extremes @ coords[i]

    A = M[:, [first, last]].copy()
    return _yes(M, r, Factorization(A, W), Provenance.EXACT_SMALL_RANK)


def enumerate_guesses(M: ExactMatrix, r: int, cfg: DecisionConfig,
                      rng: typing.Optional[np.random.Generator] = None) -> typing.List[Guess]:
    """Guesses (s, t, U, V) with s, t in [rank(M), r] in increasing order.

    Anchors are enumerated exhaustively for small matrices, otherwise
    `cfg.sampled_anchors` distinct (U, V) pairs are sampled per (s, t).
    """
    m, n = M.shape
    rank_m = max(rank(M), 1)
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    exhaustive = cfg.exhaustive_anchors(m, n)

    guesses = []
    for s in range(rank_m, min(r, m) + 1):
        for t in range(rank_m, min(r, n) + 1):
            if exhaustive:
                for U in itertools.combinations(range(m), s):
                    for V in itertools.combinations(range(n), t):
                        guesses.append(Guess(s, t, U, V))
                continue

            seen = set()
            for _ in range(cfg.sampled_anchors * 4):
                U = tuple(sorted(int(j) for j in rng.choice(m, size=s, replace=False)))
                V = tuple(sorted(int(i) for i in rng.choice(n, size=t, replace=False)))
                if (U, V) not in seen:
                    seen.add((U, V))
                    guesses.append(Guess(s, t, U, V))
                if len(seen) == cfg.sampled_anchors:
                    break

    return guesses


@dataclass
class GuessJob:
    M: ExactMatrix
    r: int
    guess: Guess
    cfg: DecisionConfig
    # wall-clock end of the whole search, shared by every job
    end_time: float


def _run_guess(job: GuessJob) -> typing.Tuple[Guess, typing.Optional[Factorization]]:
    try:
        guess = job.guess
        deadline = Deadline(job.end_time - time.time())
        if deadline.expired():
            return guess, None

        system = compile_take2(job.M, job.r, guess.s, guess.t, guess.U, guess.V)
        point = numeric_search_backend(job.M, job.r, guess.s, guess.t, guess.U, guess.V, job.cfg,
                                       deadline=deadline, system=system)
        if point is None:
            return guess, None

        evaluation = evaluate_system_at(system, point)
        assert evaluation.verdict is PredicateVerdict.PASS
        return guess, evaluation.factorization
    except Exception:
        console.print_exception()
        return job.guess, None


def decide_rank_plus(M: ExactMatrix, r: int, cfg: typing.Optional[DecisionConfig] = None) -> DecisionOutcome:
    """Decides whether the nonnegative rank of `M` is at most `r`.

    NO is only reported from exact arguments. A failed numeric search is
    reported as UNKNOWN.

    Raises
    ------
    FactorizationError
        If `M` has negative entries
    """
    cfg = cfg if cfg is not None else DecisionConfig()
    M = exact_matrix(M)
    if not is_nonnegative(M):
        raise FactorizationError("Matrix has negative entries")
    if r < 1:
        raise ValueError(f"Target rank has to be positive, got {r}")

    m, n = M.shape
    rank_m = rank(M)
    if rank_m > r:
        return DecisionOutcome(verdict=Verdict.NO, provenance=Provenance.EXACT_SMALL_RANK)
    if rank_m == 0:
        return _yes(M, r, Factorization(zeros(m, 0), zeros(0, n)), Provenance.EXACT_SMALL_RANK)
    if r >= min(m, n):
        return _yes(M, r, _trivial_factorization(M), Provenance.EXACT_SMALL_RANK)
    if r <= 2:
        return exact_small_rank_oracle(M, r)

    deadline = Deadline(cfg.budget_seconds)
    guesses = enumerate_guesses(M, r, cfg)
    console.log(f"Searching {len(guesses)} guesses for rank+ <= {r} of a {m}x{n} matrix")

    if cfg.process_num > 1:
        end_time = time.time() + deadline.remaining
        jobs = [GuessJob(M=M, r=r, guess=guess, cfg=cfg, end_time=end_time) for guess in guesses]
        pool_ctx = multiprocessing.get_context("spawn")
        with pool_ctx.Pool(processes=cfg.process_num) as pool:
            # results in guess order, the same certificate as the in-process loop
            for guess, factorization in tqdm(pool.imap(_run_guess, jobs),
                                             desc="Searching guesses...",
                                             ascii=True,
                                             total=len(jobs)):
                if factorization is not None:
                    pool.terminate()
                    return _yes(M, r, factorization, Provenance.NUMERIC_THEN_VERIFIED, guess)
                if deadline.expired():
                    break

        return DecisionOutcome(verdict=Verdict.UNKNOWN, provenance=Provenance.EXHAUSTED)

    for guess in guesses:
        if deadline.expired():
            break

        point = numeric_search_backend(M, r, guess.s, guess.t, guess.U, guess.V, cfg, deadline=deadline)
        if point is None:
            continue

        evaluation = evaluate_system_at(compile_take2(M, r, guess.s, guess.t, guess.U, guess.V), point)
        assert evaluation.verdict is PredicateVerdict.PASS
        console.log(f"Verified certificate for s={guess.s}, t={guess.t}, U={guess.U}, V={guess.V}")
        return _yes(M, r, evaluation.factorization, Provenance.NUMERIC_THEN_VERIFIED, guess)

    return DecisionOutcome(verdict=Verdict.UNKNOWN, provenance=Provenance.EXHAUSTED)


def plant_instance(m: int,
                   n: int,
                   r: int,
                   rng: np.random.Generator,
                   separable: bool = True) -> typing.Tuple[ExactMatrix, Factorization]:
    """Random nonnegative `M = A·W` of rank r with small rational entries.

    A separable plant carries an identity block in the first r rows of A and
    the first r columns of W.
    """
    if r > min(m, n):
        raise ValueError(f"Can't plant rank {r} into a {m}x{n} matrix")

    values = [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3)]
    while True:
        A = exact_matrix([[values[rng.integers(len(values))] for _ in range(r)] for _ in range(m)])
        W = exact_matrix([[values[rng.integers(len(values))] for _ in range(n)] for _ in range(r)])
        if separable:
            A[:r, :] = identity(r)
            W[:, :r] = identity(r)

        factorization = Factorization(A, W)
        M = factorization.product()
        if rank(M) == r:
            return M, factorization
