import typing

from dataclasses import dataclass, field
from enum import Enum

from nnrank.errors import FactorizationError
from nnrank.exact.matrix import ExactMatrix, IndexSet, exact_equal
from nnrank.factor.core import (
    Factorization,
    lex_first_admissible_with_witness,
    lex_less,
    support,
    verify_factorization
)


class Phase(Enum):
    A = "A-phase"
    W = "W-phase"


@dataclass(frozen=True)
class SupportUpdate:
    phase: Phase
    index: int
    old_support: IndexSet
    new_support: IndexSet


@dataclass
class StabilizeTrace:
    updates: typing.List[SupportUpdate] = field(default_factory=list)
    rounds: int = 0

    def __len__(self) -> int:
        return len(self.updates)


def _update_phase(M: ExactMatrix,
                  left: ExactMatrix,
                  right: ExactMatrix,
                  phase: Phase,
                  trace: StabilizeTrace) -> bool:
    """Rewrites the columns of `right` in place, `left @ right == M` is kept"""
    updated = False
    for index in range(right.shape[1]):
        current = support(right[:, index])
        found = lex_first_admissible_with_witness(left, M[:, index])
        assert found is not None, "The current column is always a witness"

        first, witness = found
        if lex_less(first, current):
            right[:, index] = witness
            trace.updates.append(SupportUpdate(phase, index, current, support(witness)))
            assert exact_equal(left @ right, M), f"Product changed after update of {phase.value} {index}"
            updated = True

    return updated


def stabilize(M: ExactMatrix, factorization: Factorization) -> typing.Tuple[Factorization, StabilizeTrace]:
    """Rewrites `(A, W)` into a stable factorization of the same inner dimension.

    Rounds alternate a W-phase over the columns of `W` and an A-phase over the
    rows of `A` until a full round makes no update. Every update strictly
    decreases one support in the size-then-lex order, so the loop terminates.

    Raises
    ------
    FactorizationError
        If the input isn't a nonnegative factorization of `M`
    """
    if not verify_factorization(M, factorization):
        raise FactorizationError("Input is not a nonnegative factorization of M")

    A = factorization.A.copy()
    W = factorization.W.copy()
    trace = StabilizeTrace()
    while True:
        trace.rounds += 1
        updated = _update_phase(M, A, W, Phase.W, trace)
        # A-phase runs on the transposed problem, M^T = W^T A^T
        updated |= _update_phase(M.T, W.T, A.T, Phase.A, trace)
        if not updated:
            break

    result = Factorization(A, W)
    assert verify_factorization(M, result)
    return result, trace
