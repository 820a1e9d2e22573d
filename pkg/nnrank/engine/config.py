import os
import typing

from dataclasses import dataclass
from enum import Enum

from nnrank.settings import (
    DEFAULT_BUDGET_SECONDS,
    DEFAULT_DENOMINATOR_BOUND,
    DEFAULT_MULTISTARTS,
    DEFAULT_SAMPLED_ANCHORS,
    EXHAUSTIVE_ANCHOR_LIMIT,
    SEED_ENV_VARIABLE
)


class AnchorPolicy(Enum):
    AUTO = "auto"
    EXHAUSTIVE = "exhaustive"
    SAMPLED = "sampled"


@dataclass(frozen=True)
class DecisionConfig:
    """
    Attributes
    ----------
    budget_seconds : float
        Wall-clock budget of the numeric search
    starts : int
        Number of numeric multistarts
    denominator_bound : int
        Initial denominator bound used to rationalize numeric candidates
    anchor_policy : AnchorPolicy
        `AUTO` enumerates all anchors while m, n <= EXHAUSTIVE_ANCHOR_LIMIT and samples otherwise
    sampled_anchors : int
        Number of sampled (U, V) anchors per (s, t) guess
    seed : int
        Seed of every random choice, identical seeds give identical outcomes
    process_num : int
        Number of worker processes, 1 runs the guesses in-process
    """
    budget_seconds: float = DEFAULT_BUDGET_SECONDS
    starts: int = DEFAULT_MULTISTARTS
    denominator_bound: int = DEFAULT_DENOMINATOR_BOUND
    anchor_policy: AnchorPolicy = AnchorPolicy.AUTO
    sampled_anchors: int = DEFAULT_SAMPLED_ANCHORS
    seed: int = 0
    process_num: int = 1

    def __post_init__(self):
        if self.budget_seconds <= 0:
            raise ValueError(f"Budget has to be positive, got {self.budget_seconds}")
        if self.starts < 1 or self.sampled_anchors < 1 or self.process_num < 1:
            raise ValueError("Starts, sampled anchors and process number have to be positive")
        if self.denominator_bound < 1:
            raise ValueError(f"Denominator bound has to be positive, got {self.denominator_bound}")

    def exhaustive_anchors(self, m: int, n: int) -> bool:
        if self.anchor_policy is AnchorPolicy.AUTO:
            return m <= EXHAUSTIVE_ANCHOR_LIMIT and n <= EXHAUSTIVE_ANCHOR_LIMIT
        return self.anchor_policy is AnchorPolicy.EXHAUSTIVE


def resolve_seed(seed: typing.Optional[int]) -> int:
    """Explicit seed, else the seed environment variable, else 0"""
    if seed is not None:
        return seed

    value = os.environ.get(SEED_ENV_VARIABLE)
    if value is None or value.strip() == "":
        return 0

    try:
        return int(value)
    except ValueError:
        raise ValueError(f"{SEED_ENV_VARIABLE} has to be an integer, got `{value}`")
