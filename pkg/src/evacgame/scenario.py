"""Initial decision assignment for the four degree-prioritisation scenarios."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import rng
from .network import ConfigurationError, DegreeRank, Graph, Order
from .payoff import Decision

__all__ = ["Variant", "ScenarioSpec", "priority_set", "initialize_decisions"]


class Variant(Enum):
    RANDOMISED_HIGHEST = "randomised-highest"
    FIXED_HIGHEST = "fixed-highest"
    RANDOMISED_LOWEST = "randomised-lowest"
    FIXED_LOWEST = "fixed-lowest"

    @property
    def rank_order(self) -> Order:
        if self in (Variant.RANDOMISED_HIGHEST, Variant.FIXED_HIGHEST):
            return Order.HIGHEST_FIRST
        return Order.LOWEST_FIRST

    @property
    def randomised_remainder(self) -> bool:
        return self in (Variant.RANDOMISED_HIGHEST, Variant.RANDOMISED_LOWEST)


@dataclass(frozen=True)
class ScenarioSpec:
    variant: Variant
    gamma: float
    random_stay_prob: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if not 0.0 <= self.random_stay_prob <= 1.0:
            raise ValueError("random_stay_prob must be in [0, 1]")


def _priority_count(gamma: float, node_count: int) -> int:
    # half-up rounding of gamma * node_count
    return int(math.floor(gamma * node_count + 0.5))


def priority_set(rank: DegreeRank, gamma: float, rng_: np.random.Generator) -> np.ndarray:
    """Node ids of the priority set at fraction gamma.

    All nodes of strictly higher-priority degree classes are included before
    any member of the boundary class; within each class the order is a
    shuffle drawn from ``rng_``, so for a fixed generator state the sets nest
    as gamma grows.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    m = _priority_count(gamma, rank.node_count)
    ranked = rank.ranked_nodes
    out = np.empty(m, dtype=np.int64)
    start = 0
    for _, count in rank.class_counts():
        members = ranked[start : start + count]
        members = members[rng_.permutation(count)]
        take = min(count, m - start)
        out[start : start + take] = members[:take]
        start += take
        if start >= m:
            break
    return out


def initialize_decisions(graph: Graph, rank: DegreeRank, spec: ScenarioSpec) -> np.ndarray:
    """Initial decision vector (uint8, 1 = evacuate) for a scenario.

    Priority nodes evacuate; the remainder stays in Fixed variants and flips
    an independent coin in Randomised variants. Deterministic per seed.
    """
    if rank.node_count != graph.node_count:
        raise ConfigurationError("rank was built from a different graph")
    if rank.order is not spec.variant.rank_order:
        raise ConfigurationError(
            f"variant {spec.variant.value} needs {spec.variant.rank_order.value}-first rank"
        )
    n = graph.node_count
    if spec.variant.randomised_remainder:
        u = rng.stream(spec.seed, "init-random").random(n)
        decisions = (u >= spec.random_stay_prob).astype(np.uint8)
    else:
        decisions = np.zeros(n, dtype=np.uint8)
    prio = priority_set(rank, spec.gamma, rng.stream(spec.seed, "priority-shuffle"))
    decisions[prio] = Decision.EVACUATE
    return decisions
