"""Summary quantities: rates, aggregates, switch counts, heatmaps, and
degree-contribution decompositions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .network import ConfigurationError, DegreeRank, Graph, Order, degree_rank
from .dynamics import Trajectory

__all__ = [
    "evacuation_rate",
    "final_rate",
    "aggregate_runs",
    "switch_counts_by_degree",
    "decision_heatmap",
    "ContributionRow",
    "degree_contribution",
]


def evacuation_rate(decisions: np.ndarray) -> float:
    """Fraction of evacuating agents in one decision vector."""
    return float(np.mean(decisions))


def final_rate(trajectory: Trajectory, window: int = 1000) -> float:
    """Mean evacuation rate over the last ``window`` timesteps of a run."""
    if window > trajectory.timesteps:
        raise ConfigurationError(
            f"window {window} exceeds run length {trajectory.timesteps}"
        )
    return float(np.mean(trajectory.rates[-window:]))


def aggregate_runs(rates: Sequence[float]) -> tuple[float, float]:
    """Sample mean and sample standard deviation of per-run final rates."""
    if len(rates) == 0:
        raise ValueError("aggregate_runs needs at least one rate")
    arr = np.asarray(rates, dtype=np.float64)
    sd = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    return float(arr.mean()), sd


def switch_counts_by_degree(
    trajectory: Trajectory, graph: Graph
) -> dict[int, np.ndarray]:
    """Per-degree decision-change counts at each timestep.

    Returns degree -> array of length ``timesteps`` where entry t-1 counts
    agents of that degree whose decision at t differs from t-1. Totals are
    the array sums.
    """
    degrees = graph.degrees
    present = sorted(set(degrees.tolist()))
    counts = {d: np.zeros(trajectory.timesteps, dtype=np.int64) for d in present}
    prev = trajectory.decisions_at(0)
    for t in range(1, trajectory.timesteps + 1):
        cur = trajectory.decisions_at(t)
        changed = np.flatnonzero(cur != prev)
        if len(changed):
            for d in degrees[changed]:
                counts[int(d)][t - 1] += 1
        prev = cur
    return counts


def decision_heatmap(trajectory: Trajectory, graph: Graph, rank_seed: int = 0) -> np.ndarray:
    """(node_count, timesteps+1) decision matrix, rows sorted by degree
    descending per the highest-first rank."""
    rank = degree_rank(graph, Order.HIGHEST_FIRST, seed=rank_seed)
    rows = rank.ranked_nodes
    out = np.zeros((graph.node_count, trajectory.timesteps + 1), dtype=np.uint8)
    for t in range(trajectory.timesteps + 1):
        out[:, t] = trajectory.decisions_at(t)[rows]
    return out


@dataclass(frozen=True)
class ContributionRow:
    """One degree class's contribution to the final evacuation rate.

    ``degree`` is None for the Start row (rate with no prioritisation).
    Changes are in percentage points per incentive level; the per-agent
    column divides by the degree-class population.
    """

    degree: int | None
    population_pct: float
    rate_change: dict[float, float]
    rate_change_per_agent: dict[float, float] | None


def degree_contribution(
    final_rates: Mapping[tuple[float, float], float], rank: DegreeRank
) -> list[ContributionRow]:
    """Decompose final rates into per-degree-class increments.

    ``final_rates`` maps (theta, gamma) -> mean final rate; it must contain
    gamma = 0 and every cumulative degree threshold of the rank, for each
    theta. The Start row plus all rate changes telescopes to the rate at the
    last threshold (gamma = 1).
    """
    thetas = sorted({t for t, _ in final_rates})
    gammas_needed = [0.0] + [float(c) for _, c in rank.cumulative_thresholds]
    for theta in thetas:
        for g in gammas_needed:
            if (theta, g) not in final_rates:
                raise ConfigurationError(
                    f"missing final rate at theta={theta}, gamma={g}"
                )
    rows = [
        ContributionRow(
            degree=None,
            population_pct=math.nan,
            rate_change={t: 100.0 * final_rates[(t, 0.0)] for t in thetas},
            rate_change_per_agent=None,
        )
    ]
    prev_gamma = 0.0
    for (degree, cum), (_, count) in zip(rank.cumulative_thresholds, rank.class_counts()):
        gamma = float(cum)
        change = {
            t: 100.0 * (final_rates[(t, gamma)] - final_rates[(t, prev_gamma)])
            for t in thetas
        }
        rows.append(
            ContributionRow(
                degree=degree,
                population_pct=100.0 * count / rank.node_count,
                rate_change=change,
                rate_change_per_agent={t: change[t] / count for t in thetas},
            )
        )
        prev_gamma = gamma
    return rows
