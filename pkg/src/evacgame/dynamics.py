"""Synchronous evolutionary-game dynamics with a payoff-gap imitation rule.

Each timestep, every agent accumulates payoffs from all neighbor
interactions, then consults a random neighbor and adopts that neighbor's
previous decision with probability equal to the payoff gap normalized by the
population-wide payoff range (clamped at zero).

All randomness comes from counter-based streams keyed by (seed, purpose,
timestep), with one fixed slot per agent, so results are bit-identical under
any agent iteration order or parallel schedule.

A numba-compiled kernel accelerates full runs; it is exercised against the
plain numpy step in the test suite and produces bit-identical trajectories.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from . import rng
from .network import Graph
from .payoff import PayoffMatrix

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

__all__ = [
    "NeighborSampling",
    "SimulationConfig",
    "SimulationState",
    "Trajectory",
    "accumulate_payoffs",
    "imitation_probability",
    "step",
    "run",
]


class NeighborSampling(Enum):
    ONE_RANDOM_NEIGHBOR = "one-random-neighbor"
    EACH_NEIGHBOR_SEQUENTIAL = "each-neighbor-sequential"


@dataclass(frozen=True)
class SimulationConfig:
    matrix: PayoffMatrix
    timesteps: int = 3000
    seed: int = 0
    neighbor_sampling: NeighborSampling = NeighborSampling.ONE_RANDOM_NEIGHBOR
    pin_priority: bool = False
    pinned: Optional[np.ndarray] = None  # node ids pinned when pin_priority
    record_payoffs: bool = False
    # Award each agent the coefficient printed for its partner's role in
    # mixed interactions. The published aggregate results (tipping at 57%
    # prioritisation, start rates ordered 5-70% across incentives) are only
    # reproducible with this swap; the printed coefficient table itself
    # (default, no swap) makes staying dominant in every mixed pair and the
    # tipping never occurs. See README.
    swap_mixed_payoffs: bool = False

    def __post_init__(self):
        if self.timesteps < 1:
            raise ValueError("timesteps must be >= 1")
        if self.pin_priority and self.pinned is None:
            raise ValueError("pin_priority requires a pinned node set")


@dataclass
class SimulationState:
    t: int
    decisions: np.ndarray          # uint8, 1 = evacuate
    total_payoffs: np.ndarray      # per-node sum over neighbor interactions


class Trajectory:
    """Bit-packed decision history of one run, plus optional payoffs."""

    MAGIC = b"EVTRJ1"

    def __init__(self, node_count: int, timesteps: int, metadata: dict | None = None):
        self.node_count = node_count
        self.timesteps = timesteps
        self._row_bytes = (node_count + 7) // 8
        self.packed = np.zeros((timesteps + 1, self._row_bytes), dtype=np.uint8)
        self.rates = np.zeros(timesteps + 1, dtype=np.float64)
        self.payoffs: Optional[np.ndarray] = None
        self.metadata = metadata or {}

    def record(self, t: int, decisions: np.ndarray) -> None:
        self.packed[t] = np.packbits(decisions)
        self.rates[t] = decisions.mean()

    def decisions_at(self, t: int) -> np.ndarray:
        return np.unpackbits(self.packed[t], count=self.node_count)

    def __len__(self) -> int:
        return self.timesteps + 1

    def save(self, path) -> None:
        """Binary layout: magic, then little-endian uint64 node_count and
        timesteps, then (timesteps+1) rows of ceil(node_count/8) packed bytes."""
        with open(path, "wb") as fh:
            fh.write(self.MAGIC)
            fh.write(struct.pack("<QQ", self.node_count, self.timesteps))
            fh.write(self.packed.tobytes())

    @classmethod
    def load(cls, path) -> "Trajectory":
        with open(path, "rb") as fh:
            magic = fh.read(len(cls.MAGIC))
            if magic != cls.MAGIC:
                raise ValueError(f"{path}: not a trajectory file")
            node_count, timesteps = struct.unpack("<QQ", fh.read(16))
            traj = cls(node_count, timesteps)
            data = np.frombuffer(fh.read(), dtype=np.uint8)
            traj.packed = data.reshape(timesteps + 1, traj._row_bytes).copy()
        for t in range(timesteps + 1):
            traj.rates[t] = traj.decisions_at(t).mean()
        return traj


def _coefficients(matrix: PayoffMatrix, swap: bool) -> np.ndarray:
    coeff = matrix.coefficient_array() * matrix.property_value
    return coeff.T.copy() if swap else coeff


def accumulate_payoffs(
    graph: Graph,
    decisions: np.ndarray,
    matrix: PayoffMatrix,
    swap_mixed_payoffs: bool = False,
) -> np.ndarray:
    """Total payoff per node: every undirected edge pays both endpoints."""
    coeff = _coefficients(matrix, swap_mixed_payoffs)
    evac_neighbors = np.add.reduceat(
        decisions[graph.indices].astype(np.int64), graph.indptr[:-1]
    )
    deg = graph.degrees
    return (
        evac_neighbors * coeff[decisions, 1]
        + (deg - evac_neighbors) * coeff[decisions, 0]
    )


def imitation_probability(w_i: float, w_j: float, w_max: float, w_min: float) -> float:
    """Adoption probability: payoff gap over the population payoff range.

    Zero when the range is degenerate (no payoff gradient, no imitation).
    """
    if w_max <= w_min:
        return 0.0
    return max(0.0, (w_j - w_i) / (w_max - w_min))


def _imitation_draws(seed: int, t: int, n: int) -> np.ndarray:
    """2n uniforms for timestep t: slot i selects agent i's neighbor, slot
    n+i is agent i's adoption draw. Fixed slots keep results independent of
    agent iteration order."""
    return rng.stream(seed, "imitation", t).random(2 * n)


def _step_vectorized(
    graph: Graph,
    state: SimulationState,
    config: SimulationConfig,
    neighbor_matrix: np.ndarray,
) -> np.ndarray:
    n = graph.node_count
    d = state.decisions
    w = state.total_payoffs
    w_max = float(w.max())
    w_min = float(w.min())
    if w_max <= w_min:
        return d.copy()
    draws = _imitation_draws(config.seed, state.t + 1, n)
    deg = graph.degrees
    pick = (draws[:n] * deg).astype(np.int64)
    j = neighbor_matrix[np.arange(n), pick]
    prob = np.maximum(0.0, (w[j] - w) / (w_max - w_min))
    adopt = draws[n:] < prob
    out = np.where(adopt, d[j], d).astype(np.uint8)
    if config.pin_priority:
        out[config.pinned] = d[config.pinned]
    return out


def _step_sequential(
    graph: Graph, state: SimulationState, config: SimulationConfig
) -> np.ndarray:
    # Sensitivity-analysis mode: each agent scans its neighbors in random
    # order and stops at the first adoption. Deterministic per seed; agents
    # are processed in id order against the t-1 snapshot.
    d = state.decisions
    w = state.total_payoffs
    w_max = float(w.max())
    w_min = float(w.min())
    out = d.copy()
    if w_max <= w_min:
        return out
    gen = rng.stream(config.seed, "imitation-seq", state.t + 1)
    pinned = set(config.pinned.tolist()) if config.pin_priority else set()
    for i in range(graph.node_count):
        if i in pinned:
            continue
        nbrs = graph.neighbors(i)
        for j in nbrs[gen.permutation(len(nbrs))]:
            p = imitation_probability(w[i], w[j], w_max, w_min)
            if gen.random() < p:
                out[i] = d[j]
                break
    return out


def step(graph: Graph, state: SimulationState, config: SimulationConfig) -> np.ndarray:
    """Next decision vector; all adoptions reference the t-1 snapshot."""
    if config.neighbor_sampling is NeighborSampling.ONE_RANDOM_NEIGHBOR:
        return _step_vectorized(graph, state, config, graph.neighbor_matrix())
    return _step_sequential(graph, state, config)


if numba is not None:

    @numba.njit(cache=True)
    def _run_chunk(indptr, indices, deg, nbm, coeff, d, pinned_mask, draws, out):
        """Advance len(draws) steps, writing each new state into out.

        Returns the number of steps taken; stops early (without consuming
        further draws) once the population is uniform, which is absorbing.
        Evacuating-neighbor counts are maintained incrementally from the
        agents that switched.
        """
        n = d.shape[0]
        c00 = coeff[0, 0]
        c01 = coeff[0, 1]
        c10 = coeff[1, 0]
        c11 = coeff[1, 1]
        ne = np.zeros(n, dtype=np.int64)
        total = 0
        for i in range(n):
            total += d[i]
            cnt = 0
            for k in range(indptr[i], indptr[i + 1]):
                cnt += d[indices[k]]
            ne[i] = cnt
        w = np.empty(n, dtype=np.float64)
        for s in range(draws.shape[0]):
            if total == 0 or total == n:
                return s
            w_max = -1e300
            w_min = 1e300
            for i in range(n):
                if d[i] == 1:
                    wi = ne[i] * c11 + (deg[i] - ne[i]) * c10
                else:
                    wi = ne[i] * c01 + (deg[i] - ne[i]) * c00
                w[i] = wi
                if wi > w_max:
                    w_max = wi
                if wi < w_min:
                    w_min = wi
            rng_range = w_max - w_min
            if rng_range > 0.0:
                for i in range(n):
                    newd = d[i]
                    if not pinned_mask[i]:
                        j = nbm[i, int(draws[s, i] * deg[i])]
                        gap = w[j] - w[i]
                        if gap > 0.0 and draws[s, n + i] < gap / rng_range:
                            newd = d[j]
                    out[s, i] = newd
                for i in range(n):
                    if out[s, i] != d[i]:
                        delta = 1 if out[s, i] == 1 else -1
                        total += delta
                        for k in range(indptr[i], indptr[i + 1]):
                            ne[indices[k]] += delta
            else:
                for i in range(n):
                    out[s, i] = d[i]
            d = out[s]
        return draws.shape[0]


def _run_compiled(
    graph: Graph, initial: np.ndarray, config: SimulationConfig, traj: "Trajectory"
) -> None:
    n = graph.node_count
    nbm = graph.neighbor_matrix()
    deg = graph.degrees.astype(np.int64)
    coeff = _coefficients(config.matrix, config.swap_mixed_payoffs)
    pinned_mask = np.zeros(n, dtype=np.bool_)
    if config.pin_priority:
        pinned_mask[config.pinned] = True
    d = np.asarray(initial, dtype=np.uint8).copy()
    traj.record(0, d)
    chunk = 256
    t = 0
    while t < config.timesteps:
        steps = min(chunk, config.timesteps - t)
        draws = np.empty((steps, 2 * n))
        for s in range(steps):
            rng.stream(config.seed, "imitation", t + s + 1).random(out=draws[s])
        out = np.empty((steps, n), dtype=np.uint8)
        taken = _run_chunk(
            graph.indptr, graph.indices, deg, nbm, coeff, d, pinned_mask, draws, out
        )
        if taken:
            traj.packed[t + 1 : t + 1 + taken] = np.packbits(out[:taken], axis=1)
            traj.rates[t + 1 : t + 1 + taken] = out[:taken].mean(axis=1)
        t += taken
        if taken < steps:
            # uniform population: absorbing, remaining history is constant
            for rest in range(t + 1, config.timesteps + 1):
                traj.packed[rest] = traj.packed[t]
                traj.rates[rest] = traj.rates[t]
            return
        d = out[steps - 1].copy()


def run(graph: Graph, initial: np.ndarray, config: SimulationConfig) -> Trajectory:
    """Iterate the dynamics for config.timesteps steps, recording every state."""
    if len(initial) != graph.node_count:
        raise ValueError("initial decision vector length != node count")
    traj = Trajectory(
        graph.node_count,
        config.timesteps,
        metadata={"seed": config.seed, "timesteps": config.timesteps},
    )
    vectorized = config.neighbor_sampling is NeighborSampling.ONE_RANDOM_NEIGHBOR
    if vectorized and not config.record_payoffs and numba is not None:
        _run_compiled(graph, initial, config, traj)
        return traj

    if config.record_payoffs:
        traj.payoffs = np.zeros((config.timesteps + 1, graph.node_count))
    neighbor_matrix = graph.neighbor_matrix() if vectorized else None
    d = np.asarray(initial, dtype=np.uint8).copy()
    traj.record(0, d)
    for t in range(config.timesteps):
        w = accumulate_payoffs(graph, d, config.matrix, config.swap_mixed_payoffs)
        if config.record_payoffs:
            traj.payoffs[t] = w
        # uniform populations are absorbing: adopting any neighbor's decision
        # is a no-op, so the remaining history is constant
        if d.min() == d.max():
            for rest in range(t + 1, config.timesteps + 1):
                traj.packed[rest] = traj.packed[t]
                traj.rates[rest] = traj.rates[t]
            if config.record_payoffs:
                traj.payoffs[t + 1 :] = w
            return traj
        state = SimulationState(t=t, decisions=d, total_payoffs=w)
        if vectorized:
            d = _step_vectorized(graph, state, config, neighbor_matrix)
        else:
            d = _step_sequential(graph, state, config)
        traj.record(t + 1, d)
    if config.record_payoffs:
        traj.payoffs[config.timesteps] = accumulate_payoffs(
            graph, d, config.matrix, config.swap_mixed_payoffs
        )
    return traj
