"""Experiment grid orchestration over scenario x theta x gamma x seed.

Every cell derives its own seed from the master seed and its coordinates, so
results are independent of execution order and worker count, and a grid can
be re-run incrementally.
"""

from __future__ import annotations

import csv
import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import rng
from .dynamics import NeighborSampling, SimulationConfig, run
from .metrics import aggregate_runs, final_rate
from .network import Graph, degree_rank
from .payoff import PayoffMatrix, PayoffParams, incentive_matrix, paper_coefficient_matrix
from .scenario import ScenarioSpec, Variant, initialize_decisions, priority_set

__all__ = [
    "SweepGrid",
    "CellRecord",
    "SweepResult",
    "cell_seed",
    "run_cell",
    "run_sweep",
    "threshold_experiment",
    "graph_digest",
]

DEFAULT_THETAS = (-0.10, 0.0, 0.10, 0.20)


def graph_digest(graph: Graph) -> str:
    h = hashlib.blake2b(digest_size=8)
    h.update(graph.indptr.tobytes())
    h.update(graph.indices.tobytes())
    return h.hexdigest()


@dataclass(frozen=True)
class SweepGrid:
    variants: tuple[Variant, ...]
    thetas: tuple[float, ...] = DEFAULT_THETAS
    gammas: tuple[float, ...] = ()
    runs: int = 5
    master_seed: int = 0

    def __post_init__(self):
        if not self.variants or not self.thetas or not self.gammas:
            raise ValueError("grid axes must be non-empty")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")

    def cells(self):
        for variant in self.variants:
            for theta in self.thetas:
                for gamma in self.gammas:
                    for run_idx in range(self.runs):
                        yield variant, theta, gamma, run_idx


@dataclass(frozen=True)
class DynamicsSpec:
    """Picklable per-cell dynamics settings shared across a sweep."""

    mode: str = "paper"                 # paper | formula
    params: PayoffParams = field(default_factory=PayoffParams)
    timesteps: int = 3000
    window: int = 1000
    random_stay_prob: float = 0.5
    pin_priority: bool = False
    neighbor_sampling: NeighborSampling = NeighborSampling.ONE_RANDOM_NEIGHBOR
    # award opponent-side coefficients in mixed interactions (see dynamics)
    swap_mixed_payoffs: bool = False

    def matrix(self, theta: float) -> PayoffMatrix:
        if self.mode == "paper":
            return paper_coefficient_matrix(theta, self.params.property_value)
        if self.mode == "formula":
            import dataclasses

            return incentive_matrix(dataclasses.replace(self.params, theta=theta))
        raise ValueError(f"unknown payoff mode {self.mode!r}")


@dataclass(frozen=True)
class CellRecord:
    variant: str
    theta: float
    gamma: float
    run: int
    seed: int
    final_rate: float


@dataclass
class SweepResult:
    records: list[CellRecord]
    config_digest: str

    def aggregates(self) -> dict[tuple[str, float, float], tuple[float, float, int]]:
        cells: dict[tuple[str, float, float], list[float]] = {}
        for r in self.records:
            cells.setdefault((r.variant, r.theta, r.gamma), []).append(r.final_rate)
        out = {}
        for key, rates in cells.items():
            mean, sd = aggregate_runs(rates)
            out[key] = (mean, sd, len(rates))
        return out

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["variant", "theta", "gamma", "run", "seed", "final_rate"])
            for r in self.records:
                w.writerow(
                    [r.variant, repr(r.theta), repr(r.gamma), r.run, r.seed,
                     repr(r.final_rate)]
                )

    @classmethod
    def from_csv(cls, path, config_digest: str) -> "SweepResult":
        records = []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                records.append(
                    CellRecord(
                        variant=row["variant"],
                        theta=float(row["theta"]),
                        gamma=float(row["gamma"]),
                        run=int(row["run"]),
                        seed=int(row["seed"]),
                        final_rate=float(row["final_rate"]),
                    )
                )
        return cls(records=records, config_digest=config_digest)

    def summary(self) -> dict:
        return {
            "config_digest": self.config_digest,
            "n_records": len(self.records),
            "aggregates": [
                {
                    "variant": v,
                    "theta": t,
                    "gamma": g,
                    "mean_rate": mean,
                    "sd": sd,
                    "n_runs": n,
                }
                for (v, t, g), (mean, sd, n) in sorted(self.aggregates().items())
            ],
        }

    def save_summary(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=2)
            fh.write("\n")


def cell_seed(master_seed: int, variant: Variant, theta: float, gamma: float, run_idx: int) -> int:
    return rng.derive_seed(
        master_seed, "cell", variant.value, float(theta), float(gamma), run_idx
    )


def sweep_digest(graph: Graph, grid: SweepGrid, spec: DynamicsSpec) -> str:
    h = hashlib.blake2b(digest_size=8)
    h.update(graph_digest(graph).encode())
    h.update(repr((grid, spec)).encode())
    return h.hexdigest()


def run_cell(
    graph: Graph,
    variant: Variant,
    theta: float,
    gamma: float,
    run_idx: int,
    master_seed: int,
    spec: DynamicsSpec,
) -> CellRecord:
    seed = cell_seed(master_seed, variant, theta, gamma, run_idx)
    rank = degree_rank(graph, variant.rank_order, seed=seed)
    scenario = ScenarioSpec(
        variant=variant,
        gamma=gamma,
        random_stay_prob=spec.random_stay_prob,
        seed=seed,
    )
    initial = initialize_decisions(graph, rank, scenario)
    pinned = None
    if spec.pin_priority:
        pinned = priority_set(rank, gamma, rng.stream(seed, "priority-shuffle"))
    config = SimulationConfig(
        matrix=spec.matrix(theta),
        timesteps=spec.timesteps,
        seed=seed,
        neighbor_sampling=spec.neighbor_sampling,
        pin_priority=spec.pin_priority,
        pinned=pinned,
        swap_mixed_payoffs=spec.swap_mixed_payoffs,
    )
    traj = run(graph, initial, config)
    return CellRecord(
        variant=variant.value,
        theta=theta,
        gamma=gamma,
        run=run_idx,
        seed=seed,
        final_rate=final_rate(traj, spec.window),
    )


_worker_graph: Optional[Graph] = None


def _init_worker(graph: Graph) -> None:
    global _worker_graph
    _worker_graph = graph


def _worker_cell(args) -> CellRecord:
    variant, theta, gamma, run_idx, master_seed, spec = args
    return run_cell(_worker_graph, variant, theta, gamma, run_idx, master_seed, spec)


def run_sweep(
    graph: Graph,
    grid: SweepGrid,
    spec: DynamicsSpec | None = None,
    workers: int = 1,
    done: Optional[SweepResult] = None,
    progress=None,
) -> SweepResult:
    """Execute every grid cell; deterministic for a fixed master seed
    regardless of worker count. ``done`` supplies already-computed records
    (matching coordinates are skipped)."""
    spec = spec or DynamicsSpec()
    digest = sweep_digest(graph, grid, spec)
    have: dict[tuple, CellRecord] = {}
    if done is not None:
        if done.config_digest != digest:
            raise ValueError(
                f"resume refused: config digest mismatch "
                f"({done.config_digest} != {digest})"
            )
        have = {(r.variant, r.theta, r.gamma, r.run): r for r in done.records}

    todo = [
        (variant, theta, gamma, run_idx)
        for variant, theta, gamma, run_idx in grid.cells()
        if (variant.value, theta, gamma, run_idx) not in have
    ]
    records = list(have.values())
    if workers <= 1:
        for i, (variant, theta, gamma, run_idx) in enumerate(todo):
            records.append(
                run_cell(graph, variant, theta, gamma, run_idx, grid.master_seed, spec)
            )
            if progress:
                progress(i + 1, len(todo))
    else:
        tasks = [(v, t, g, r, grid.master_seed, spec) for v, t, g, r in todo]
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_init_worker, initargs=(graph,)
        ) as pool:
            for i, rec in enumerate(pool.map(_worker_cell, tasks, chunksize=4)):
                records.append(rec)
                if progress:
                    progress(i + 1, len(todo))
    records.sort(key=lambda r: (r.variant, r.theta, r.gamma, r.run))
    return SweepResult(records=records, config_digest=digest)


def threshold_experiment(
    graph: Graph,
    theta: float,
    variant: Variant,
    gammas: Sequence[float],
    repeats: int,
    master_seed: int = 0,
    spec: DynamicsSpec | None = None,
) -> dict[float, list[float]]:
    """Raw per-run final rates near a tipping point, for bimodality checks."""
    spec = spec or DynamicsSpec()
    out: dict[float, list[float]] = {}
    for gamma in gammas:
        out[float(gamma)] = [
            run_cell(graph, variant, theta, float(gamma), r, master_seed, spec).final_rate
            for r in range(repeats)
        ]
    return out
