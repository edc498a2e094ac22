"""Command-line entry point: network generation, single runs, sweeps."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from . import rng
from .config import ConfigError, Settings, load_config, parse_gamma, write_manifest
from .dynamics import SimulationConfig, run
from .metrics import (
    decision_heatmap,
    degree_contribution,
    final_rate,
    switch_counts_by_degree,
)
from .network import (
    PAPER_HISTOGRAM,
    ConfigurationError,
    EdgeListError,
    Graph,
    Order,
    degree_rank,
    generate_from_histogram,
    generate_small_world,
    load_edge_list,
    save_edge_list,
)
from .payoff import incentive_matrix, paper_coefficient_matrix
from .scenario import ScenarioSpec, Variant, initialize_decisions, priority_set
from .sweep import (
    DynamicsSpec,
    SweepGrid,
    SweepResult,
    graph_digest,
    run_sweep,
)

__all__ = ["main"]


def _default_workers() -> int:
    raw = os.environ.get("EVACGAME_WORKERS")
    return int(raw) if raw else 1


def _load_graph(args, settings: Settings) -> Graph:
    path = getattr(args, "graph", None) or settings.get("network", "path")
    if path:
        return load_edge_list(path)
    source = settings.get("network", "source", "histogram")
    seed = int(settings.get("network", "seed", "0"))
    if source == "histogram":
        return generate_from_histogram(PAPER_HISTOGRAM, seed=seed)
    if source == "ws":
        return generate_small_world(
            n=int(settings.get("network", "n", "5000")),
            k=int(settings.get("network", "k", "4")),
            rewire_prob=float(settings.get("network", "rewire_prob", "0.3")),
            seed=seed,
        )
    raise ConfigError(f"[network] unknown source {source!r}")


def _matrix(settings: Settings, theta: float):
    if settings.payoff_mode() == "paper":
        params = settings.payoff_params()
        return paper_coefficient_matrix(theta, params.property_value)
    import dataclasses

    return incentive_matrix(dataclasses.replace(settings.payoff_params(), theta=theta))


def _dynamics_spec(settings: Settings) -> DynamicsSpec:
    return DynamicsSpec(
        mode=settings.payoff_mode(),
        params=settings.payoff_params(),
        timesteps=int(settings.get("dynamics", "timesteps", "3000")),
        window=int(settings.get("sweep", "window", "1000")),
        random_stay_prob=float(settings.get("scenario", "random_stay_prob", "0.5")),
        pin_priority=settings.boolean("dynamics", "pin_priority"),
        neighbor_sampling=settings.neighbor_sampling(),
        swap_mixed_payoffs=settings.boolean("dynamics", "swap_mixed_payoffs"),
    )


# ---------------------------------------------------------------- net


def cmd_net_gen_ws(args) -> int:
    g = generate_small_world(args.nodes, args.k, args.rewire_prob, args.seed)
    save_edge_list(g, args.output)
    print(f"wrote {args.output}: {g.node_count} nodes, {g.edge_count} edges")
    return 0


def cmd_net_gen_hist(args) -> int:
    if args.paper:
        hist = PAPER_HISTOGRAM
    else:
        with open(args.histogram) as fh:
            hist = {int(k): int(v) for k, v in json.load(fh).items()}
    g = generate_from_histogram(hist, seed=args.seed)
    save_edge_list(g, args.output)
    print(f"wrote {args.output}: {g.node_count} nodes, {g.edge_count} edges")
    return 0


def cmd_net_stats(args) -> int:
    g = load_edge_list(args.edgefile)
    order = Order.HIGHEST_FIRST if args.order == "highest" else Order.LOWEST_FIRST
    rank = degree_rank(g, order)
    writer = csv.writer(sys.stdout)
    writer.writerow(["degree", "count", "cumulative_fraction"])
    for (degree, cum), (_, count) in zip(rank.cumulative_thresholds, rank.class_counts()):
        writer.writerow([degree, count, repr(float(cum))])
    return 0


# ---------------------------------------------------------------- run


def cmd_run(args) -> int:
    settings = load_config(args.config)
    if args.variant:
        settings.set("scenario", "variant", args.variant)
    if args.gamma is not None:
        settings.set("scenario", "gamma", repr(parse_gamma(args.gamma)))
    if args.theta is not None:
        settings.set("payoff", "theta", repr(args.theta))
    if args.seed is not None:
        settings.set("scenario", "seed", args.seed)
        settings.set("dynamics", "seed", args.seed)
    if args.timesteps is not None:
        settings.set("dynamics", "timesteps", args.timesteps)

    graph = _load_graph(args, settings)
    variant = settings.variant()
    seed = int(settings.get("dynamics", "seed", "0"))
    gamma = float(settings.get("scenario", "gamma", "0"))
    theta = float(settings.get("payoff", "theta", "0"))
    spec = ScenarioSpec(
        variant=variant,
        gamma=gamma,
        random_stay_prob=float(settings.get("scenario", "random_stay_prob", "0.5")),
        seed=int(settings.get("scenario", "seed", str(seed))),
    )
    rank = degree_rank(graph, variant.rank_order, seed=spec.seed)
    initial = initialize_decisions(graph, rank, spec)
    pin = settings.boolean("dynamics", "pin_priority")
    pinned = None
    if pin:
        pinned = priority_set(rank, gamma, rng.stream(spec.seed, "priority-shuffle"))
    config = SimulationConfig(
        matrix=_matrix(settings, theta),
        timesteps=int(settings.get("dynamics", "timesteps", "3000")),
        seed=seed,
        neighbor_sampling=settings.neighbor_sampling(),
        pin_priority=pin,
        pinned=pinned,
        swap_mixed_payoffs=settings.boolean("dynamics", "swap_mixed_payoffs"),
    )
    traj = run(graph, initial, config)

    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    traj.save(out / "trajectory.bin")
    with open(out / "rates.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestep", "evacuation_rate"])
        for t, rate in enumerate(traj.rates):
            writer.writerow([t, repr(float(rate))])
    emitted = ["trajectory.bin", "rates.csv"]
    if "heatmap" in args.emit:
        heat = decision_heatmap(traj, graph, rank_seed=spec.seed)
        with open(out / "heatmap.csv", "w") as fh:
            for row in heat:
                fh.write("".join("E" if v else "S" for v in row) + "\n")
        emitted.append("heatmap.csv")
    if "switches" in args.emit:
        counts = switch_counts_by_degree(traj, graph)
        with open(out / "switches.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["degree", "timestep", "count"])
            for degree in sorted(counts):
                for t, c in enumerate(counts[degree], start=1):
                    if c:
                        writer.writerow([degree, t, int(c)])
        emitted.append("switches.csv")
    write_manifest(
        out / "manifest.json",
        settings,
        graph_digest=graph_digest(graph),
        seed=seed,
        outputs=emitted,
        final_rate=final_rate(traj, min(1000, config.timesteps)),
    )
    print(f"final rate {final_rate(traj, min(1000, config.timesteps)):.4f} -> {out}")
    return 0


# ---------------------------------------------------------------- sweep


def _write_sweep_outputs(out: Path, result: SweepResult, settings: Settings, graph: Graph) -> None:
    out.mkdir(parents=True, exist_ok=True)
    result.to_csv(out / "results.csv")
    result.save_summary(out / "summary.json")
    with open(out / "aggregates.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["variant", "theta", "gamma", "mean_rate", "sd", "n_runs"])
        for (v, t, g), (mean, sd, n) in sorted(result.aggregates().items()):
            writer.writerow([v, repr(t), repr(g), repr(mean), repr(sd), n])
    write_manifest(
        out / "manifest.json",
        settings,
        graph_digest=graph_digest(graph),
        sweep_digest=result.config_digest,
        outputs=["results.csv", "aggregates.csv", "summary.json"],
    )


def _parse_floats(raw: str) -> tuple[float, ...]:
    return tuple(float(x) for x in raw.replace(",", " ").split())


def cmd_sweep_run(args) -> int:
    settings = load_config(args.config)
    if args.seed is not None:
        settings.set("sweep", "master_seed", args.seed)
    variants = tuple(
        Variant(v)
        for v in settings.get("sweep", "variants", "randomised-highest").split()
    )
    thetas = _parse_floats(settings.get("sweep", "thetas", "-0.1 0.0 0.1 0.2"))
    gammas_raw = settings.get("sweep", "gammas")
    if not gammas_raw:
        raise ConfigError("[sweep] gammas is required for sweep run")
    gammas = _parse_floats(gammas_raw)
    grid = SweepGrid(
        variants=variants,
        thetas=thetas,
        gammas=gammas,
        runs=int(settings.get("sweep", "runs", "5")),
        master_seed=int(settings.get("sweep", "master_seed", "0")),
    )
    graph = _load_graph(args, settings)
    spec = _dynamics_spec(settings)
    out = Path(args.output)
    done = None
    if args.resume and (out / "results.csv").exists():
        summary = json.loads((out / "summary.json").read_text())
        done = SweepResult.from_csv(out / "results.csv", summary["config_digest"])
    result = run_sweep(graph, grid, spec, workers=args.workers, done=done)
    _write_sweep_outputs(out, result, settings, graph)
    print(f"{len(result.records)} records -> {args.output}")
    return 0


def _figure_gammas(graph: Graph, order: Order) -> tuple[float, ...]:
    # percent grid plus the exact degree-class thresholds so boundary cells
    # are never missed
    grid = {round(0.01 * i, 2) for i in range(101)}
    rank = degree_rank(graph, order)
    grid.update(float(c) for _, c in rank.cumulative_thresholds)
    return tuple(sorted(grid))


def _figure_cmd(args, variant: Variant) -> int:
    settings = load_config(args.config)
    if args.seed is not None:
        settings.set("sweep", "master_seed", args.seed)
    graph = _load_graph(args, settings)
    gammas = _figure_gammas(graph, variant.rank_order)
    grid = SweepGrid(
        variants=(variant,),
        thetas=_parse_floats(settings.get("sweep", "thetas", "-0.1 0.0 0.1 0.2")),
        gammas=gammas,
        runs=args.runs,
        master_seed=int(settings.get("sweep", "master_seed", "0")),
    )
    spec = _dynamics_spec(settings)
    out = Path(args.output)
    done = None
    if args.resume and (out / "results.csv").exists():
        summary = json.loads((out / "summary.json").read_text())
        done = SweepResult.from_csv(out / "results.csv", summary["config_digest"])
    result = run_sweep(graph, grid, spec, workers=args.workers, done=done)
    _write_sweep_outputs(out, result, settings, graph)
    print(f"{len(result.records)} records -> {args.output}")
    return 0


def cmd_sweep_fig2(args) -> int:
    return _figure_cmd(args, Variant.RANDOMISED_HIGHEST)


def cmd_sweep_fig3(args) -> int:
    return _figure_cmd(args, Variant.RANDOMISED_LOWEST)


def _table_cmd(args, variant: Variant) -> int:
    settings = load_config(args.config)
    if args.seed is not None:
        settings.set("sweep", "master_seed", args.seed)
    graph = _load_graph(args, settings)
    rank = degree_rank(graph, variant.rank_order)
    gammas = (0.0,) + tuple(float(c) for _, c in rank.cumulative_thresholds)
    thetas = _parse_floats(settings.get("sweep", "thetas", "-0.1 0.0 0.1 0.2"))
    grid = SweepGrid(
        variants=(variant,),
        thetas=thetas,
        gammas=gammas,
        runs=args.runs,
        master_seed=int(settings.get("sweep", "master_seed", "0")),
    )
    result = run_sweep(graph, grid, _dynamics_spec(settings), workers=args.workers)
    rates = {
        (theta, gamma): mean
        for (_, theta, gamma), (mean, _, _) in result.aggregates().items()
    }
    rows = degree_contribution(rates, rank)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "contribution.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["degree", "population_pct"]
        header += [f"rate_change_{t}" for t in thetas]
        header += [f"rate_change_per_agent_{t}" for t in thetas]
        writer.writerow(header)
        for row in rows:
            record = [
                "Start" if row.degree is None else row.degree,
                "" if row.degree is None else f"{row.population_pct:.2f}",
            ]
            record += [f"{row.rate_change[t]:.2f}" for t in thetas]
            if row.rate_change_per_agent is None:
                record += ["N/A"] * len(thetas)
            else:
                record += [f"{row.rate_change_per_agent[t]:.2f}" for t in thetas]
            writer.writerow(record)
    result.to_csv(out / "results.csv")
    write_manifest(
        out / "manifest.json",
        settings,
        graph_digest=graph_digest(graph),
        sweep_digest=result.config_digest,
        outputs=["contribution.csv", "results.csv"],
    )
    print(f"contribution table -> {out / 'contribution.csv'}")
    return 0


def cmd_sweep_table5(args) -> int:
    return _table_cmd(args, Variant.RANDOMISED_HIGHEST)


def cmd_sweep_table6(args) -> int:
    return _table_cmd(args, Variant.RANDOMISED_LOWEST)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evacgame",
        description="Evacuation-decision dynamics on social networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    net = sub.add_parser("net", help="network generation and inspection")
    netsub = net.add_subparsers(dest="subcommand", required=True)

    p = netsub.add_parser("gen-ws", help="Watts-Strogatz small-world graph")
    p.add_argument("--nodes", type=int, default=5000)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--rewire-prob", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_net_gen_ws)

    p = netsub.add_parser("gen-hist", help="configuration-model graph from a degree histogram")
    p.add_argument("--paper", action="store_true", help="use the built-in 5000-node histogram")
    p.add_argument("--histogram", help="JSON file of degree: count pairs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_net_gen_hist)

    p = netsub.add_parser("stats", help="degree histogram and cumulative thresholds as CSV")
    p.add_argument("edgefile")
    p.add_argument("--order", choices=["highest", "lowest"], default="highest")
    p.set_defaults(func=cmd_net_stats)

    p = sub.add_parser("run", help="single simulation run")
    p.add_argument("--config")
    p.add_argument("--graph", help="edge-list file (overrides [network])")
    p.add_argument("--variant", choices=[v.value for v in Variant])
    p.add_argument("--gamma", help="priority fraction ('0.57' or '57%%')")
    p.add_argument("--theta", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--timesteps", type=int)
    p.add_argument("--emit", action="append", default=[], choices=["heatmap", "switches"])
    p.add_argument("-o", "--output", default="run-output")
    p.set_defaults(func=cmd_run)

    sw = sub.add_parser("sweep", help="experiment grids and table/figure reproductions")
    swsub = sw.add_subparsers(dest="subcommand", required=True)
    for name, func, extra in [
        ("run", cmd_sweep_run, {}),
        ("fig2", cmd_sweep_fig2, {"runs": 5}),
        ("fig3", cmd_sweep_fig3, {"runs": 5}),
        ("table5", cmd_sweep_table5, {"runs": 5}),
        ("table6", cmd_sweep_table6, {"runs": 5}),
    ]:
        p = swsub.add_parser(name)
        p.add_argument("--config")
        p.add_argument("--graph")
        p.add_argument("--seed", type=int)
        p.add_argument("--workers", type=int, default=_default_workers())
        p.add_argument("--resume", action="store_true")
        p.add_argument("-o", "--output", default=f"sweep-{name}")
        if "runs" in extra:
            p.add_argument("--runs", type=int, default=extra["runs"])
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ConfigurationError, EdgeListError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
