"""Comparison harness: CoA metric, complexity bound, scenario sweeps.

``run_comparison`` reproduces the benchmark methodology at desk scale:
random networks per scenario, our grouped search, the interference-blind
variant, the random baseline averaged over many draws, and the GA, all
scored by the shared assignment evaluation. Results serialize to CSV
with a fixed column set and deterministic ordering.
"""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .baselines import (
    GaParams,
    route_ga,
    route_no_interference,
    route_random_avg,
)
from .linkbudget import RadioConfig
from .pathtree import build_tree
from .router import GroupStats, SnirEvaluator, make_plan, route
from .topology import GenParams, generate_network

CSV_COLUMNS = (
    "scenario",
    "seed",
    "algorithm",
    "coa_db",
    "snir_evals",
    "path_cost_evals",
    "combinations",
    "wall_ms",
    "ga_run_index",
)


def coa(per_user_costs) -> float:
    """Cost of Algorithm: the worst (minimum) per-user path cost, in dB."""
    values = (
        list(per_user_costs.values())
        if isinstance(per_user_costs, Mapping)
        else list(per_user_costs)
    )
    if not values:
        raise ValueError("CoA of an empty cost map is undefined")
    return min(values)


def theorem1_bound(
    groups: Sequence[Sequence[int]],
    n_paths: Mapping[int, int],
    tree_nodes: Mapping[int, int],
    x_unit: float = 64.0,
) -> float:
    """Upper bound on the grouped search's operation count.

    Sum over groups and users of (product of the other members' path
    counts) * (8*v + (v + 3*(U_j - 1)) * x), where v is the user's tree
    node count and x the assumed cost of one SNIR evaluation.
    """
    total = 0.0
    for grp in groups:
        uj = len(grp)
        for i in grp:
            prod = 1
            for i2 in grp:
                if i2 != i:
                    prod *= n_paths[i2]
            v = tree_nodes[i]
            total += prod * (8.0 * v + (v + 3.0 * (uj - 1)) * x_unit)
    return total


def snir_count_bound(
    group: Sequence[int],
    n_paths: Mapping[int, int],
    tree_nodes: Mapping[int, int],
) -> int:
    """Count form of the bound: max SNIR evaluations for one group."""
    uj = len(group)
    total = 0
    for i in group:
        prod = 1
        for i2 in group:
            if i2 != i:
                prod *= n_paths[i2]
        total += prod * (tree_nodes[i] + 3 * (uj - 1))
    return total


def group_within_bound(gs: GroupStats) -> tuple[int, int]:
    """(measured SNIR evaluations, count-form bound) for one routed group."""
    return gs.snir_evals, snir_count_bound(gs.members, gs.n_paths, gs.tree_nodes)


@dataclass(frozen=True)
class Scenario:
    """One benchmark row: network shape plus the GA settings used on it."""

    b: int
    u: int
    c: int
    g: int
    ga_population: int = 20
    ga_survivors: int = 10
    ga_generations: int = 20

    @property
    def label(self) -> str:
        return f"({self.b},{self.u},{self.c},{self.g})"


TABLE1_SCENARIOS = (
    Scenario(10, 4, 3, 1, ga_population=20, ga_survivors=10, ga_generations=20),
    Scenario(20, 10, 3, 4, ga_population=40, ga_survivors=20, ga_generations=50),
    Scenario(30, 15, 5, 6, ga_population=100, ga_survivors=50, ga_generations=200),
)


@dataclass
class RunReport:
    """All algorithm results for one (scenario, seed) cell."""

    scenario: Scenario
    seed: int
    coa_ours: float
    coa_blind: float
    coa_random_avg: float
    ga_coas: list[float] = field(default_factory=list)
    counters: dict[str, dict[str, int]] = field(default_factory=dict)
    wall_ms: dict[str, float] = field(default_factory=dict)
    group_stats: list[GroupStats] = field(default_factory=list)
    blind_group_stats: list[GroupStats] = field(default_factory=list)

    @property
    def ga_min(self) -> float:
        return min(self.ga_coas) if self.ga_coas else math.nan

    @property
    def ga_max(self) -> float:
        return max(self.ga_coas) if self.ga_coas else math.nan

    @property
    def ga_avg(self) -> float:
        return sum(self.ga_coas) / len(self.ga_coas) if self.ga_coas else math.nan

    def rows(self, include_wall: bool = True) -> list[dict]:
        def wall(name: str):
            return repr(self.wall_ms.get(name, 0.0)) if include_wall else ""

        out = []
        for name, coa_db in (
            ("ours", self.coa_ours),
            ("noint", self.coa_blind),
            ("random_avg", self.coa_random_avg),
        ):
            c = self.counters.get(name, {})
            out.append(
                {
                    "scenario": self.scenario.label,
                    "seed": self.seed,
                    "algorithm": name,
                    "coa_db": repr(coa_db),
                    "snir_evals": c.get("snir_evals", 0),
                    "path_cost_evals": c.get("path_cost_evals", 0),
                    "combinations": c.get("combinations", 0),
                    "wall_ms": wall(name),
                    "ga_run_index": "",
                }
            )
        for run_idx, value in enumerate(self.ga_coas):
            c = self.counters.get(f"ga_{run_idx}", {})
            out.append(
                {
                    "scenario": self.scenario.label,
                    "seed": self.seed,
                    "algorithm": "ga",
                    "coa_db": repr(value),
                    "snir_evals": c.get("snir_evals", 0),
                    "path_cost_evals": c.get("path_cost_evals", 0),
                    "combinations": c.get("combinations", 0),
                    "wall_ms": wall(f"ga_{run_idx}"),
                    "ga_run_index": run_idx,
                }
            )
        return out


def _ga_run_seed(seed: int, run: int) -> int:
    return seed * 10_000 + run


def run_cell(
    scenario: Scenario,
    seed: int,
    cfg: RadioConfig,
    h_max: int = 4,
    random_runs: int = 1000,
    ga_runs: int = 50,
    include_ga: bool = True,
) -> RunReport:
    """Run every algorithm on one freshly generated network."""
    params = GenParams(scenario.b, scenario.u, scenario.c, seed=seed)
    net = generate_network(params, h_max=h_max)
    trees = {u: build_tree(net, u, h_max) for u in net.users}
    ev = SnirEvaluator(net, cfg)
    plan = make_plan(net, scenario.g)
    counters: dict[str, dict[str, int]] = {}
    wall: dict[str, float] = {}

    t0 = time.perf_counter()
    ours, ours_stats = route(net, cfg, plan, h_max, trees, ev)
    wall["ours"] = (time.perf_counter() - t0) * 1e3
    counters["ours"] = {
        "snir_evals": ours_stats.snir_evals,
        "path_cost_evals": ours_stats.path_cost_evals,
        "combinations": ours_stats.combinations,
    }

    t0 = time.perf_counter()
    blind, blind_stats = route_no_interference(net, cfg, plan, h_max, trees, ev)
    wall["noint"] = (time.perf_counter() - t0) * 1e3
    counters["noint"] = {
        "snir_evals": blind_stats.snir_evals,
        "path_cost_evals": blind_stats.path_cost_evals,
        "combinations": blind_stats.combinations,
    }

    s0, p0 = ev.snir_evals, ev.path_cost_evals
    t0 = time.perf_counter()
    rnd_avg = route_random_avg(net, cfg, random_runs, seed, h_max, trees, ev)
    wall["random_avg"] = (time.perf_counter() - t0) * 1e3
    counters["random_avg"] = {
        "snir_evals": ev.snir_evals - s0,
        "path_cost_evals": ev.path_cost_evals - p0,
        "combinations": random_runs,
    }

    ga_coas: list[float] = []
    if include_ga:
        for run_idx in range(ga_runs):
            ga = GaParams(
                population=scenario.ga_population,
                survivors=scenario.ga_survivors,
                generations=scenario.ga_generations,
                seed=_ga_run_seed(seed, run_idx),
            )
            s0 = ev.snir_evals
            t0 = time.perf_counter()
            ga_assignment, ga_stats = route_ga(net, cfg, ga, h_max, trees, ev)
            wall[f"ga_{run_idx}"] = (time.perf_counter() - t0) * 1e3
            ga_coas.append(coa(ga_assignment.per_user_cost_db))
            counters[f"ga_{run_idx}"] = {
                "snir_evals": ev.snir_evals - s0,
                "path_cost_evals": ga_stats.fitness_evals,
                "combinations": ga_stats.fitness_evals,
            }

    return RunReport(
        scenario=scenario,
        seed=seed,
        coa_ours=coa(ours.per_user_cost_db),
        coa_blind=coa(blind.per_user_cost_db),
        coa_random_avg=rnd_avg,
        ga_coas=ga_coas,
        counters=counters,
        wall_ms=wall,
        group_stats=ours_stats.groups,
        blind_group_stats=blind_stats.groups,
    )


def _run_cell_packed(args) -> RunReport:
    return run_cell(*args)


def run_comparison(
    scenarios: Sequence[Scenario] | None = None,
    seeds: Iterable[int] | int = 5,
    cfg: RadioConfig | None = None,
    h_max: int = 4,
    random_runs: int = 1000,
    ga_runs: int = 50,
    include_ga: bool = True,
    threads: int | None = None,
) -> list[RunReport]:
    """Sweep scenarios x seeds; cells are independent and may run in parallel.

    The report list is sorted by (scenario label, seed) regardless of
    execution order, so the output is identical for any thread count.
    """
    if scenarios is None:
        scenarios = TABLE1_SCENARIOS
    if isinstance(seeds, int):
        seeds = range(seeds)
    seeds = list(seeds)
    if threads is None:
        threads = int(os.environ.get("MESHROUTE_THREADS", "1"))
    cfg = cfg or RadioConfig()
    cells = [
        (sc, seed, cfg, h_max, random_runs, ga_runs, include_ga)
        for sc in scenarios
        for seed in seeds
    ]
    if threads > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(_run_cell_packed, cells))
    else:
        reports = [run_cell(*c) for c in cells]
    reports.sort(key=lambda r: (r.scenario.label, r.seed))
    return reports


def write_csv(reports: Sequence[RunReport], path, include_wall: bool = True) -> None:
    """Write the flattened report rows; row order is fully deterministic."""
    rows = []
    for rep in reports:
        rows.extend(rep.rows(include_wall=include_wall))
    rows.sort(
        key=lambda r: (
            r["scenario"],
            r["seed"],
            r["algorithm"],
            r["ga_run_index"] if r["ga_run_index"] != "" else -1,
        )
    )
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def read_csv(path) -> list[dict]:
    with open(path, "r", newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))
