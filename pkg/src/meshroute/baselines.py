"""Comparison algorithms: interference-blind search, random choice, GA.

Every baseline is scored by the same ``evaluate_assignment`` semantics
as the main search. ``BatchAssignmentEvaluator`` evaluates whole
populations of path-index choices at once; it is numerically the same
computation as ``evaluate_assignment`` (verified by tests) and feeds the
same instrumentation counters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .pathtree import Path, PathTree, build_tree, valid_paths
from .linkbudget import RadioConfig
from .router import (
    Assignment,
    GroupingPlan,
    RouteStats,
    RoutingError,
    SnirEvaluator,
    evaluate_assignment,
    route,
)
from .topology import MeshNetwork

#: Noise override that drowns out interference during Algorithm B's search.
BLIND_SEARCH_NOISE_DBM = 30.0


@dataclass(frozen=True)
class GaParams:
    """Elitist GA settings: population K, survivors J per generation."""

    population: int = 20
    survivors: int = 10
    generations: int = 20
    mutation_prob: float = 0.1
    seed: int = 0

    def __post_init__(self) -> None:
        if not 1 <= self.survivors < self.population:
            raise ValueError(
                f"need 1 <= survivors < population, got "
                f"({self.population}, {self.survivors})"
            )
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError("mutation_prob must be in [0, 1]")


class BatchAssignmentEvaluator:
    """CoA of many whole-network path choices, vectorized.

    A choice is one path index per user. Interference for a user is the
    union of the other users' chosen links (duplicates collapse), with
    the usual per-link exclusions already baked into the evaluator's
    pairwise table.
    """

    def __init__(
        self,
        ev: SnirEvaluator,
        users: Sequence[int],
        paths_by: Mapping[int, list[Path]],
    ):
        self.ev = ev
        self.users = list(users)
        self.paths_by = paths_by
        e2 = len(ev.links)
        self.e2 = e2
        n_paths = [len(paths_by[u]) for u in self.users]
        if any(n == 0 for n in n_paths):
            raise RoutingError("every user needs at least one valid path")
        self.n_paths = np.array(n_paths)
        offsets = np.concatenate([[0], np.cumsum(self.n_paths)])
        self.offsets = offsets[:-1]
        total = int(offsets[-1])
        lmax = max(
            (len(p.bs_links) for u in self.users for p in paths_by[u]), default=0
        )
        self.lmax = lmax
        self.incidence = np.zeros((total, e2), dtype=np.int16)
        self.vic_ids = np.zeros((total, lmax), dtype=np.intp)
        self.vic_mask = np.zeros((total, lmax), dtype=bool)
        self.link_counts = np.zeros(total, dtype=np.int64)
        for col, u in enumerate(self.users):
            for k, p in enumerate(paths_by[u]):
                row = self.offsets[col] + k
                ids = ev.link_ids(p.bs_links)
                self.incidence[row, list(ids)] = 1
                self.vic_ids[row, : len(ids)] = [
                    ev._lid[l] for l in p.bs_links
                ]
                self.vic_mask[row, : len(p.bs_links)] = True
                self.link_counts[row] = len(p.bs_links)

    def coa_many(self, choices: np.ndarray) -> np.ndarray:
        """CoA (dB) of each row of ``choices`` (one path index per user)."""
        choices = np.asarray(choices)
        k, u = choices.shape
        ev = self.ev
        rows = self.offsets[None, :] + choices  # (k, u)
        ev.path_cost_evals += k * u
        ev.snir_evals += int(self.link_counts[rows].sum())
        if self.e2 == 0 or self.lmax == 0:
            per_user = np.where(
                self.link_counts[rows] == 0, math.inf, -math.inf
            )
            return per_user.min(axis=1)
        counts = self.incidence[rows].sum(axis=1)  # (k, e2) active-link counts
        coa = np.full(k, math.inf)
        noise = ev._noise_mw
        w = ev._W
        prx = ev._prx
        for col in range(u):
            r = rows[:, col]
            others = (counts - self.incidence[r]) > 0
            vic = self.vic_ids[r]  # (k, lmax)
            mask = self.vic_mask[r]
            inter = np.einsum("kle,ke->kl", w[vic], others.astype(np.float64))
            snir = prx[vic] - 10.0 * np.log10(noise + inter)
            cost = np.min(
                np.where(mask, snir, math.inf), axis=1, initial=math.inf
            )
            coa = np.minimum(coa, cost)
        return coa


def _trees_and_paths(
    net: MeshNetwork, h_max: int, trees: Mapping[int, PathTree] | None
) -> tuple[Mapping[int, PathTree], dict[int, list[Path]]]:
    if trees is None:
        trees = {u: build_tree(net, u, h_max) for u in net.users}
    paths_by: dict[int, list[Path]] = {}
    for u in net.users:
        ps = valid_paths(trees[u])
        if not ps:
            raise RoutingError(f"user {u} has no valid path")
        paths_by[u] = ps
    return trees, paths_by


def route_no_interference(
    net: MeshNetwork,
    cfg: RadioConfig,
    plan: GroupingPlan,
    h_max: int = 4,
    trees: Mapping[int, PathTree] | None = None,
    evaluator: SnirEvaluator | None = None,
) -> tuple[Assignment, RouteStats]:
    """Algorithm B: search as if interference were negligible.

    Runs the regular search with the noise floor raised to +30 dBm so
    interference cannot influence any choice, then re-scores the chosen
    paths under the true noise and full interference.
    """
    base_ev = evaluator or SnirEvaluator(net, cfg)
    search_ev = base_ev.with_noise(BLIND_SEARCH_NOISE_DBM)
    blind, stats = route(net, search_ev.cfg, plan, h_max, trees, search_ev)
    costs, _ = evaluate_assignment(net, blind.chosen, cfg, base_ev)
    return Assignment(blind.chosen, costs, blind.active_links), stats


def route_random(
    net: MeshNetwork,
    cfg: RadioConfig,
    seed,
    h_max: int = 4,
    trees: Mapping[int, PathTree] | None = None,
    evaluator: SnirEvaluator | None = None,
) -> Assignment:
    """Algorithm C: uniform independent path choice per user."""
    _, paths_by = _trees_and_paths(net, h_max, trees)
    ev = evaluator or SnirEvaluator(net, cfg)
    rng = np.random.default_rng(seed)
    chosen = {
        u: paths_by[u][int(rng.integers(0, len(paths_by[u])))] for u in net.users
    }
    costs, _ = evaluate_assignment(net, chosen, cfg, ev)
    active = frozenset(l for p in chosen.values() for l in p.bs_links)
    return Assignment(chosen, costs, active)


def route_random_avg(
    net: MeshNetwork,
    cfg: RadioConfig,
    runs: int = 1000,
    seed: int = 0,
    h_max: int = 4,
    trees: Mapping[int, PathTree] | None = None,
    evaluator: SnirEvaluator | None = None,
) -> float:
    """Mean CoA of ``runs`` independent random assignments.

    Run ``k`` draws its choices exactly like ``route_random`` seeded with
    ``[seed, k]``; only the scoring is batched.
    """
    trees, paths_by = _trees_and_paths(net, h_max, trees)
    ev = evaluator or SnirEvaluator(net, cfg)
    users = list(net.users)
    picks = np.empty((runs, len(users)), dtype=np.intp)
    for k in range(runs):
        rng = np.random.default_rng([seed, k])
        picks[k] = [
            int(rng.integers(0, len(paths_by[u]))) for u in users
        ]
    batch = BatchAssignmentEvaluator(ev, users, paths_by)
    return float(batch.coa_many(picks).mean())


@dataclass
class GaStats:
    """Per-run GA trace: population best per generation, evaluation count."""

    best_per_generation: list[float]
    fitness_evals: int


def route_ga(
    net: MeshNetwork,
    cfg: RadioConfig,
    ga: GaParams,
    h_max: int = 4,
    trees: Mapping[int, PathTree] | None = None,
    evaluator: SnirEvaluator | None = None,
    initial_population: np.ndarray | None = None,
) -> tuple[Assignment, GaStats]:
    """Elitist genetic search over per-user path indices.

    Fitness is the assignment CoA. Each generation keeps the fittest
    ``survivors`` genomes and refills the population by uniform crossover
    of two random survivors plus per-gene mutation (resampling the path
    index). Deterministic in ``ga.seed``.
    """
    trees, paths_by = _trees_and_paths(net, h_max, trees)
    ev = evaluator or SnirEvaluator(net, cfg)
    users = list(net.users)
    n_users = len(users)
    n_paths = np.array([len(paths_by[u]) for u in users])
    batch = BatchAssignmentEvaluator(ev, users, paths_by)
    rng = np.random.default_rng(ga.seed)
    k, j = ga.population, ga.survivors
    if initial_population is not None:
        pop = np.array(initial_population, dtype=np.intp)
        if pop.shape != (k, n_users):
            raise ValueError(
                f"initial population shape {pop.shape} != ({k}, {n_users})"
            )
        if (pop < 0).any() or (pop >= n_paths[None, :]).any():
            raise ValueError("initial population contains out-of-range path indices")
    else:
        pop = np.empty((k, n_users), dtype=np.intp)
        for col in range(n_users):
            pop[:, col] = rng.integers(0, n_paths[col], size=k)
    fitness = batch.coa_many(pop)
    evals = k
    history = [float(fitness.max())]
    for _ in range(ga.generations):
        order = np.argsort(-fitness, kind="stable")
        pop = pop[order]
        fitness = fitness[order]
        parents = rng.integers(0, j, size=(k - j, 2))
        mix = rng.random((k - j, n_users)) < 0.5
        children = np.where(mix, pop[parents[:, 0]], pop[parents[:, 1]])
        mutate = rng.random((k - j, n_users)) < ga.mutation_prob
        for col in range(n_users):
            resampled = rng.integers(0, n_paths[col], size=k - j)
            children[:, col] = np.where(mutate[:, col], resampled, children[:, col])
        child_fitness = batch.coa_many(children)
        evals += k - j
        pop = np.vstack([pop[:j], children])
        fitness = np.concatenate([fitness[:j], child_fitness])
        history.append(float(fitness.max()))
    best_idx = int(np.argmax(fitness))
    best = pop[best_idx]
    chosen = {u: paths_by[u][int(best[col])] for col, u in enumerate(users)}
    costs, _ = evaluate_assignment(net, chosen, cfg, ev)
    active = frozenset(l for p in chosen.values() for l in p.bs_links)
    return Assignment(chosen, costs, active), GaStats(history, evals)
