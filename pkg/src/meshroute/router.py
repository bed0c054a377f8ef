"""Interference-aware max-min path selection over per-user trees.

The search walks every combination of the other users' path choices,
finds the best (largest bottleneck SNIR) path in the current user's tree
under that interference, scores the whole joint choice by its worst
path, and keeps the joint choice with the best worst path. Grouping
splits users into disjoint blocks so the combination space stays
tractable.

One evaluation semantics is used everywhere, including by the baselines:
a user's path cost is the minimum SNIR over its BS-to-BS links, with
interference from the union of the other users' chosen links after the
per-link exclusion rules. ``SnirEvaluator`` memoizes the pairwise
interference powers so this stays cheap inside the combination loops;
`linkbudget` holds the reference formulas it must agree with.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .linkbudget import (
    DirectedLink,
    RadioConfig,
    received_power_dbm,
)
from .pathtree import Path, PathTree, build_tree, valid_paths
from .topology import MeshNetwork

NEG_INF = float("-inf")


class RoutingError(RuntimeError):
    """Routing is impossible, e.g. a user has no valid path."""


def _pattern_rel_db(theta: np.ndarray, cfg: RadioConfig) -> np.ndarray:
    # np.sinc is the normalized sinc; rescale to sin(x)/x
    x = cfg.pattern_shape * theta
    with np.errstate(divide="ignore"):
        rel = 20.0 * np.log10(np.abs(np.sinc(x / np.pi)))
    return np.maximum(rel, cfg.pattern_floor_db)


@dataclass(frozen=True)
class LinkContext:
    """A fixed interferer set, reduced to per-victim-link interference mW."""

    ids: tuple[int, ...]
    mw: np.ndarray


@dataclass
class _TreeIndex:
    """Flat view of a PathTree for fast repeated cost sweeps."""

    mesh: list[int]
    children: list[list[int]]
    is_core: list[bool]
    eval_idx: np.ndarray
    eval_link_ids: np.ndarray

    @property
    def n(self) -> int:
        return len(self.mesh)


class SnirEvaluator:
    """Memoized link-SNIR evaluation over one network and radio config.

    Precomputes the received power of every directed BS link and the
    pairwise interference power (in mW) each active link inflicts on
    each victim link. The per-link exclusion rules are baked into the
    pairwise table as zeros: entries where the interferer's transmitter
    is the victim link's transmitter or receiver. All arithmetic matches
    the pure `linkbudget` functions to float precision.

    Counts every link-SNIR evaluation in ``snir_evals`` and every path
    cost in ``path_cost_evals``.
    """

    def __init__(self, net: MeshNetwork, cfg: RadioConfig):
        self.net = net
        self.cfg = cfg
        self.snir_evals = 0
        self.path_cost_evals = 0
        self._noise_mw = cfg.noise_mw
        self._tree_cache: dict[int, tuple[PathTree, _TreeIndex]] = {}
        self._build_tables()

    # -- construction ----------------------------------------------------

    def _build_tables(self) -> None:
        net, cfg = self.net, self.cfg
        links: list[tuple[int, int]] = []
        for i, j in net.bs_edges():
            links.append((i, j))
            links.append((j, i))
        links.sort()
        self.links = [DirectedLink(*l) for l in links]
        self._lid = {l: k for k, l in enumerate(links)}
        e2 = len(links)
        self._prx = np.array(
            [received_power_dbm(net.distance_m(t, r), cfg) for t, r in links]
        )
        if e2 == 0:
            self._W = np.zeros((0, 0))
            return
        P = net.coords
        tx = np.array([l[0] for l in links])
        rx = np.array([l[1] for l in links])
        diff = P[rx][:, None, :] - P[tx][None, :, :]  # victim_rx - interferer_tx
        dist = np.sqrt((diff**2).sum(-1))
        # interferer tx == victim tx or rx: excluded, also covers dist == 0
        excl = (tx[None, :] == tx[:, None]) | (tx[None, :] == rx[:, None])
        dist = np.where(excl, 1.0, dist)
        length = np.hypot(P[tx, 0] - P[rx, 0], P[tx, 1] - P[rx, 1])
        bore_rx = P[tx] - P[rx]  # victim receiver aims at its transmitter
        cos_a = (
            bore_rx[:, None, 0] * -diff[..., 0] + bore_rx[:, None, 1] * -diff[..., 1]
        ) / (length[:, None] * dist)
        alpha = np.arccos(np.clip(cos_a, -1.0, 1.0))
        bore_tx = P[rx] - P[tx]  # interferer transmitter aims at its receiver
        cos_b = (
            bore_tx[None, :, 0] * diff[..., 0] + bore_tx[None, :, 1] * diff[..., 1]
        ) / (length[None, :] * dist)
        beta = np.arccos(np.clip(cos_b, -1.0, 1.0))
        g_rx = cfg.boresight_gain_db + _pattern_rel_db(alpha, cfg)
        g_tx = _pattern_rel_db(beta, cfg)
        if not cfg.eirp_mode:
            g_tx = g_tx + cfg.boresight_gain_db
        from .linkbudget import SPEED_OF_LIGHT_M_S

        fspl = 20.0 * np.log10(
            4.0 * np.pi * cfg.carrier_hz * dist / SPEED_OF_LIGHT_M_S
        )
        atten = dist * (cfg.rain_margin_db_per_m + cfg.o2_atten_db_per_m)
        p_in = cfg.tx_power_dbm + g_rx - fspl - atten + g_tx
        W = 10.0 ** (p_in / 10.0)
        W[excl] = 0.0
        self._W = W

    def with_noise(self, noise_dbm: float) -> "SnirEvaluator":
        """Twin evaluator sharing the geometry tables, new noise and counters."""
        twin = object.__new__(SnirEvaluator)
        twin.net = self.net
        twin.cfg = self.cfg.with_noise(noise_dbm)
        twin.snir_evals = 0
        twin.path_cost_evals = 0
        twin._noise_mw = twin.cfg.noise_mw
        twin._tree_cache = self._tree_cache
        twin.links = self.links
        twin._lid = self._lid
        twin._prx = self._prx
        twin._W = self._W
        return twin

    # -- contexts ----------------------------------------------------------

    def link_ids(self, links: Iterable[tuple[int, int]]) -> tuple[int, ...]:
        lid = self._lid
        return tuple(sorted({lid[(t, r)] for t, r in links}))

    def context(self, links: Iterable[tuple[int, int]]) -> LinkContext:
        """Aggregate a set of active links into per-victim interference mW.

        Duplicate links collapse: a link carrying several users' traffic
        is still a single transmission.
        """
        ids = self.link_ids(links)
        if ids:
            mw = self._W[:, ids].sum(axis=1)
        else:
            mw = np.zeros(len(self.links))
        return LinkContext(ids, mw)

    # -- evaluation ----------------------------------------------------------

    def snir_db(self, tx: int, rx: int, ctx: LinkContext) -> float:
        """SNIR of the directed established link tx -> rx under ``ctx``."""
        vid = self._lid[(tx, rx)]
        self.snir_evals += 1
        return float(self._prx[vid] - 10.0 * np.log10(self._noise_mw + ctx.mw[vid]))

    def snir_many(self, link_ids: np.ndarray, ctx: LinkContext) -> np.ndarray:
        self.snir_evals += len(link_ids)
        return self._prx[link_ids] - 10.0 * np.log10(
            self._noise_mw + ctx.mw[link_ids]
        )

    def path_cost_db(self, path: Path, ctx: LinkContext) -> float:
        """Bottleneck (minimum) SNIR over the path's BS links; +inf if none."""
        self.path_cost_evals += 1
        worst = math.inf
        for t, r in path.bs_links:
            c = self.snir_db(t, r, ctx)
            if c < worst:
                worst = c
        return worst

    # -- tree search -----------------------------------------------------------

    def tree_index(self, tree: PathTree) -> _TreeIndex:
        got = self._tree_cache.get(id(tree))
        if got is not None:
            return got[1]
        mesh = [n.mesh for n in tree.nodes]
        children = [n.children for n in tree.nodes]
        is_core = [tree.net.is_core(m) for m in mesh]
        eval_idx = []
        eval_link_ids = []
        for k, node in enumerate(tree.nodes):
            if node.depth >= 2:
                eval_idx.append(k)
                eval_link_ids.append(self._lid[(mesh[node.parent], node.mesh)])
        index = _TreeIndex(
            mesh,
            children,
            is_core,
            np.array(eval_idx, dtype=np.intp),
            np.array(eval_link_ids, dtype=np.intp),
        )
        self._tree_cache[id(tree)] = (tree, index)
        return index

    def best_path(self, tree: PathTree, ctx: LinkContext) -> tuple[Path, float]:
        """Valid path with the largest bottleneck SNIR in the tree.

        Depth-first costs: the SNIR from the parent link at every node
        (the user access hop counts as perfect), combined bottom-up as
        min(best child, own link). Branches that stop short of a core
        are excluded. Ties go to the first (lowest id) child.
        """
        ti = self.tree_index(tree)
        n = ti.n
        snir = [math.inf] * n
        if len(ti.eval_idx):
            vals = self.snir_many(ti.eval_link_ids, ctx)
            for k, v in zip(ti.eval_idx.tolist(), vals.tolist()):
                snir[k] = v
        cost = [NEG_INF] * n
        choice = [-1] * n
        children = ti.children
        is_core = ti.is_core
        for i in range(n - 1, 0, -1):
            ch = children[i]
            if ch:
                best = NEG_INF
                pick = -1
                for c in ch:
                    if cost[c] > best:
                        best = cost[c]
                        pick = c
                own = snir[i]
                cost[i] = own if own < best else best
                choice[i] = pick
            elif is_core[i]:
                cost[i] = snir[i]
        best = NEG_INF
        pick = -1
        for c in children[0]:
            if cost[c] > best:
                best = cost[c]
                pick = c
        if pick < 0 or best == NEG_INF:
            raise RoutingError(f"no valid path in tree of user {tree.user}")
        mesh_path = [ti.mesh[0]]
        k = pick
        while k != -1:
            mesh_path.append(ti.mesh[k])
            k = choice[k]
        links = tuple(DirectedLink(a, b) for a, b in zip(mesh_path, mesh_path[1:]))
        return Path(links), best


# -- spec-level operations ---------------------------------------------------


def path_cost(
    net: MeshNetwork,
    path: Path,
    ctx: Iterable[tuple[int, int]],
    cfg: RadioConfig,
    evaluator: SnirEvaluator | None = None,
) -> float:
    """Bottleneck SNIR of a path under an active-link set.

    The per-link exclusion rules are applied for each link of the path;
    a path with no BS-to-BS link (user directly on a core) costs +inf.
    """
    ev = evaluator or SnirEvaluator(net, cfg)
    return ev.path_cost_db(path, ev.context(ctx))


def best_path_in_tree(
    net: MeshNetwork,
    tree: PathTree,
    ctx: Iterable[tuple[int, int]],
    cfg: RadioConfig,
    evaluator: SnirEvaluator | None = None,
) -> tuple[Path, float]:
    """Best valid path in a user's tree under an active-link set."""
    ev = evaluator or SnirEvaluator(net, cfg)
    return ev.best_path(tree, ev.context(ctx))


@dataclass(frozen=True)
class GroupingPlan:
    """Disjoint user groups optimized separately.

    ``isolated`` ignores other groups' choices during the search (the
    reported costs always use the full network); ``sequential`` feeds
    earlier groups' chosen links into later groups as fixed context.
    """

    groups: tuple[tuple[int, ...], ...]
    mode: str = "isolated"

    def __post_init__(self) -> None:
        if self.mode not in ("isolated", "sequential"):
            raise ValueError(f"unknown grouping mode {self.mode!r}")
        flat = [u for g in self.groups for u in g]
        if len(set(flat)) != len(flat):
            raise ValueError("grouping plan has overlapping groups")
        sizes = [len(g) for g in self.groups]
        if sizes and max(sizes) - min(sizes) > 1:
            raise ValueError(f"group sizes must differ by at most 1, got {sizes}")

    def validate_for(self, net: MeshNetwork) -> None:
        flat = sorted(u for g in self.groups for u in g)
        if flat != list(net.users):
            raise ValueError("grouping plan does not cover exactly the user set")


def make_plan(
    net: MeshNetwork, g: int, mode: str = "isolated", strategy: str = "contiguous"
) -> GroupingPlan:
    """Split the users into ``g`` groups of near-equal size."""
    users = list(net.users)
    if not 1 <= g <= max(1, len(users)):
        raise ValueError(f"group count {g} invalid for {len(users)} users")
    if strategy == "contiguous":
        q, r = divmod(len(users), g)
        groups = []
        start = 0
        for k in range(g):
            size = q + 1 if k < r else q
            groups.append(tuple(users[start : start + size]))
            start += size
    elif strategy == "round_robin":
        buckets: list[list[int]] = [[] for _ in range(g)]
        for k, u in enumerate(users):
            buckets[k % g].append(u)
        groups = [tuple(b) for b in buckets]
    else:
        raise ValueError(f"unknown grouping strategy {strategy!r}")
    return GroupingPlan(tuple(t for t in groups if t), mode)


@dataclass(frozen=True)
class Assignment:
    """One chosen path per user, with evaluated costs and active links."""

    chosen: Mapping[int, Path]
    per_user_cost_db: Mapping[int, float]
    active_links: frozenset[DirectedLink]


@dataclass
class GroupStats:
    """Search instrumentation for one routed group."""

    members: tuple[int, ...]
    combinations: int
    snir_evals: int
    path_cost_evals: int
    n_paths: dict[int, int]
    tree_nodes: dict[int, int]
    cost_db: float


@dataclass
class RouteStats:
    groups: list[GroupStats] = field(default_factory=list)
    snir_evals: int = 0
    path_cost_evals: int = 0
    combinations: int = 0


def route_group(
    net: MeshNetwork,
    trees: Mapping[int, PathTree],
    group: Sequence[int],
    fixed_ctx: Iterable[tuple[int, int]],
    cfg: RadioConfig,
    evaluator: SnirEvaluator | None = None,
) -> tuple[dict[int, Path], GroupStats]:
    """Joint path choice for one group of users.

    For every user, every combination of the other group members' paths
    is tried: the user's tree is searched under that interference, the
    other members' paths are costed inside the completed joint choice,
    and the combination keeps its worst member's cost. The group adopts
    the joint choice with the best worst cost; all argmax ties break to
    the lowest index.
    """
    ev = evaluator or SnirEvaluator(net, cfg)
    members = sorted(group)
    paths_by: dict[int, list[Path]] = {}
    for uid in members:
        ps = valid_paths(trees[uid])
        if not ps:
            raise RoutingError(f"user {uid} has no valid path")
        paths_by[uid] = ps
    fixed = tuple(DirectedLink(*l) for l in fixed_ctx)
    snir0, pc0 = ev.snir_evals, ev.path_cost_evals
    combinations = 0
    best_user_cost = NEG_INF
    best_solution: dict[int, Path] | None = None
    for uid in members:
        deps = [m for m in members if m != uid]
        best_c = NEG_INF
        best_sol: dict[int, Path] | None = None
        for combo in itertools.product(*(paths_by[d] for d in deps)):
            combinations += 1
            dep_links: list[DirectedLink] = list(fixed)
            for p in combo:
                dep_links.extend(p.bs_links)
            own_path, c_tilde = ev.best_path(trees[uid], ev.context(dep_links))
            solution = dict(zip(deps, combo))
            solution[uid] = own_path
            for d in deps:
                other_links: list[DirectedLink] = list(fixed)
                for member, p in solution.items():
                    if member != d:
                        other_links.extend(p.bs_links)
                c = ev.path_cost_db(solution[d], ev.context(other_links))
                if c < c_tilde:
                    c_tilde = c
            if c_tilde > best_c:
                best_c = c_tilde
                best_sol = solution
        if best_c > best_user_cost:
            best_user_cost = best_c
            best_solution = best_sol
    assert best_solution is not None
    stats = GroupStats(
        members=tuple(members),
        combinations=combinations,
        snir_evals=ev.snir_evals - snir0,
        path_cost_evals=ev.path_cost_evals - pc0,
        n_paths={u: len(paths_by[u]) for u in members},
        tree_nodes={u: len(trees[u]) for u in members},
        cost_db=best_user_cost,
    )
    return best_solution, stats


def evaluate_assignment(
    net: MeshNetwork,
    assignment: Assignment | Mapping[int, Path],
    cfg: RadioConfig,
    evaluator: SnirEvaluator | None = None,
) -> tuple[dict[int, float], float]:
    """Score an assignment: per-user bottleneck cost and the network CoA.

    Each user is evaluated against the union of all other users' chosen
    BS links. This is the single scoring semantics shared by every
    algorithm.
    """
    chosen = assignment.chosen if isinstance(assignment, Assignment) else assignment
    ev = evaluator or SnirEvaluator(net, cfg)
    costs: dict[int, float] = {}
    for uid in sorted(chosen):
        links = [
            l for other, p in chosen.items() if other != uid for l in p.bs_links
        ]
        costs[uid] = ev.path_cost_db(chosen[uid], ev.context(links))
    return costs, min(costs.values())


def route(
    net: MeshNetwork,
    cfg: RadioConfig,
    plan: GroupingPlan,
    h_max: int = 4,
    trees: Mapping[int, PathTree] | None = None,
    evaluator: SnirEvaluator | None = None,
) -> tuple[Assignment, RouteStats]:
    """Run the grouped search and return the scored assignment.

    Trees are built on demand. In sequential mode earlier groups' links
    become fixed interference for later groups; the final costs are
    always recomputed over the full network.
    """
    plan.validate_for(net)
    ev = evaluator or SnirEvaluator(net, cfg)
    if trees is None:
        trees = {u: build_tree(net, u, h_max) for u in net.users}
    snir0, pc0 = ev.snir_evals, ev.path_cost_evals
    fixed: list[DirectedLink] = []
    chosen: dict[int, Path] = {}
    stats = RouteStats()
    for grp in plan.groups:
        ctx = fixed if plan.mode == "sequential" else ()
        solution, gs = route_group(net, trees, grp, ctx, cfg, ev)
        chosen.update(solution)
        if plan.mode == "sequential":
            for uid in sorted(solution):
                fixed.extend(solution[uid].bs_links)
        stats.groups.append(gs)
    costs, _ = evaluate_assignment(net, chosen, cfg, ev)
    stats.snir_evals = ev.snir_evals - snir0
    stats.path_cost_evals = ev.path_cost_evals - pc0
    stats.combinations = sum(g.combinations for g in stats.groups)
    active = frozenset(l for p in chosen.values() for l in p.bs_links)
    assignment = Assignment(dict(sorted(chosen.items())), costs, active)
    return assignment, stats
