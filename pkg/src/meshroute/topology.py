"""Mesh network model: node layout, adjacency, random generation, JSON i/o.

Node ids are dense integers: base stations occupy [0, b), users occupy
[b, b + u). Core BSs are a subset of the BS range. Coordinates are planar
meters; adjacency is symmetric with a zero diagonal. Every user connects
to exactly its two nearest BSs.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np


class NetworkValidationError(ValueError):
    """A structural invariant of the network model is violated."""


class GenerationError(RuntimeError):
    """Random network generation could not satisfy its constraints."""


class MeshNetwork:
    """Immutable mesh of ``b`` base stations and ``u`` users.

    Validates all structural invariants at construction: id ranges,
    adjacency symmetry and zero diagonal, user degree exactly two with
    both neighbors BSs, and core ids inside the BS range.
    """

    def __init__(
        self,
        b: int,
        u: int,
        core_ids: Sequence[int],
        coords: np.ndarray,
        adjacency: np.ndarray,
    ):
        self.b = int(b)
        self.u = int(u)
        self.core_ids = frozenset(int(c) for c in core_ids)
        self.coords = np.asarray(coords, dtype=np.float64)
        self.adjacency = np.asarray(adjacency, dtype=bool)
        self._validate()
        self.coords.setflags(write=False)
        self.adjacency.setflags(write=False)

    def _validate(self) -> None:
        n = self.b + self.u
        if self.b < 1 or self.u < 0:
            raise NetworkValidationError(f"bad node counts b={self.b} u={self.u}")
        if self.coords.shape != (n, 2):
            raise NetworkValidationError(
                f"coords shape {self.coords.shape} != ({n}, 2)"
            )
        if self.adjacency.shape != (n, n):
            raise NetworkValidationError(
                f"adjacency shape {self.adjacency.shape} != ({n}, {n})"
            )
        if not np.array_equal(self.adjacency, self.adjacency.T):
            raise NetworkValidationError("adjacency is not symmetric")
        if self.adjacency.diagonal().any():
            raise NetworkValidationError("adjacency has a nonzero diagonal")
        bad_core = [c for c in self.core_ids if not 0 <= c < self.b]
        if bad_core:
            raise NetworkValidationError(f"core ids outside BS range: {bad_core}")
        for user in range(self.b, n):
            nbrs = np.flatnonzero(self.adjacency[user])
            if len(nbrs) != 2:
                raise NetworkValidationError(
                    f"user {user} has degree {len(nbrs)}, expected 2"
                )
            if (nbrs >= self.b).any():
                raise NetworkValidationError(
                    f"user {user} is linked to a non-BS node"
                )

    # -- basic queries -------------------------------------------------

    @property
    def num_nodes(self) -> int:
        return self.b + self.u

    @property
    def users(self) -> range:
        return range(self.b, self.b + self.u)

    def is_bs(self, i: int) -> bool:
        return 0 <= i < self.b

    def is_user(self, i: int) -> bool:
        return self.b <= i < self.num_nodes

    def is_core(self, i: int) -> bool:
        return i in self.core_ids

    def neighbors(self, i: int) -> list[int]:
        """Ids adjacent to node ``i``, ascending."""
        if not 0 <= i < self.num_nodes:
            raise IndexError(f"node id {i} out of range [0, {self.num_nodes})")
        return [int(j) for j in np.flatnonzero(self.adjacency[i])]

    def bs_edges(self) -> list[tuple[int, int]]:
        """Undirected BS-BS edges as (i, j) with i < j, sorted."""
        sub = self.adjacency[: self.b, : self.b]
        ii, jj = np.nonzero(np.triu(sub, k=1))
        return [(int(i), int(j)) for i, j in zip(ii, jj)]

    # -- geometry ------------------------------------------------------

    def distance_m(self, i: int, j: int) -> float:
        dx = self.coords[i, 0] - self.coords[j, 0]
        dy = self.coords[i, 1] - self.coords[j, 1]
        d = math.hypot(dx, dy)
        if d == 0.0:
            raise ValueError(f"nodes {i} and {j} have coincident coordinates")
        return d

    def angle_at(self, at: int, toward_a: int, toward_b: int) -> float:
        """Unsigned angle in [0, pi] at ``at`` between the rays to a and b."""
        va = self.coords[toward_a] - self.coords[at]
        vb = self.coords[toward_b] - self.coords[at]
        na = math.hypot(va[0], va[1])
        nb = math.hypot(vb[0], vb[1])
        if na == 0.0 or nb == 0.0:
            raise ValueError(
                f"angle_at({at}, {toward_a}, {toward_b}): coincident coordinates"
            )
        cosang = (va[0] * vb[0] + va[1] * vb[1]) / (na * nb)
        return math.acos(min(1.0, max(-1.0, cosang)))


@dataclass(frozen=True)
class GenParams:
    """Parameters of the random network generator.

    The default grid side is 0.01 degrees of latitude expressed in
    meters (1113.2 m). BS pairs closer than ``bs_link_radius_m`` are
    linked with probability ``bs_link_prob``; all BS pairs keep at least
    ``min_bs_sep_m`` of separation.
    """

    b: int
    u: int
    c: int
    grid_side_m: float = 1113.2
    min_bs_sep_m: float = 40.0
    bs_link_radius_m: float = 500.0
    bs_link_prob: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.b < 2:
            raise ValueError("need at least 2 BSs (every user links to two)")
        if self.u < 0 or self.c < 1:
            raise ValueError("need u >= 0 and c >= 1")
        if self.c > self.b:
            raise ValueError(f"core count {self.c} exceeds BS count {self.b}")
        if not self.min_bs_sep_m < self.grid_side_m:
            raise ValueError("min_bs_sep_m must be smaller than grid_side_m")
        if not 0.0 <= self.bs_link_prob <= 1.0:
            raise ValueError("bs_link_prob must be in [0, 1]")


def _place_bs(rng: np.random.Generator, params: GenParams) -> np.ndarray:
    """Uniform BS positions with pairwise minimum separation, by rejection."""
    placed: list[np.ndarray] = []
    min_sq = params.min_bs_sep_m**2
    attempts_left = 1000 * params.b
    while len(placed) < params.b:
        if attempts_left == 0:
            raise GenerationError(
                f"could not place {params.b} BSs with {params.min_bs_sep_m} m "
                f"separation in a {params.grid_side_m} m grid"
            )
        attempts_left -= 1
        p = rng.uniform(0.0, params.grid_side_m, size=2)
        ok = all((p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2 >= min_sq for q in placed)
        if ok:
            placed.append(p)
    return np.array(placed)


def _has_valid_path(net: MeshNetwork, user: int, h_max: int) -> bool:
    """BFS check: some core BS is reachable from ``user`` within h_max hops.

    A shortest hop path is simple and never transits a user, so breadth
    first search over the BS subgraph is an exact existence test.
    """
    seen = {user}
    frontier = deque([(user, 0)])
    while frontier:
        node, hops = frontier.popleft()
        if hops == h_max:
            continue
        for nb in net.neighbors(node):
            if nb in seen or net.is_user(nb):
                continue
            if net.is_core(nb):
                return True
            seen.add(nb)
            frontier.append((nb, hops + 1))
    return False


def generate_network(
    params: GenParams, h_max: int = 4, max_network_retries: int = 1000
) -> MeshNetwork:
    """Draw a random mesh network; deterministic in ``params.seed``.

    Regenerates (up to ``max_network_retries`` times, advancing the same
    RNG stream) until every user has at least one valid path of at most
    ``h_max`` hops to a core BS.
    """
    rng = np.random.default_rng(params.seed)
    n = params.b + params.u
    for _ in range(max_network_retries):
        bs_coords = _place_bs(rng, params)
        core_ids = sorted(int(i) for i in rng.choice(params.b, size=params.c, replace=False))
        adjacency = np.zeros((n, n), dtype=bool)
        for i in range(params.b):
            for j in range(i + 1, params.b):
                d = math.dist(bs_coords[i], bs_coords[j])
                if d <= params.bs_link_radius_m and rng.random() < params.bs_link_prob:
                    adjacency[i, j] = adjacency[j, i] = True
        user_coords = rng.uniform(0.0, params.grid_side_m, size=(params.u, 2))
        for k in range(params.u):
            d = np.hypot(
                bs_coords[:, 0] - user_coords[k, 0],
                bs_coords[:, 1] - user_coords[k, 1],
            )
            nearest = np.argsort(d, kind="stable")[:2]
            for j in nearest:
                adjacency[params.b + k, j] = adjacency[j, params.b + k] = True
        coords = np.vstack([bs_coords, user_coords]) if params.u else bs_coords
        net = MeshNetwork(params.b, params.u, core_ids, coords, adjacency)
        if all(_has_valid_path(net, user, h_max) for user in net.users):
            return net
    raise GenerationError(
        f"no network with a valid path per user after {max_network_retries} draws "
        f"(params={params}, h_max={h_max})"
    )


# -- serialization -----------------------------------------------------


def save_network(net: MeshNetwork, path) -> None:
    """Write the network as JSON with deterministic field and edge order."""
    edges = [
        [int(i), int(j)]
        for i, j in zip(*np.nonzero(np.triu(net.adjacency, k=1)))
    ]
    doc = {
        "b": net.b,
        "u": net.u,
        "core_ids": sorted(net.core_ids),
        "coords": [[float(x), float(y)] for x, y in net.coords],
        "edges": sorted(edges),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_network(path) -> MeshNetwork:
    """Read a network JSON file, validating every structural invariant."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise NetworkValidationError(f"{path}: malformed JSON: {exc}") from exc
    for field in ("b", "u", "core_ids", "coords", "edges"):
        if field not in doc:
            raise NetworkValidationError(f"{path}: missing field '{field}'")
    b, u = int(doc["b"]), int(doc["u"])
    n = b + u
    coords = np.asarray(doc["coords"], dtype=np.float64)
    adjacency = np.zeros((n, n), dtype=bool)
    for entry in doc["edges"]:
        if len(entry) != 2:
            raise NetworkValidationError(f"{path}: bad edge entry {entry!r}")
        i, j = int(entry[0]), int(entry[1])
        if not (0 <= i < n and 0 <= j < n):
            raise NetworkValidationError(f"{path}: edge [{i}, {j}] out of range")
        if i >= j:
            raise NetworkValidationError(
                f"{path}: edge [{i}, {j}] violates the i < j schema"
            )
        if adjacency[i, j]:
            raise NetworkValidationError(f"{path}: duplicate edge [{i}, {j}]")
        adjacency[i, j] = adjacency[j, i] = True
    try:
        return MeshNetwork(b, u, doc["core_ids"], coords, adjacency)
    except NetworkValidationError as exc:
        raise NetworkValidationError(f"{path}: {exc}") from exc


def iter_node_ids(net: MeshNetwork) -> Iterator[int]:
    return iter(range(net.num_nodes))
