"""Per-user exploration trees and their valid user-to-core paths.

The tree for a user is a depth-first expansion of the mesh: each tree
node's children are the mesh neighbors not already on the current
branch, visited in ascending node id. A branch ends at a core BS or at
the hop limit. Dead ends (no continuation, not core, below the hop
limit) are dropped, so every remaining leaf is a core BS or sits at
depth h_max. Users never appear inside a tree except as the root.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .linkbudget import DirectedLink
from .topology import MeshNetwork


@dataclass(frozen=True)
class Path:
    """Ordered directed links from a user to a core BS."""

    links: tuple[DirectedLink, ...]

    @property
    def user(self) -> int:
        return self.links[0].tx

    @property
    def core(self) -> int:
        return self.links[-1].rx

    @property
    def hops(self) -> int:
        return len(self.links)

    @property
    def nodes(self) -> tuple[int, ...]:
        return (self.links[0].tx,) + tuple(l.rx for l in self.links)

    @property
    def bs_links(self) -> tuple[DirectedLink, ...]:
        """Links between BSs, i.e. everything after the user access hop."""
        return self.links[1:]

    def validate(self, net: MeshNetwork, h_max: int) -> None:
        if not net.is_user(self.user):
            raise ValueError(f"path does not start at a user: {self.nodes}")
        if not net.is_core(self.core):
            raise ValueError(f"path does not end at a core BS: {self.nodes}")
        if self.hops > h_max:
            raise ValueError(f"path exceeds {h_max} hops: {self.nodes}")
        nodes = self.nodes
        if len(set(nodes)) != len(nodes):
            raise ValueError(f"path revisits a node: {nodes}")
        for mid in nodes[1:-1]:
            if not net.is_bs(mid) or net.is_core(mid):
                raise ValueError(f"intermediate node {mid} invalid in {nodes}")
        for a, b in zip(nodes, nodes[1:]):
            if not net.adjacency[a, b]:
                raise ValueError(f"path uses missing link ({a}, {b})")


@dataclass
class TreeNode:
    mesh: int
    parent: int
    depth: int
    children: list[int] = field(default_factory=list)


class PathTree:
    """Arena-backed exploration tree rooted at one user."""

    def __init__(self, net: MeshNetwork, user: int, h_max: int, nodes: list[TreeNode]):
        self.net = net
        self.user = user
        self.h_max = h_max
        self.nodes = nodes
        self._paths: list[Path] | None = None

    def __len__(self) -> int:
        return len(self.nodes)

    def branches(self) -> list[list[int]]:
        """All root-to-leaf branches as arena index lists, in DFS order."""
        out: list[list[int]] = []
        stack = [[0]]
        while stack:
            branch = stack.pop()
            node = self.nodes[branch[-1]]
            if not node.children:
                out.append(branch)
                continue
            for child in reversed(node.children):
                stack.append(branch + [child])
        return out

    def leaf_mesh_path(self, branch: list[int]) -> list[int]:
        return [self.nodes[i].mesh for i in branch]


def build_tree(net: MeshNetwork, user: int, h_max: int) -> PathTree:
    """Depth-first exploration tree for one user.

    Children are expanded in ascending mesh node id; expansion stops at
    core BSs and at depth ``h_max``; dead-end branches are pruned on the
    way back up.
    """
    if not net.is_user(user):
        raise ValueError(f"tree root {user} is not a user node")
    if h_max < 1:
        raise ValueError(f"h_max must be >= 1, got {h_max}")
    nodes = [TreeNode(user, -1, 0)]
    nbr_cache: dict[int, list[int]] = {}

    def neighbors_of(mesh: int) -> list[int]:
        got = nbr_cache.get(mesh)
        if got is None:
            got = nbr_cache[mesh] = net.neighbors(mesh)
        return got

    def expand(idx: int, on_branch: frozenset[int]) -> None:
        node = nodes[idx]
        if net.is_core(node.mesh) or node.depth == h_max:
            return
        for nb in neighbors_of(node.mesh):
            if nb in on_branch or net.is_user(nb):
                continue
            child_idx = len(nodes)
            nodes.append(TreeNode(nb, idx, node.depth + 1))
            expand(child_idx, on_branch | {nb})
            child = nodes[child_idx]
            keep = child.children or net.is_core(nb) or child.depth == h_max
            if keep:
                node.children.append(child_idx)
            else:
                # dead end: the subtree below was already pruned, so the
                # child is the last arena entry
                nodes.pop()

    expand(0, frozenset([user]))
    return PathTree(net, user, h_max, nodes)


def valid_paths(tree: PathTree) -> list[Path]:
    """Root-to-core branches of the tree as Path values, in DFS order."""
    if tree._paths is not None:
        return tree._paths
    net = tree.net
    paths: list[Path] = []
    for branch in tree.branches():
        mesh = tree.leaf_mesh_path(branch)
        if not net.is_core(mesh[-1]):
            continue
        links = tuple(DirectedLink(a, b) for a, b in zip(mesh, mesh[1:]))
        paths.append(Path(links))
    tree._paths = paths
    return paths
