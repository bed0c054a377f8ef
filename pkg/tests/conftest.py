"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's search machinery:
path enumeration is a plain recursive walk over the adjacency matrix,
and the routing oracle scores every full path combination through the
shared assignment evaluation.
"""

import itertools

import numpy as np
import pytest

from meshroute.linkbudget import RadioConfig
from meshroute.pathtree import valid_paths
from meshroute.router import SnirEvaluator, evaluate_assignment
from meshroute.topology import GenParams, GenerationError, MeshNetwork, generate_network


def build_network(b, u, core_ids, coords, edges):
    n = b + u
    adjacency = np.zeros((n, n), dtype=bool)
    for i, j in edges:
        adjacency[i, j] = adjacency[j, i] = True
    return MeshNetwork(b, u, core_ids, np.asarray(coords, dtype=float), adjacency)


@pytest.fixture
def example1_net():
    """7 BSs (cores n2, n6) and 2 users, matching the worked tree example.

    User 7 neighbors {0, 5}; depth-first ascending exploration first
    completes 7-0-3-1-6 (core), backtracks to n3, then 7-0-3-4-2 (core).
    """
    coords = [
        (0.0, 0.0),      # n0
        (100.0, 60.0),   # n1
        (260.0, 120.0),  # n2 core
        (100.0, 0.0),    # n3
        (200.0, 60.0),   # n4
        (-80.0, 40.0),   # n5
        (160.0, 120.0),  # n6 core
        (-40.0, -20.0),  # n7 user
        (150.0, 30.0),   # n8 user
    ]
    edges = [(0, 3), (0, 5), (1, 3), (1, 6), (3, 4), (2, 4), (0, 7), (5, 7), (3, 8), (4, 8)]
    return build_network(7, 2, {2, 6}, coords, edges)


@pytest.fixture
def default_cfg():
    return RadioConfig()


def enumerate_simple_paths(net, user, h_max):
    """Independent oracle: all simple user-to-core paths of <= h_max links.

    Recursive walk over the mesh adjacency; never transits a user; stops
    at the first core on a branch.
    """
    found = set()

    def walk(node, visited, links):
        if links and net.is_core(links[-1][1]):
            found.add(tuple(links))
            return
        if len(links) == h_max:
            return
        for nb in net.neighbors(node):
            if nb in visited or net.is_user(nb):
                continue
            walk(nb, visited | {nb}, links + [(node, nb)])

    walk(user, {user}, [])
    return found


def exhaustive_best_assignment(net, trees, cfg, evaluator=None):
    """Routing oracle: max over all full path combinations of the worst cost.

    Scores every combination with the shared evaluate_assignment
    semantics and keeps the first maximizer in product order.
    """
    ev = evaluator or SnirEvaluator(net, cfg)
    users = list(net.users)
    path_lists = [valid_paths(trees[u]) for u in users]
    best = float("-inf")
    best_chosen = None
    for combo in itertools.product(*path_lists):
        chosen = dict(zip(users, combo))
        _, value = evaluate_assignment(net, chosen, cfg, ev)
        if value > best:
            best = value
            best_chosen = chosen
    return best, best_chosen


def small_random_networks(count, rng_seed, b_range=(4, 8), u_range=(1, 2),
                          c_range=(1, 3), h_max=4):
    """Yield ``count`` generated networks with varied small shapes."""
    rng = np.random.default_rng(rng_seed)
    produced = 0
    seed = 0
    while produced < count:
        seed += 1
        b = int(rng.integers(b_range[0], b_range[1] + 1))
        u = int(rng.integers(u_range[0], u_range[1] + 1))
        c = int(rng.integers(c_range[0], min(c_range[1], b) + 1))
        params = GenParams(b=b, u=u, c=c, seed=seed)
        try:
            net = generate_network(params, h_max=h_max, max_network_retries=200)
        except GenerationError:
            continue
        produced += 1
        yield net
