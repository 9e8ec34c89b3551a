"""Independent reference implementations used as ground truth.

Deliberately naive: separation is decided by enumerating every simple
path and applying the blocking rules triple by triple, adjustment sets
by filtering all subsets against the criterion's definition, and SEM
moments by linear algebra on the population covariance.  None of this
shares code with the package's algorithms.
"""

from __future__ import annotations

import itertools

import numpy as np

from egp import CausalGraph, NodeRole, build_graph


def _expanded_edges(g: CausalGraph) -> tuple[list[str], list[tuple[str, str]]]:
    """Declared graph with each bidirected arc replaced by a fresh root."""
    nodes = list(g.node_names)
    edges = [tuple(p) for p in g.directed_pairs]
    for i, (a, b) in enumerate(sorted(g.bidirected_pairs)):
        hidden = f"__arc{i}"
        nodes.append(hidden)
        edges.append((hidden, a))
        edges.append((hidden, b))
    return nodes, edges


def _descendant_map(nodes, edges) -> dict[str, set[str]]:
    children: dict[str, set[str]] = {v: set() for v in nodes}
    for s, t in edges:
        children[s].add(t)
    out: dict[str, set[str]] = {}
    for v in nodes:
        seen = set()
        stack = [v]
        while stack:
            u = stack.pop()
            for w in children[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        out[v] = seen
    return out


def _all_simple_paths(nodes, edges, x: str, y: str):
    """Yield paths as alternating (node, direction) walks in the skeleton.

    Each step records +1 for traversing src->dst forward, -1 backward.
    """
    nbrs: dict[str, list[tuple[str, int]]] = {v: [] for v in nodes}
    for s, t in edges:
        nbrs[s].append((t, +1))
        nbrs[t].append((s, -1))
    path = [x]
    dirs: list[int] = []
    on_path = {x}

    def walk(v):
        if v == y:
            yield list(path), list(dirs)
            return
        for w, d in nbrs[v]:
            if w in on_path:
                continue
            path.append(w)
            dirs.append(d)
            on_path.add(w)
            yield from walk(w)
            path.pop()
            dirs.pop()
            on_path.remove(w)

    yield from walk(x)


def _path_open(path, dirs, given, descendants) -> bool:
    for i in range(1, len(path) - 1):
        v = path[i]
        into_left = dirs[i - 1] == +1
        into_right = dirs[i] == -1
        if into_left and into_right:
            # collider: needs v or a descendant of v in the given set
            if v not in given and not (descendants[v] & given):
                return False
        else:
            if v in given:
                return False
    return True


def brute_d_separated(g: CausalGraph, a, b, given) -> bool:
    nodes, edges = _expanded_edges(g)
    given = set(given)
    descendants = _descendant_map(nodes, edges)
    for x in sorted(set(a)):
        for y in sorted(set(b)):
            for path, dirs in _all_simple_paths(nodes, edges, x, y):
                if _path_open(path, dirs, given, descendants):
                    return False
    return True


def brute_backdoor_admissible(g: CausalGraph, d: str, y: str, z) -> bool:
    """The criterion exactly as defined, on the unmutilated graph."""
    z = set(z)
    nodes, edges = _expanded_edges(g)
    descendants = _descendant_map(nodes, edges)
    if z & descendants[d]:
        return False
    # backdoor paths = paths whose first step arrives at d against an arrow
    for path, dirs in _all_simple_paths(nodes, edges, d, y):
        if dirs[0] == +1:
            continue
        if _path_open(path, dirs, z, descendants):
            return False
    return True


def brute_minimal_adjustment_sets(g: CausalGraph, d: str, y: str):
    """All inclusion-minimal admissible sets, ordered by size then name."""
    nodes, edges = _expanded_edges(g)
    descendants = _descendant_map(nodes, edges)
    pool = sorted(
        v
        for v in g.observed_names
        if v not in (d, y) and v not in descendants[d]
    )
    admissible: list[tuple[str, ...]] = []
    for size in range(len(pool) + 1):
        for combo in itertools.combinations(pool, size):
            zset = set(combo)
            if any(set(prev) <= zset for prev in admissible):
                continue
            if brute_backdoor_admissible(g, d, y, zset):
                admissible.append(combo)
    return [frozenset(s) for s in admissible]


# -- random graph generation ----------------------------------------------


def random_dag(
    rng: np.random.Generator,
    max_nodes: int = 10,
    edge_prob: float = 0.3,
    bidirected_prob: float = 0.0,
    latent_frac: float = 0.0,
    name: str = "random",
) -> CausalGraph:
    n = int(rng.integers(3, max_nodes + 1))
    labels = [f"V{i}" for i in range(n)]
    order = list(rng.permutation(n))
    edges: list[tuple[str, str] | tuple[str, str, str]] = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_prob:
                edges.append((labels[order[i]], labels[order[j]]))
    if bidirected_prob > 0:
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < bidirected_prob:
                    edges.append((labels[i], labels[j], "bidirected"))
    nodes: list[str | tuple[str, NodeRole]] = []
    for v in labels:
        if latent_frac > 0 and rng.random() < latent_frac:
            nodes.append((v, NodeRole(latent=True)))
        else:
            nodes.append(v)
    return build_graph(name, nodes, edges)


# -- linear-SEM population moments ------------------------------------------


def sem_covariance(model) -> tuple[list[str], np.ndarray]:
    """Population covariance of all canonical nodes by matrix inversion."""
    g = model.graph
    names = list(g.canonical_nodes)
    idx = {v: i for i, v in enumerate(names)}
    k = len(names)
    A = np.zeros((k, k))
    for (s, t), w in model.coefficients.items():
        A[idx[t], idx[s]] = w
    D = np.zeros((k, k))
    for v in names:
        D[idx[v], idx[v]] = float(model.noise_scale[v]) ** 2
    inv = np.linalg.inv(np.eye(k) - A)
    return names, inv @ D @ inv.T


def population_regression(model, y: str, regressors: list[str]) -> np.ndarray:
    """Population OLS coefficients of y on the regressors (no intercept
    needed: everything is zero mean)."""
    names, sigma = sem_covariance(model)
    idx = {v: i for i, v in enumerate(names)}
    rows = [idx[r] for r in regressors]
    S_xx = sigma[np.ix_(rows, rows)]
    S_xy = sigma[rows, idx[y]]
    return np.linalg.solve(S_xx, S_xy)


def total_effect(model, d: str, y: str) -> float:
    """Entry of (I - A)^{-1}: the sum over directed paths of coefficient
    products, which is what an intervention on d moves y by."""
    names, _ = sem_covariance(model)
    idx = {v: i for i, v in enumerate(names)}
    k = len(names)
    A = np.zeros((k, k))
    for (s, t), w in model.coefficients.items():
        A[idx[t], idx[s]] = w
    inv = np.linalg.inv(np.eye(k) - A)
    return float(inv[idx[y], idx[d]])
