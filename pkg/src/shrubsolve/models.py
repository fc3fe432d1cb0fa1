"""Hand-built model families and a seeded random model generator."""

from __future__ import annotations

import numpy as np

from .graph import LabeledGraph
from .tree_model import TreeModel, build_model


def flat_model(k: int, labels: list[int], matrix) -> TreeModel:
    """Depth-1 model: a root over one leaf per vertex, 0-indexed labels."""
    n = len(labels)
    parent = [-1] + [0] * n
    return build_model(
        k,
        parent,
        {0: matrix},
        {a: list(range(k)) for a in range(1, n + 1)},
        {a: a - 1 for a in range(1, n + 1)},
        {a: labels[a - 1] for a in range(1, n + 1)},
        ids=["r"] + [f"v{v}" for v in range(n)],
    )


def complete_model(n: int) -> TreeModel:
    return flat_model(1, [0] * n, [[1]])


def edgeless_model(n: int) -> TreeModel:
    return flat_model(1, [0] * n, [[0]])


def complete_bipartite_model(a: int, b: int) -> TreeModel:
    return flat_model(2, [0] * a + [1] * b, [[0, 1], [1, 0]])


def graph_model(g: LabeledGraph) -> TreeModel:
    """Depth-1 model with one label per vertex and the adjacency matrix at the root."""
    mat = np.zeros((g.n, g.n), dtype=bool)
    for u, v in g.edges:
        mat[u, v] = mat[v, u] = True
    return flat_model(max(g.n, 1), list(range(g.n)), mat)


def path_model(n: int) -> TreeModel:
    """P_n; K_2 for n = 2, otherwise the one-label-per-vertex model."""
    if n <= 2:
        return complete_model(n) if n == 2 else edgeless_model(n)
    return graph_model(LabeledGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)]))


def cycle_model(n: int) -> TreeModel:
    return graph_model(LabeledGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)]))


def star_model(leaves: int) -> TreeModel:
    return complete_bipartite_model(1, leaves)


def random_model(
    n: int,
    d: int,
    k: int,
    rng: np.random.Generator,
    density: float = 0.5,
) -> TreeModel:
    """Random model with n leaves, depth at most d >= 1, k labels.

    Internal nodes are grown level by level; leaves hang from internal
    nodes at depth < d. Internal nodes that end up childless are dropped.
    """
    parent = [-1]
    depth = [0]
    internal = [0]
    extra = int(rng.integers(0, max(1, n // 2) + 1)) if d > 1 else 0
    for _ in range(extra):
        cands = [a for a in internal if depth[a] < d - 1]
        if not cands:
            break
        p = cands[int(rng.integers(len(cands)))]
        parent.append(p)
        depth.append(depth[p] + 1)
        internal.append(len(parent) - 1)
    leaf_parent = [internal[int(rng.integers(len(internal)))] for _ in range(n)]
    used = set()
    for p in leaf_parent:
        while p >= 0 and p not in used:
            used.add(p)
            p = parent[p]
    keep = [a for a in internal if a in used or a == 0]
    remap = {a: i for i, a in enumerate(keep)}
    parents = [remap[parent[a]] if parent[a] >= 0 else -1 for a in keep]
    nint = len(keep)
    leaf_vertex, leaf_label = {}, {}
    for v in range(n):
        a = len(parents)
        parents.append(remap[leaf_parent[v]])
        leaf_vertex[a] = v
        leaf_label[a] = int(rng.integers(k))
    matrix = {}
    for a in range(nint):
        upper = rng.random((k, k)) < density
        sym = np.triu(upper)
        matrix[a] = sym | sym.T
    rename = {}
    for a in range(1, len(parents)):
        if rng.random() < 0.5:
            rename[a] = list(range(k))
        else:
            rename[a] = [int(x) for x in rng.integers(0, k, size=k)]
    ids = [f"a{a}" for a in range(nint)] + [f"v{leaf_vertex[a]}" for a in range(nint, len(parents))]
    return build_model(k, parents, matrix, rename, leaf_vertex, leaf_label, ids=ids)
