"""(d,k)-tree-models: parsing, validation, derived labelings and realization.

Labels are 1-indexed in files and 0-indexed everywhere in memory.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DomainError, ParseError
from .graph import LabeledGraph


@dataclass(frozen=True)
class TreeModel:
    """Rooted tree with per-node matrices and per-edge renamings.

    Nodes are dense integers 0..len(ids)-1; ``ids`` keeps the names from
    the file. ``parent[root] == -1``. ``rename[b]`` is the image of the
    labels of b under the renaming of the edge (parent(b), b). Leaves
    carry ``leaf_vertex`` and ``leaf_label``.
    """

    k: int
    ids: tuple[str, ...]
    parent: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]
    matrix: dict[int, np.ndarray]
    rename: dict[int, tuple[int, ...]]
    leaf_vertex: dict[int, int]
    leaf_label: dict[int, int]
    extra: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.leaf_vertex)

    @cached_property
    def root(self) -> int:
        roots = [a for a, p in enumerate(self.parent) if p < 0]
        if len(roots) != 1:
            raise DomainError("model does not have exactly one root")
        return roots[0]

    def is_leaf(self, a: int) -> bool:
        return a in self.leaf_vertex

    @cached_property
    def node_depth(self) -> tuple[int, ...]:
        depth = [0] * len(self.parent)
        for a in self.preorder:
            p = self.parent[a]
            depth[a] = 0 if p < 0 else depth[p] + 1
        return tuple(depth)

    @cached_property
    def depth(self) -> int:
        return max(self.node_depth[a] for a in self.leaf_vertex) if self.leaf_vertex else 0

    @cached_property
    def preorder(self) -> tuple[int, ...]:
        order, stack = [], [self.root]
        while stack:
            a = stack.pop()
            order.append(a)
            stack.extend(reversed(self.children[a]))
        return tuple(order)

    @cached_property
    def vertex_leaf(self) -> dict[int, int]:
        return {v: a for a, v in self.leaf_vertex.items()}

    @cached_property
    def labeling(self) -> tuple[dict[int, int], ...]:
        """labeling[a] maps each v in V_a to lambda_a(v)."""
        lab: list[dict[int, int]] = [dict() for _ in self.parent]
        for a in reversed(self.preorder):
            if self.is_leaf(a):
                lab[a] = {self.leaf_vertex[a]: self.leaf_label[a]}
            else:
                d: dict[int, int] = {}
                for b in self.children[a]:
                    rho = self.rename[b]
                    for v, i in lab[b].items():
                        d[v] = rho[i]
                lab[a] = d
        return tuple(lab)

    def view(self, a: int) -> "NodeView":
        lab = self.labeling[a]
        by_label: list[list[int]] = [[] for _ in range(self.k)]
        for v in sorted(lab):
            by_label[lab[v]].append(v)
        return NodeView(a, frozenset(lab), dict(lab), tuple(tuple(x) for x in by_label))

    def label_counts(self, a: int) -> tuple[int, ...]:
        counts = [0] * self.k
        for i in self.labeling[a].values():
            counts[i] += 1
        return tuple(counts)

    def to_text(self) -> str:
        k = self.k
        lines = ["shrubmodel 1", f"k {k}"]
        for a in self.preorder:
            name = self.ids[a]
            p = self.parent[a]
            if self.is_leaf(a):
                lines.append(
                    f"leaf {name} child-of {self.ids[p]} vertex {self.leaf_vertex[a]}"
                    f" label {self.leaf_label[a] + 1}"
                )
            elif p < 0:
                lines.append(f"node {name} root")
            else:
                lines.append(f"node {name} child-of {self.ids[p]}")
        for a in self.preorder:
            if a in self.matrix:
                rows = ["".join("1" if x else "0" for x in row) for row in self.matrix[a]]
                lines.append(f"matrix {self.ids[a]} " + " ".join(rows))
        for a in self.preorder:
            if a in self.rename:
                rho = self.rename[a]
                if all(rho[i] == i for i in range(k)):
                    lines.append(f"rename {self.ids[a]} id")
                else:
                    lines.append(f"rename {self.ids[a]} " + " ".join(str(x + 1) for x in rho))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class NodeView:
    a: int
    vertices: frozenset[int]
    labels: dict[int, int]
    by_label: tuple[tuple[int, ...], ...]


def build_model(
    k: int,
    parent: Sequence[int],
    matrix: dict[int, np.ndarray | Sequence[Sequence[int]]],
    rename: dict[int, Sequence[int]],
    leaf_vertex: dict[int, int],
    leaf_label: dict[int, int],
    ids: Sequence[str] | None = None,
    children: Sequence[Sequence[int]] | None = None,
) -> TreeModel:
    """Assemble a model from 0-indexed arrays (used by generators and tests)."""
    if ids is None:
        ids = [f"x{a}" for a in range(len(parent))]
    if children is None:
        ch: list[list[int]] = [[] for _ in parent]
        for a, p in enumerate(parent):
            if p >= 0:
                ch[p].append(a)
        children = ch
    mats = {a: np.asarray(m, dtype=bool) for a, m in matrix.items()}
    return TreeModel(
        k=k,
        ids=tuple(ids),
        parent=tuple(parent),
        children=tuple(tuple(c) for c in children),
        matrix=mats,
        rename={a: tuple(r) for a, r in rename.items()},
        leaf_vertex=dict(leaf_vertex),
        leaf_label=dict(leaf_label),
    )


def parse_tree_model(text: str | bytes) -> TreeModel:
    """Parse the line-oriented model format; structural errors raise ParseError."""
    if isinstance(text, bytes):
        text = text.decode()
    k = None
    index: dict[str, int] = {}
    ids: list[str] = []
    parent_name: list[str | None] = []
    decl_line: list[int] = []
    leaves: dict[int, tuple[int, int]] = {}
    mats: dict[int, np.ndarray] = {}
    renames: dict[int, tuple[int, ...]] = {}
    pending: list[tuple[str, list[str], int]] = []
    header = False

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if not header:
            if parts != ["shrubmodel", "1"]:
                raise ParseError("expected header 'shrubmodel 1'", lineno)
            header = True
            continue
        key = parts[0]
        if k is None:
            if key != "k" or len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 1:
                raise ParseError("expected 'k <positive count>'", lineno)
            k = int(parts[1])
            continue
        if key in ("node", "leaf"):
            if len(parts) < 3:
                raise ParseError(f"truncated {key} line", lineno)
            name = parts[1]
            if name in index:
                raise ParseError(f"duplicate node id {name!r}", lineno)
            if key == "node":
                if parts[2:] == ["root"]:
                    par = None
                elif len(parts) == 4 and parts[2] == "child-of":
                    par = parts[3]
                else:
                    raise ParseError("expected 'node <id> root' or 'node <id> child-of <pid>'", lineno)
            else:
                if len(parts) != 8 or parts[2] != "child-of" or parts[4] != "vertex" or parts[6] != "label":
                    raise ParseError("expected 'leaf <id> child-of <pid> vertex <v> label <l>'", lineno)
                par = parts[3]
                try:
                    v, lab = int(parts[5]), int(parts[7])
                except ValueError:
                    raise ParseError("vertex and label must be integers", lineno) from None
                if v < 0:
                    raise ParseError("negative vertex id", lineno)
                if not 1 <= lab <= k:
                    raise ParseError(f"leaf label {lab} outside [1,{k}]", lineno)
                leaves[len(ids)] = (v, lab - 1)
            index[name] = len(ids)
            ids.append(name)
            parent_name.append(par)
            decl_line.append(lineno)
        elif key in ("matrix", "rename"):
            pending.append((key, parts, lineno))
        else:
            raise ParseError(f"unknown directive {key!r}", lineno)

    if not header:
        raise ParseError("empty input, expected 'shrubmodel 1'", 1)
    if k is None:
        raise ParseError("missing 'k <k>' line")

    for key, parts, lineno in pending:
        if len(parts) < 2 or parts[1] not in index:
            raise ParseError(f"{key} refers to unknown node", lineno)
        a = index[parts[1]]
        if key == "matrix":
            rows = parts[2:]
            if len(rows) != k or any(len(r) != k or set(r) - {"0", "1"} for r in rows):
                raise ParseError(f"matrix dimension mismatch: need {k} rows of {k} 0/1 characters", lineno)
            if a in mats:
                raise ParseError("duplicate matrix", lineno)
            if a in leaves:
                raise ParseError("matrix given for a leaf", lineno)
            m = np.array([[c == "1" for c in r] for r in rows], dtype=bool)
            if not (m == m.T).all():
                raise ParseError("matrix is not symmetric", lineno)
            mats[a] = m
        else:
            if a in renames:
                raise ParseError("duplicate rename", lineno)
            targets = parts[2:]
            if targets == ["id"]:
                renames[a] = tuple(range(k))
                continue
            if len(targets) != k:
                raise ParseError(f"rename needs {k} targets", lineno)
            try:
                img = [int(x) for x in targets]
            except ValueError:
                raise ParseError("rename targets must be integers", lineno) from None
            if any(not 1 <= x <= k for x in img):
                raise ParseError(f"rename out of range: targets must lie in [1,{k}]", lineno)
            renames[a] = tuple(x - 1 for x in img)

    parent = []
    for a, par in enumerate(parent_name):
        if par is None:
            parent.append(-1)
        elif par not in index:
            raise ParseError(f"orphan node {ids[a]!r}: unknown parent {par!r}", decl_line[a])
        elif index[par] in leaves:
            raise ParseError(f"node {ids[a]!r} is a child of leaf {par!r}", decl_line[a])
        else:
            parent.append(index[par])
    roots = [a for a, p in enumerate(parent) if p < 0]
    if len(roots) != 1:
        raise ParseError("forest, not tree" if roots else "no root node")
    children: list[list[int]] = [[] for _ in ids]
    for a, p in enumerate(parent):
        if p >= 0:
            children[p].append(a)
    # every node must reach the root
    for a in range(len(ids)):
        seen, b = set(), a
        while parent[b] >= 0:
            if b in seen:
                raise ParseError(f"cycle through node {ids[a]!r}")
            seen.add(b)
            b = parent[b]
    for a in range(len(ids)):
        if a in leaves:
            continue
        if not children[a]:
            raise ParseError(f"internal node {ids[a]!r} has no children", decl_line[a])
        if a not in mats:
            raise ParseError(f"missing matrix for internal node {ids[a]!r}", decl_line[a])
    for a in range(len(ids)):
        if parent[a] >= 0 and a not in renames:
            raise ParseError(f"missing rename for node {ids[a]!r}", decl_line[a])
        if parent[a] < 0 and a in renames:
            raise ParseError("root has no incoming edge, rename not allowed", decl_line[a])
    verts = sorted(v for v, _ in leaves.values())
    if verts != list(range(len(verts))):
        raise ParseError("leaf/vertex bijection violated: vertices must be exactly 0..n-1")
    return build_model(
        k,
        parent,
        mats,
        renames,
        {a: v for a, (v, _) in leaves.items()},
        {a: lab for a, (_, lab) in leaves.items()},
        ids=ids,
        children=children,
    )


def validate(m: TreeModel) -> list[str]:
    """Check all model invariants; returns diagnostics, empty on success."""
    diags: list[str] = []
    k = m.k
    roots = [a for a, p in enumerate(m.parent) if p < 0]
    if len(roots) == 0:
        return ["no root"]
    if len(roots) > 1:
        return ["forest, not tree"]
    root = roots[0]
    if root in m.rename:
        diags.append("root has no incoming edge")
    for a, p in enumerate(m.parent):
        if p >= len(m.parent):
            diags.append(f"node {m.ids[a]}: parent out of range")
    # reachability
    reach = set()
    stack = [root]
    while stack:
        a = stack.pop()
        if a in reach:
            diags.append("cycle in tree")
            break
        reach.add(a)
        stack.extend(m.children[a])
    if len(reach) != len(m.parent):
        diags.append("orphan nodes not reachable from root")
    for a in range(len(m.parent)):
        if m.parent[a] >= 0 and a not in m.children[m.parent[a]]:
            diags.append(f"node {m.ids[a]}: parent/child links disagree")
        if m.is_leaf(a):
            if m.children[a]:
                diags.append(f"leaf {m.ids[a]} has children")
            if not 0 <= m.leaf_label[a] < k:
                diags.append(f"leaf {m.ids[a]} label out of range")
            if a in m.matrix:
                diags.append(f"leaf {m.ids[a]} carries a matrix")
        else:
            if not m.children[a]:
                diags.append(f"internal node {m.ids[a]} has no children")
            mat = m.matrix.get(a)
            if mat is None:
                diags.append(f"internal node {m.ids[a]} has no matrix")
            elif mat.shape != (k, k):
                diags.append(f"node {m.ids[a]}: matrix shape {mat.shape} != ({k},{k})")
            elif not (mat == mat.T).all():
                diags.append(f"node {m.ids[a]}: matrix not symmetric")
        if m.parent[a] >= 0:
            rho = m.rename.get(a)
            if rho is None:
                diags.append(f"node {m.ids[a]}: missing rename")
            elif len(rho) != k or any(not 0 <= x < k for x in rho):
                diags.append(f"node {m.ids[a]}: rename maps outside [k]")
    verts = sorted(m.leaf_vertex.values())
    if verts != list(range(len(verts))):
        diags.append("leaf/vertex bijection violated")
    return diags


def lca(m: TreeModel, a: int, b: int) -> int:
    """Least common ancestor by depth equalization and parent walking."""
    depth = m.node_depth
    while depth[a] > depth[b]:
        a = m.parent[a]
    while depth[b] > depth[a]:
        b = m.parent[b]
    while a != b:
        a, b = m.parent[a], m.parent[b]
    return a


def label_at(m: TreeModel, a: int, v: int) -> int:
    """lambda_a(v): compose the renamings from the leaf of v up to a."""
    if v not in m.vertex_leaf:
        raise DomainError(f"vertex {v} is not in the model")
    b = m.vertex_leaf[v]
    lab = m.leaf_label[b]
    while b != a:
        if m.parent[b] < 0:
            raise DomainError(f"vertex {v} is not below node {m.ids[a]}")
        lab = m.rename[b][lab]
        b = m.parent[b]
    return lab


def edge_by_lca(m: TreeModel, u: int, v: int) -> bool:
    a = lca(m, m.vertex_leaf[u], m.vertex_leaf[v])
    return bool(m.matrix[a][label_at(m, a, u), label_at(m, a, v)])


def realize(m: TreeModel) -> LabeledGraph:
    """The graph whose edges are dictated by the least-common-ancestor rule."""
    edges = set()
    lab = m.labeling
    for a in m.preorder:
        if m.is_leaf(a):
            continue
        mat = m.matrix[a]
        kids = m.children[a]
        la = lab[a]
        for x, b in enumerate(kids):
            for c in kids[x + 1 :]:
                for u in lab[b]:
                    row = mat[la[u]]
                    for v in lab[c]:
                        if row[la[v]]:
                            edges.add((min(u, v), max(u, v)))
    return LabeledGraph(m.n, frozenset(edges))
