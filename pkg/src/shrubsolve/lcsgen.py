"""Hard-instance generator: Longest Common Subsequence to Independent Set.

Builds the selection, inferiority and matching gadgets, the target
value goal, and an explicit tree-model of depth at most 2 log t + 4 with
14 r log N - 3 labels.

Vertex ids are assigned in this canonical order, each block in
lexicographic order of its coordinates (all 1-indexed, bits x in {0,1}):

    ("S", p, q, i, x)                    selection gadgets, q-major
    ("Inf", p, q, "v", i, x)             inferiority gadgets, q-major,
    ("Inf", p, q, "V", i, j)             v-vertices before the V^01 sets
    ("Match", p, q, I, J, ps, i, x)      matching gadgets, q-major; ps is p or p+1
    ("Match", p, q, I, J, "v")           the selector of the pair (I, J)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import CapabilityError, DomainError, ParseError
from .graph import LabeledGraph
from .oracle import independence_number
from .tree_model import TreeModel, build_model, lca, realize

FRESH = "♠"
GADGET_CAP = 400  # largest gadget handed to the exact independence routine


@dataclass(frozen=True)
class LcsInstance:
    N: int
    t: int
    alphabet: str
    strings: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "strings", tuple(self.strings))
        if any(len(s) != self.N for s in self.strings):
            raise DomainError(f"every string must have length N = {self.N}")
        bad = {c for s in self.strings for c in s} - set(self.alphabet)
        if bad:
            raise DomainError(f"letters outside the alphabet: {''.join(sorted(bad))}")
        if not 0 <= self.t <= self.N:
            raise DomainError("t must lie in [0, N]")

    @property
    def r(self) -> int:
        return len(self.strings)

    def to_text(self) -> str:
        return "\n".join(["lcs 1", f"N {self.N} t {self.t}", f"alphabet {self.alphabet}", *self.strings]) + "\n"


def parse_lcs(text: str | bytes) -> LcsInstance:
    if isinstance(text, bytes):
        text = text.decode()
    lines = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), 1) if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0][1] != "lcs 1":
        raise ParseError("expected header 'lcs 1'", lines[0][0] if lines else 1)
    if len(lines) < 3:
        raise ParseError("expected 'N <N> t <t>' and 'alphabet <chars>' lines")
    lineno, nt = lines[1]
    parts = nt.split()
    if len(parts) != 4 or parts[0] != "N" or parts[2] != "t":
        raise ParseError("expected 'N <N> t <t>'", lineno)
    try:
        N, t = int(parts[1]), int(parts[3])
    except ValueError:
        raise ParseError("N and t must be integers", lineno) from None
    lineno, al = lines[2]
    if not al.startswith("alphabet"):
        raise ParseError("expected 'alphabet <chars>'", lineno)
    alphabet = al[len("alphabet") :].strip()
    strings = []
    for lineno, s in lines[3:]:
        if len(s) != N:
            raise ParseError(f"string has length {len(s)}, expected {N}", lineno)
        strings.append(s)
    try:
        return LcsInstance(N, t, alphabet, tuple(strings))
    except DomainError as e:
        raise ParseError(str(e)) from None


def pad_to_power_of_two(inst: LcsInstance) -> LcsInstance:
    """Append a fresh letter t' = 2^ceil(log N) - N times to each string and raise t by t'."""
    target = 1 << max(0, (inst.N - 1).bit_length())
    extra = target - inst.N
    if extra == 0:
        return inst
    fresh = FRESH
    code = 0x2660
    while fresh in inst.alphabet:
        code += 1
        fresh = chr(code)
    return LcsInstance(
        target,
        inst.t + extra,
        inst.alphabet + fresh,
        tuple(s + fresh * extra for s in inst.strings),
    )


def bits_of(I: int, logN: int) -> list[int]:
    """Binary digits of I - 1, most significant first."""
    return [(I - 1) >> (logN - i) & 1 for i in range(1, logN + 1)]


def matching_pairs(inst: LcsInstance, p: int) -> list[tuple[int, int]]:
    """M_p: positions (I, J) with s_p[I] = s_{p+1}[J], 1-indexed."""
    a, b = inst.strings[p - 1], inst.strings[p]
    return [(I, J) for I in range(1, inst.N + 1) for J in range(1, inst.N + 1) if a[I - 1] == b[J - 1]]


@dataclass
class ReductionOutput:
    instance: LcsInstance
    graph: LabeledGraph
    model: TreeModel
    goal: int
    vertex_atlas: dict[tuple, int]
    pairs: dict[int, list[tuple[int, int]]] = field(default_factory=dict)

    @property
    def logN(self) -> int:
        return self.instance.N.bit_length() - 1

    def gadget(self, kind: str, p: int, q: int) -> list[int]:
        return [v for key, v in self.vertex_atlas.items() if key[:3] == (kind, p, q)]

    def selection(self, p: int, q: int, I: int) -> list[int]:
        """Vertices of S_p^q|I."""
        return [self.vertex_atlas[("S", p, q, i, x)] for i, x in enumerate(bits_of(I, self.logN), 1)]


class _Layout:
    """Label blocks L_S, L_M, L_min, L_max, L_Inf, {l0}, packed in that order."""

    def __init__(self, r: int, logN: int):
        self.r, self.logN = r, logN
        self.B = 2 * r * logN
        self.inf_chunk = 3 * logN - 2
        self.k = 14 * r * logN - 3
        self.l0 = self.k - 1

    def sel(self, block: int, p: int, i: int, x: int) -> int:
        # block 0 = L_S, 1 = L_M, 2 = L_min, 3 = L_max
        return block * self.B + (p - 1) * 2 * self.logN + (i - 1) * 2 + x

    def inf(self, slot: int, p: int, part: int) -> int:
        return 4 * self.B + (slot * self.r + p - 1) * self.inf_chunk + part

    def keep(self, blocks: tuple[int, ...], inf: bool) -> list[int]:
        """Renaming that fixes the given selection blocks (and L_Inf) and sends the rest to l0."""
        out = [self.l0] * self.k
        for blk in blocks:
            for x in range(blk * self.B, (blk + 1) * self.B):
                out[x] = x
        if inf:
            for x in range(4 * self.B, self.l0):
                out[x] = x
        return out

    def move(self, src: int, dst: int) -> list[int]:
        out = [self.l0] * self.k
        for x in range(self.B):
            out[src * self.B + x] = dst * self.B + x
        return out


def build_reduction(inst: LcsInstance) -> ReductionOutput:
    if inst.t < 1:
        raise DomainError("t must be at least 1")
    if not inst.alphabet:
        raise DomainError("empty alphabet")
    if inst.r < 1:
        raise DomainError("need at least one string")
    if inst.N < 2 or inst.N & (inst.N - 1):
        raise DomainError("N must be a power of two, at least 2; pad the instance first")
    N, t, r = inst.N, inst.t, inst.r
    logN = N.bit_length() - 1
    pairs = {p: matching_pairs(inst, p) for p in range(1, r)}

    atlas: dict[tuple, int] = {}

    def vert(key: tuple) -> int:
        atlas[key] = len(atlas)
        return atlas[key]

    for q in range(1, t + 1):
        for p in range(1, r + 1):
            for i in range(1, logN + 1):
                for x in (0, 1):
                    vert(("S", p, q, i, x))
    for q in range(1, t):
        for p in range(1, r + 1):
            for i in range(1, logN):
                for x in (0, 1):
                    vert(("Inf", p, q, "v", i, x))
            for i in range(1, logN + 1):
                for j in range(1, logN - i + 2):
                    vert(("Inf", p, q, "V", i, j))
    for q in range(1, t + 1):
        for p in range(1, r):
            for I, J in pairs[p]:
                for ps in (p, p + 1):
                    for i in range(1, logN + 1):
                        for x in (0, 1):
                            vert(("Match", p, q, I, J, ps, i, x))
                vert(("Match", p, q, I, J, "v"))

    edges: set[tuple[int, int]] = set()

    def edge(u: int, v: int) -> None:
        edges.add((min(u, v), max(u, v)))

    for q in range(1, t + 1):
        for p in range(1, r + 1):
            for i in range(1, logN + 1):
                edge(atlas[("S", p, q, i, 0)], atlas[("S", p, q, i, 1)])
    for q in range(1, t):
        for p in range(1, r + 1):
            S = lambda qq, i, x: atlas[("S", p, qq, i, x)]  # noqa: E731
            vv = lambda i, x: atlas[("Inf", p, q, "v", i, x)]  # noqa: E731
            VV = lambda i: [atlas[("Inf", p, q, "V", i, j)] for j in range(1, logN - i + 2)]  # noqa: E731
            for i in range(1, logN):
                edge(vv(i, 0), vv(i, 1))
                for x in (0, 1):
                    edge(vv(i, x), S(q, i, 1 - x))
                    edge(vv(i, x), S(q + 1, i, 1 - x))
            for i in range(1, logN + 1):
                for u in VV(i):
                    edge(u, S(q, i, 1))
                    edge(u, S(q + 1, i, 0))
                    for j in range(i, logN):
                        edge(u, vv(j, 0))
                        edge(u, vv(j, 1))
                    for j in range(i + 1, logN + 1):
                        for w in VV(j):
                            edge(u, w)
    for q in range(1, t + 1):
        for p in range(1, r):
            selectors = []
            for I, J in pairs[p]:
                sel = atlas[("Match", p, q, I, J, "v")]
                selectors.append(sel)
                for ps, pos in ((p, I), (p + 1, J)):
                    want = bits_of(pos, logN)
                    for i in range(1, logN + 1):
                        c0, c1 = atlas[("Match", p, q, I, J, ps, i, 0)], atlas[("Match", p, q, I, J, ps, i, 1)]
                        edge(c0, c1)
                        for x, c in ((0, c1), (1, c0)):
                            edge(atlas[("S", ps, q, i, x)], c)
                        edge(sel, c1 if want[i - 1] == 0 else c0)
            for u, v in combinations(selectors, 2):
                edge(u, v)

    n = len(atlas)
    graph = LabeledGraph(n, frozenset(edges))
    model = _build_model(inst, pairs, atlas, graph, logN)
    goal = (r * t + r * (t - 1)) * logN + sum(t * (1 + 2 * len(pairs[p]) * logN) for p in range(1, r))
    return ReductionOutput(inst, graph, model, goal, atlas, pairs)


def _build_model(inst, pairs, atlas, graph: LabeledGraph, logN: int) -> TreeModel:
    r, t = inst.r, inst.t
    L = _Layout(r, logN)
    k = L.k
    parent: list[int] = []
    ids: list[str] = []
    rename: dict[int, list[int]] = {}
    leaf_vertex: dict[int, int] = {}
    leaf_label: dict[int, int] = {}
    ident = list(range(k))

    def node(par: int, name: str, rho: list[int] | None = None) -> int:
        a = len(parent)
        parent.append(par)
        ids.append(name)
        if par >= 0:
            rename[a] = rho if rho is not None else ident
        return a

    def leaf(par: int, v: int, label: int) -> None:
        a = node(par, f"v{v}")
        leaf_vertex[a] = v
        leaf_label[a] = label

    def part_q(q: int, par: int, rho: list[int]) -> None:
        a = node(par, f"a{q}", rho)
        for p in range(1, r + 1):
            for i in range(1, logN + 1):
                for x in (0, 1):
                    leaf(a, atlas[("S", p, q, i, x)], L.sel(0, p, i, x))
        for p in range(1, r):
            if not pairs[p]:
                continue  # an empty M_p leaves no matching gadget to hang here
            ap = node(a, f"a{q}_{p}")
            for I, J in pairs[p]:
                apij = node(ap, f"a{q}_{p}_{I}_{J}")
                for ps in (p, p + 1):
                    for i in range(1, logN + 1):
                        for x in (0, 1):
                            leaf(apij, atlas[("Match", p, q, I, J, ps, i, x)], L.sel(1, ps, i, x))
                leaf(apij, atlas[("Match", p, q, I, J, "v")], L.l0)

    def inferiority(q: int, par: int, slot: int) -> None:
        for p in range(1, r + 1):
            for i in range(1, logN):
                for x in (0, 1):
                    leaf(par, atlas[("Inf", p, q, "v", i, x)], L.inf(slot, p, (i - 1) * 2 + x))
            for i in range(1, logN + 1):
                for j in range(1, logN - i + 2):
                    leaf(par, atlas[("Inf", p, q, "V", i, j)], L.inf(slot, p, 2 * (logN - 1) + i - 1))

    def interval(x: int, y: int, par: int, rho: list[int] | None, side: int) -> None:
        # side 2: S^x must land in L_min at the root; side 3: S^y in L_max
        alpha = node(par, f"alpha{x}_{y}", rho)
        if x == y:
            part_q(x, alpha, L.move(0, side))
            return
        q = x + (y - x) // 2
        part_q(q, alpha, L.keep((0,), False) if x < q else L.move(0, 2))
        if x < q:
            lo = node(alpha, f"lo{x}_{y}", L.keep((2,), True))
            interval(x, q - 1, lo, L.keep((2, 3), False), 2)
            inferiority(q - 1, lo, 0)
        hi = node(alpha, f"hi{x}_{y}", L.keep((3,), True))
        interval(q + 1, y, hi, L.keep((2, 3), False), 3)
        inferiority(q, hi, 1)

    interval(1, t, -1, None, 2)

    internal = [a for a in range(len(parent)) if a not in leaf_vertex]
    blank = {a: np.zeros((k, k), dtype=bool) for a in internal}
    skeleton = build_model(k, parent, blank, rename, leaf_vertex, leaf_label, ids=ids)
    lab = skeleton.labeling
    vleaf = skeleton.vertex_leaf
    for u, v in graph.edges:
        a = lca(skeleton, vleaf[u], vleaf[v])
        i, j = lab[a][u], lab[a][v]
        blank[a][i, j] = blank[a][j, i] = True
    model = build_model(k, parent, blank, rename, leaf_vertex, leaf_label, ids=ids)
    got = realize(model)
    if got.edges != graph.edges:
        extra = sorted(got.edges - graph.edges)[:3]
        raise AssertionError(f"model realizes spurious edges, e.g. {extra}")
    return model


def _induced(g: LabeledGraph, verts: list[int], drop: set[int] = frozenset()) -> LabeledGraph:
    keep = [v for v in verts if v not in drop]
    idx = {v: x for x, v in enumerate(keep)}
    es = [(idx[u], idx[v]) for u, v in g.edges if u in idx and v in idx]
    return LabeledGraph.from_edges(len(keep), es)


def _alpha(g: LabeledGraph, verts: list[int], drop: set[int] = frozenset()) -> int:
    if len(verts) > GADGET_CAP:
        raise CapabilityError(f"gadget with {len(verts)} vertices exceeds {GADGET_CAP}")
    return independence_number(_induced(g, verts, drop))


def _closed_nbhd(g: LabeledGraph, vs: list[int]) -> set[int]:
    out = set(vs)
    for v in vs:
        m = g.adj[v]
        while m:
            low = m & -m
            out.add(low.bit_length() - 1)
            m ^= low
    return out


def gadget_independence_checks(out: ReductionOutput, samples: int | None = None, seed: int = 0) -> list[str]:
    """Diagnostics for the gadget independence numbers and their completion properties.

    samples bounds the (I, J) pairs tried per gadget; None tries all N^2.
    A matching gadget with M_p empty has no vertices, so its expected
    independence number is 0 rather than 1.
    """
    inst, g, logN, N = out.instance, out.graph, out.logN, out.instance.N
    rng = np.random.Generator(np.random.PCG64(seed))
    all_pairs = [(I, J) for I in range(1, N + 1) for J in range(1, N + 1)]

    def chosen() -> list[tuple[int, int]]:
        if samples is None or samples >= len(all_pairs):
            return all_pairs
        picks = rng.choice(len(all_pairs), size=samples, replace=False)
        return [all_pairs[x] for x in sorted(picks)]

    diags = []
    for q in range(1, inst.t):
        for p in range(1, inst.r + 1):
            verts = out.gadget("Inf", p, q)
            got = _alpha(g, verts)
            if got != logN:
                diags.append(f"Inf({p},{q}): independence number {got}, expected {logN}")
            for I, J in chosen():
                blocked = _closed_nbhd(g, out.selection(p, q, I) + out.selection(p, q + 1, J))
                ok = _alpha(g, verts, blocked) == logN
                if ok != (I < J):
                    diags.append(f"Inf({p},{q}): completion for (I,J)=({I},{J}) is {ok}")
    for q in range(1, inst.t + 1):
        for p in range(1, inst.r):
            verts = out.gadget("Match", p, q)
            M = out.pairs[p]
            want = 1 + 2 * len(M) * logN if M else 0
            got = _alpha(g, verts)
            if got != want:
                diags.append(f"Match({p},{q}): independence number {got}, expected {want}")
            if not M:
                continue
            mset = set(M)
            for I, J in chosen():
                blocked = _closed_nbhd(g, out.selection(p, q, I) + out.selection(p + 1, q, J))
                ok = _alpha(g, verts, blocked) == want
                if ok != ((I, J) in mset):
                    diags.append(f"Match({p},{q}): completion for (I,J)=({I},{J}) is {ok}")
    return diags


def size_bound(inst: LcsInstance) -> int:
    """16 r t N^2 log N, the explicit constant on the vertex count."""
    return 16 * inst.r * inst.t * inst.N**2 * (inst.N.bit_length() - 1)
