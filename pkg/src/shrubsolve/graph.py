"""Plain undirected graphs with optional vertex weights and homomorphism lists."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import DomainError, ParseError


@dataclass(frozen=True)
class LabeledGraph:
    n: int
    edges: frozenset[tuple[int, int]] = frozenset()
    weights: Mapping[int, int] | None = None
    lists: Mapping[int, frozenset[int]] | None = None
    adj: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise DomainError("vertex count must be nonnegative")
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise DomainError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise DomainError(f"edge ({u},{v}) out of range")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))
        if self.weights is not None:
            for v, w in self.weights.items():
                if not 0 <= v < self.n or w < 1:
                    raise DomainError(f"bad weight {w} for vertex {v}")
        if self.lists is not None:
            object.__setattr__(
                self, "lists", {v: frozenset(ls) for v, ls in self.lists.items()}
            )
        adj = [0] * self.n
        for u, v in norm:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        object.__setattr__(self, "adj", tuple(adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], **kw) -> "LabeledGraph":
        return cls(n, frozenset(edges), **kw)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def weight(self, v: int) -> int:
        if self.weights is None:
            return 1
        return self.weights.get(v, 1)

    def to_text(self) -> str:
        lines = ["graph 1", f"n {self.n}"]
        lines += [f"e {u} {v}" for u, v in self.sorted_edges()]
        if self.weights:
            lines += [f"w {v} {w}" for v, w in sorted(self.weights.items())]
        if self.lists:
            lines += [
                "list " + " ".join(map(str, [v, *sorted(ls)]))
                for v, ls in sorted(self.lists.items())
            ]
        return "\n".join(lines) + "\n"


def _mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def is_independent_set(g: LabeledGraph, s: Iterable[int]) -> bool:
    """True iff no edge of g has both endpoints in s."""
    m = _mask(s)
    x = m
    while x:
        low = x & -x
        v = low.bit_length() - 1
        if g.adj[v] & m:
            return False
        x ^= low
    return True


def cut_size(g: LabeledGraph, x: Iterable[int]) -> int:
    """Number of edges with exactly one endpoint in x."""
    m = _mask(x)
    return sum(1 for u, v in g.edges if (m >> u & 1) != (m >> v & 1))


def _ints(parts: list[str], lineno: int) -> list[int]:
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(parts)!r}", lineno) from None


def parse_graph(text: str | bytes) -> LabeledGraph:
    if isinstance(text, bytes):
        text = text.decode()
    n = None
    edges: set[tuple[int, int]] = set()
    weights: dict[int, int] = {}
    lists: dict[int, frozenset[int]] = {}
    header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if not header:
            if parts != ["graph", "1"]:
                raise ParseError("expected header 'graph 1'", lineno)
            header = True
            continue
        key, rest = parts[0], parts[1:]
        if n is None:
            if key != "n" or len(rest) != 1:
                raise ParseError("expected 'n <count>'", lineno)
            (n,) = _ints(rest, lineno)
            if n < 0:
                raise ParseError("negative vertex count", lineno)
            continue
        if key == "e":
            if len(rest) != 2:
                raise ParseError("edge line needs two endpoints", lineno)
            u, v = _ints(rest, lineno)
            if not (0 <= u < n and 0 <= v < n):
                raise ParseError(f"endpoint out of range in edge {u} {v}", lineno)
            if u >= v:
                raise ParseError(f"edge endpoints must satisfy u < v, got {u} {v}", lineno)
            if (u, v) in edges:
                raise ParseError(f"duplicate edge {u} {v}", lineno)
            edges.add((u, v))
        elif key == "w":
            if len(rest) != 2:
                raise ParseError("weight line needs vertex and weight", lineno)
            v, w = _ints(rest, lineno)
            if not 0 <= v < n:
                raise ParseError(f"vertex {v} out of range", lineno)
            if w < 1:
                raise ParseError("weights must be positive", lineno)
            if v in weights:
                raise ParseError(f"duplicate weight for vertex {v}", lineno)
            weights[v] = w
        elif key == "list":
            if not rest:
                raise ParseError("list line needs a vertex", lineno)
            v, *hs = _ints(rest, lineno)
            if not 0 <= v < n:
                raise ParseError(f"vertex {v} out of range", lineno)
            if any(h < 0 for h in hs):
                raise ParseError("negative pattern index", lineno)
            if v in lists:
                raise ParseError(f"duplicate list for vertex {v}", lineno)
            lists[v] = frozenset(hs)
        else:
            raise ParseError(f"unknown directive {key!r}", lineno)
    if not header:
        raise ParseError("empty input, expected 'graph 1'", 1)
    if n is None:
        raise ParseError("missing 'n <count>' line")
    return LabeledGraph(n, frozenset(edges), weights or None, lists or None)
