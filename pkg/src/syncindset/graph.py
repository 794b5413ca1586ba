"""Game graphs X(G) on Q x A and plain simple graphs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable

import numpy as np

from .algebra import ValidationError
from .games import SynchronousGame, require_valid


@dataclass
class GameGraph:
    """Simple undirected graph with a fixed vertex order.

    For game graphs the vertices are index pairs (q, a) in lexicographic order.
    """

    vertices: list[Hashable]
    adjacency: np.ndarray

    def __post_init__(self):
        self.vertices = [tuple(v) if isinstance(v, list) else v for v in self.vertices]
        adj = np.asarray(self.adjacency, dtype=bool)
        n = len(self.vertices)
        if adj.shape != (n, n):
            raise ValidationError(f"adjacency must be {n}x{n}, got {adj.shape}")
        if not np.array_equal(adj, adj.T):
            raise ValidationError("adjacency is not symmetric")
        if np.any(np.diag(adj)):
            raise ValidationError("graph has self-loops")
        if len(set(self.vertices)) != n:
            raise ValidationError("duplicate vertex labels")
        self.adjacency = adj
        self._index = {v: i for i, v in enumerate(self.vertices)}

    def index(self, v) -> int:
        key = tuple(v) if isinstance(v, list) else v
        try:
            return self._index[key]
        except KeyError:
            raise ValidationError(f"unknown vertex {v!r}") from None

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    def edges(self) -> list[tuple[int, int]]:
        """Unordered edges (i < j) as vertex indices, sorted."""
        iu, ju = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(iu.tolist(), ju.tolist()))

    def degree(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def __eq__(self, other):
        if not isinstance(other, GameGraph):
            return NotImplemented
        return self.vertices == other.vertices and bool(np.array_equal(self.adjacency, other.adjacency))

    @classmethod
    def from_edges(cls, vertices: list, edges: Iterable[tuple]) -> "GameGraph":
        vertices = [tuple(v) if isinstance(v, list) else v for v in vertices]
        index = {v: i for i, v in enumerate(vertices)}
        adj = np.zeros((len(vertices), len(vertices)), dtype=bool)
        for u, v in edges:
            u = tuple(u) if isinstance(u, list) else u
            v = tuple(v) if isinstance(v, list) else v
            if u not in index or v not in index:
                raise ValidationError(f"edge ({u!r}, {v!r}) mentions an unknown vertex")
            i, j = index[u], index[v]
            if i == j:
                raise ValidationError(f"self-loop at {u!r}")
            adj[i, j] = adj[j, i] = True
        return cls(vertices, adj)


def build_game_graph(g: SynchronousGame) -> GameGraph:
    """(q,a) ~ (q',a') iff V(q,q';a,a') = 0 or V(q',q;a',a) = 0, no self-loops."""
    require_valid(g)
    nq, na = g.num_questions, g.num_answers
    lose = ~g.predicate  # [q, q', a, a']
    both = lose | lose.transpose(1, 0, 3, 2)
    adj = both.transpose(0, 2, 1, 3).reshape(nq * na, nq * na).copy()
    np.fill_diagonal(adj, False)
    vertices = [(q, a) for q in range(nq) for a in range(na)]
    return GameGraph(vertices, adj)


def is_independent_set(x: GameGraph, s) -> bool:
    idx = [x.index(v) for v in s]
    if len(set(idx)) != len(idx):
        return False
    sub = x.adjacency[np.ix_(idx, idx)]
    return not bool(sub.any())


def _label(v) -> str:
    if isinstance(v, tuple):
        return ",".join(str(p) for p in v)
    return str(v)


def export_graph(x: GameGraph, fmt: str = "dot") -> str:
    order = sorted(range(x.num_vertices), key=lambda i: x.vertices[i])
    rank = {i: r for r, i in enumerate(order)}
    edges = sorted(
        (tuple(sorted((i, j), key=rank.get)) for i, j in x.edges()),
        key=lambda e: (rank[e[0]], rank[e[1]]),
    )
    if fmt == "edge_list":
        return "".join(f"{_label(x.vertices[i])} {_label(x.vertices[j])}\n" for i, j in edges)
    if fmt == "dot":
        lines = ["graph G {"]
        lines += [f'  "{_label(x.vertices[i])}";' for i in order]
        lines += [f'  "{_label(x.vertices[i])}" -- "{_label(x.vertices[j])}";' for i, j in edges]
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown graph format {fmt!r}")
