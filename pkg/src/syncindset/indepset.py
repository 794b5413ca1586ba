"""t-independent set games, the reduction verifier, and their strategies."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import DEFAULT_TOL, Tolerance, ValidationError, is_pvm
from .games import (
    SynchronousGame,
    SyncQuantumStrategy,
    eval_sync_strategy,
    gram,
    integral_ops,
)
from .graph import GameGraph

WEIGHTINGS = ("uniform", "diagonal")


@dataclass
class IndependentSetGame:
    """The t-independent set game on ``graph``.

    ``source`` is the synchronous game the graph was built from, if any; the
    loss evaluator then reads adjacency straight off its predicate.
    """

    graph: GameGraph
    t: int
    weighting: str = "diagonal"
    source: SynchronousGame | None = None

    def __post_init__(self):
        if int(self.t) != self.t or self.t < 1:
            raise ValidationError(f"t must be a positive integer, got {self.t}")
        self.t = int(self.t)
        if self.weighting not in WEIGHTINGS:
            raise ValidationError(f"weighting must be one of {WEIGHTINGS}, got {self.weighting!r}")

    @property
    def num_vertices(self) -> int:
        return self.graph.num_vertices

    def distribution(self) -> np.ndarray:
        t = self.t
        pi = np.empty((t, t), dtype=object)
        for i in range(t):
            for j in range(t):
                if self.weighting == "uniform":
                    pi[i, j] = Fraction(1, t * t)
                else:
                    pi[i, j] = Fraction(int(i == j), 2 * t) + Fraction(1, 2 * t * t)
        return pi

    def predicate(self, i: int, j: int, u, v) -> bool:
        iu, iv = self.graph.index(u), self.graph.index(v)
        if i == j:
            return iu == iv
        return iu != iv and not self.graph.adjacency[iu, iv]

    def predicate_table(self) -> np.ndarray:
        """V[i, j, u, v] over vertex indices."""
        n, t = self.num_vertices, self.t
        same = np.eye(n, dtype=bool)
        off = ~same & ~self.graph.adjacency
        v = np.empty((t, t, n, n), dtype=bool)
        for i in range(t):
            for j in range(t):
                v[i, j] = same if i == j else off
        return v

    def as_nonlocal_game(self) -> SynchronousGame:
        """View the independent set game as a synchronous game on [t] x V(X)."""
        return SynchronousGame(
            list(range(self.t)), list(self.graph.vertices), self.distribution(), self.predicate_table()
        )


def make_indep_set_game(x: GameGraph, t: int, weighting: str = "diagonal", source=None) -> IndependentSetGame:
    return IndependentSetGame(x, t, weighting, source)


@dataclass
class IndepStrategy:
    """``ops[i, v]`` is the projection P_i^(v), vertices in graph order."""

    ops: np.ndarray
    vertices: list

    def __post_init__(self):
        ops = np.asarray(self.ops, dtype=complex)
        if ops.ndim != 4 or ops.shape[2] != ops.shape[3]:
            raise ValidationError(f"strategy operators must have shape (t, V, d, d), got {ops.shape}")
        self.vertices = [tuple(v) if isinstance(v, list) else v for v in self.vertices]
        if ops.shape[1] != len(self.vertices):
            raise ValidationError(f"{ops.shape[1]} operators per index but {len(self.vertices)} vertices")
        self.ops = ops

    @property
    def dim(self) -> int:
        return self.ops.shape[2]

    @property
    def t(self) -> int:
        return self.ops.shape[0]

    def validate(self, tol: Tolerance = DEFAULT_TOL) -> list[int]:
        return [i for i in range(self.t) if not is_pvm(list(self.ops[i]), tol)]

    def as_sync_strategy(self) -> SyncQuantumStrategy:
        return SyncQuantumStrategy(self.ops)

    def __eq__(self, other):
        if not isinstance(other, IndepStrategy):
            return NotImplemented
        return self.vertices == other.vertices and bool(np.array_equal(self.ops, other.ops))

    @classmethod
    def deterministic(cls, choice: list[int], vertices: list) -> "IndepStrategy":
        ops = np.zeros((len(choice), len(vertices), 1, 1), dtype=complex)
        for i, v in enumerate(choice):
            ops[i, v, 0, 0] = 1
        return cls(ops, vertices)


def reduction_verifier(g: SynchronousGame, i: int, j: int, u, v) -> bool:
    """The verifier of (X(G), |Q|) using only predicate queries and label comparisons."""
    t = g.num_questions
    if not (0 <= i < t and 0 <= j < t):
        raise ValidationError(f"indices ({i}, {j}) out of range [0, {t})")
    (q, a), (q2, a2) = u, v
    for qq in (q, q2):
        if not 0 <= qq < g.num_questions:
            raise ValidationError(f"question {qq} out of range")
    for aa in (a, a2):
        if not 0 <= aa < g.num_answers:
            raise ValidationError(f"answer {aa} out of range")
    if i == j:
        return q == q2 and a == a2
    if q == q2:
        return False
    return bool(g.predicate[q, q2, a, a2]) and bool(g.predicate[q2, q, a2, a])


def _check_strategy(game: IndependentSetGame, s: IndepStrategy, tol: Tolerance):
    if s.t != game.t:
        raise ValidationError(f"strategy has {s.t} indices, game has t={game.t}")
    if s.vertices != list(game.graph.vertices):
        raise ValidationError("strategy vertex labels do not match the graph")
    bad = s.validate(tol)
    if bad:
        raise ValidationError(f"strategy families are not PVMs for indices {bad}")


def _losing_pairs_mask(game: IndependentSetGame) -> np.ndarray:
    """Ordered vertex pairs (v, v') that lose for i != j apart from v = v'."""
    g = game.source
    if g is None:
        return game.graph.adjacency.copy()
    # read straight off the predicate, independent of the graph's symmetrization
    nq, na = g.num_questions, g.num_answers
    index = {v: k for k, v in enumerate(game.graph.vertices)}
    n = game.num_vertices
    mask = np.zeros((n, n), dtype=bool)
    for q in range(nq):
        for a in range(na):
            for q2 in range(nq):
                for a2 in range(na):
                    if not g.predicate[q, q2, a, a2] or not g.predicate[q2, q, a2, a]:
                        mask[index[(q, a)], index[(q2, a2)]] = True
    np.fill_diagonal(mask, False)
    return mask


@dataclass
class LossBreakdown:
    same_vertex: Fraction | float
    adjacent: Fraction | float

    @property
    def total(self):
        return self.same_vertex + self.adjacent


def sync_loss_indep(game: IndependentSetGame, s: IndepStrategy, tol: Tolerance = DEFAULT_TOL):
    """Losing probability of a synchronous strategy under the diagonal weighting.

    loss = 1/(2t^2) [ sum_{i!=j, v} tau(P_i^v P_j^v) + sum_{i!=j, v~v'} tau(P_i^v P_j^v') ].
    Exact when every operator entry is a real integer.
    """
    if game.weighting != "diagonal":
        raise ValidationError("the loss formula holds for the diagonal weighting; evaluate uniform games via games.eval_sync_strategy")
    _check_strategy(game, s, tol)
    t, n, d = game.t, game.num_vertices, s.dim
    exact = integral_ops(s.ops)
    tr = gram(s.ops, exact=exact).reshape(t, n, t, n)
    off = ~np.eye(t, dtype=bool)
    same = np.einsum("ivjv->ij", tr)[off].sum()
    mask = _losing_pairs_mask(game)
    adj = np.where(mask[None, :, None, :], tr, 0).sum(axis=(1, 3))[off].sum()
    if exact:
        scale = Fraction(1, 2 * t * t * d)
        breakdown = LossBreakdown(int(same) * scale, int(adj) * scale)
    else:
        scale = 1.0 / (2 * t * t * d)
        breakdown = LossBreakdown(float(np.real(same)) * scale, float(np.real(adj)) * scale)
    return breakdown.total, breakdown


def eval_indep_strategy(game: IndependentSetGame, s: IndepStrategy, tol: Tolerance = DEFAULT_TOL):
    """Winning probability via the general nonlocal-game evaluator (any weighting)."""
    _check_strategy(game, s, tol)
    return eval_sync_strategy(game.as_nonlocal_game(), s.as_sync_strategy(), tol)


def greedy_independent_set(x: GameGraph, size: int) -> list[int]:
    """Repeatedly take the min-degree vertex of the residual graph (ties by vertex order)."""
    alive = np.ones(x.num_vertices, dtype=bool)
    chosen: list[int] = []
    while len(chosen) < size and alive.any():
        deg = (x.adjacency & alive[None, :]).sum(axis=1)
        deg = np.where(alive, deg, np.iinfo(np.int64).max)
        v = int(np.argmin(deg))
        chosen.append(v)
        alive[v] = False
        alive &= ~x.adjacency[v]
    return chosen


def trivial_fixed_set_strategy(game: IndependentSetGame):
    """Answer according to a fixed set of t vertices; returns (strategy, exact value)."""
    if game.num_vertices == 0:
        raise ValidationError("graph has no vertices")
    chosen = greedy_independent_set(game.graph, game.t)
    chosen += [chosen[-1]] * (game.t - len(chosen))
    s = IndepStrategy.deterministic(chosen, game.graph.vertices)
    return s, eval_indep_strategy(game, s)


def diagonal_mass(game: IndependentSetGame) -> Fraction:
    pi = game.distribution()
    return sum((pi[i, i] for i in range(game.t)), Fraction(0))
