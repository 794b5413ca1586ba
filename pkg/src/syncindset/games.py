"""Synchronous nonlocal games G = (Q, A, pi, V) and their strategies."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Hashable, Sequence

import numpy as np

from .algebra import DEFAULT_TOL, Tolerance, ValidationError, dagger, is_pvm

DEFAULT_CAP = 10**8


def is_exact(pi: np.ndarray) -> bool:
    return pi.dtype == object


def uniform_distribution(n: int) -> np.ndarray:
    pi = np.empty((n, n), dtype=object)
    pi[...] = Fraction(1, n * n)
    return pi


def exact_sum(values) -> Fraction | float:
    total = sum(values.ravel().tolist(), Fraction(0))
    return total


@dataclass
class SynchronousGame:
    """A game with shared question/answer sets.

    ``distribution`` is a |Q|x|Q| array, either of ``Fraction`` (object dtype)
    or of floats. ``predicate[q, q2, a, a2]`` is True where V = 1.
    """

    questions: list[Hashable]
    answers: list[Hashable]
    distribution: np.ndarray
    predicate: np.ndarray

    def __post_init__(self):
        self.questions = list(self.questions)
        self.answers = list(self.answers)
        nq, na = len(self.questions), len(self.answers)
        if nq < 1 or na < 1:
            raise ValidationError("a game needs at least one question and one answer")
        if len(set(self.questions)) != nq or len(set(self.answers)) != na:
            raise ValidationError("question and answer labels must be distinct")
        pi = np.asarray(self.distribution)
        if pi.dtype != object:
            pi = pi.astype(float)
        if pi.shape != (nq, nq):
            raise ValidationError(f"distribution must be {nq}x{nq}, got {pi.shape}")
        self.distribution = pi
        v = np.asarray(self.predicate, dtype=bool)
        if v.shape != (nq, nq, na, na):
            raise ValidationError(f"predicate must have shape {(nq, nq, na, na)}, got {v.shape}")
        self.predicate = v

    @property
    def num_questions(self) -> int:
        return len(self.questions)

    @property
    def num_answers(self) -> int:
        return len(self.answers)

    def __eq__(self, other):
        if not isinstance(other, SynchronousGame):
            return NotImplemented
        return (
            self.questions == other.questions
            and self.answers == other.answers
            and self.distribution.dtype == other.distribution.dtype
            and bool(np.all(self.distribution == other.distribution))
            and bool(np.array_equal(self.predicate, other.predicate))
        )

    @classmethod
    def from_losing_pairs(cls, questions, answers, distribution, losing) -> "SynchronousGame":
        """Build from index tuples (q, q', a, a') where V = 0."""
        questions = list(range(questions)) if isinstance(questions, int) else list(questions)
        answers = list(range(answers)) if isinstance(answers, int) else list(answers)
        nq, na = len(questions), len(answers)
        v = np.ones((nq, nq, na, na), dtype=bool)
        for q, q2, a, a2 in losing:
            v[q, q2, a, a2] = False
        if isinstance(distribution, str) and distribution == "uniform":
            distribution = uniform_distribution(nq)
        return cls(questions, answers, distribution, v)

    def losing_pairs(self) -> list[tuple[int, int, int, int]]:
        return [tuple(int(i) for i in idx) for idx in np.argwhere(~self.predicate)]


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self):
        if self.ok:
            return "valid"
        return "\n".join(self.violations)


def validate_game(g: SynchronousGame) -> ValidationReport:
    report = ValidationReport()
    pi = g.distribution
    if is_exact(pi):
        if any(x < 0 for x in pi.ravel()):
            report.violations.append("distribution has negative entries")
        total = exact_sum(pi)
        if total != 1:
            report.violations.append(f"distribution sums to {total}, expected 1")
    else:
        if np.any(pi < 0):
            report.violations.append("distribution has negative entries")
        total = float(pi.sum())
        if abs(total - 1.0) > 1e-12:
            report.violations.append(f"distribution sums to {total!r}, expected 1")
    na = g.num_answers
    eye = np.eye(na, dtype=bool)
    for q in range(g.num_questions):
        bad = np.argwhere(g.predicate[q, q] != eye)
        for a, a2 in bad:
            report.violations.append(
                f"synchronicity violated at ({q},{q},{a},{a2}): "
                f"V={int(g.predicate[q, q, a, a2])}, expected {int(a == a2)}"
            )
    return report


def require_valid(g: SynchronousGame) -> None:
    report = validate_game(g)
    if not report.ok:
        raise ValidationError(f"invalid game:\n{report}")


@dataclass(frozen=True)
class DeterministicStrategyPair:
    f: tuple[int, ...]
    f_prime: tuple[int, ...]


def _integer_weights(pi: np.ndarray):
    """Scale a distribution to integers. Returns (weights, scale) or None for floats."""
    if not is_exact(pi):
        return None
    fr = [Fraction(x) for x in pi.ravel()]
    den = lcm(*(x.denominator for x in fr))
    ints = [x.numerator * (den // x.denominator) for x in fr]
    if max(ints) * pi.size >= 2**62:
        return None
    return np.array(ints, dtype=np.int64).reshape(pi.shape), den


def deterministic_value(g: SynchronousGame, f: Sequence[int], f_prime: Sequence[int]):
    """sum_{q,q'} pi(q,q') V(q,q'; f(q), f'(q'))."""
    nq = g.num_questions
    total = Fraction(0) if is_exact(g.distribution) else 0.0
    for q in range(nq):
        for q2 in range(nq):
            if g.predicate[q, q2, f[q], f_prime[q2]]:
                total += g.distribution[q, q2]
    return total


def classical_value(g: SynchronousGame, cap: int = DEFAULT_CAP, synchronous: bool = False):
    """Exact classical value by enumeration, with its lexicographically smallest witness.

    For each f the best response f' decouples per question, so the
    enumeration runs over f only; ``cap`` still bounds |A|^(2|Q|).
    """
    nq, na = g.num_questions, g.num_answers
    need = na ** (nq if synchronous else 2 * nq)
    if need > cap:
        raise ValidationError(f"enumeration needs {need} strategy pairs, budget is {cap}")

    scaled = _integer_weights(g.distribution)
    if scaled is None:
        w, den = g.distribution.astype(float), None
    else:
        w, den = scaled

    fs = np.array(list(itertools.product(range(na), repeat=nq)), dtype=np.intp)
    if synchronous:
        score = np.zeros(len(fs), dtype=w.dtype)
        for q in range(nq):
            for q2 in range(nq):
                score += w[q, q2] * g.predicate[q, q2, fs[:, q], fs[:, q2]]
        best = int(np.argmax(score))
        f = tuple(int(x) for x in fs[best])
        pair = DeterministicStrategyPair(f, f)
    else:
        # resp[k, q2, a2] = sum_q w[q,q2] V[q,q2,f_k(q),a2]
        resp = np.zeros((len(fs), nq, na), dtype=w.dtype)
        for q in range(nq):
            resp += w[q][None, :, None] * g.predicate[q][:, fs[:, q], :].transpose(1, 0, 2)
        best_resp = resp.max(axis=2)
        score = best_resp.sum(axis=1)
        best = int(np.argmax(score))
        f = tuple(int(x) for x in fs[best])
        fp = tuple(int(x) for x in np.argmax(resp[best], axis=1))
        pair = DeterministicStrategyPair(f, fp)

    if den is None:
        value = float(score[best])
    else:
        value = Fraction(int(score[best]), den)
    return value, pair


@dataclass
class SyncQuantumStrategy:
    """Per-question PVMs: ``ops[q, a]`` is the d x d projection P_q^a."""

    ops: np.ndarray

    def __post_init__(self):
        ops = np.asarray(self.ops, dtype=complex)
        if ops.ndim != 4 or ops.shape[2] != ops.shape[3]:
            raise ValidationError(f"strategy operators must have shape (Q, A, d, d), got {ops.shape}")
        self.ops = ops

    @property
    def dim(self) -> int:
        return self.ops.shape[2]

    def validate(self, tol: Tolerance = DEFAULT_TOL) -> list[int]:
        """Indices of questions whose family is not a PVM."""
        return [q for q in range(self.ops.shape[0]) if not is_pvm(list(self.ops[q]), tol)]

    def __eq__(self, other):
        if not isinstance(other, SyncQuantumStrategy):
            return NotImplemented
        return self.ops.shape == other.ops.shape and bool(np.array_equal(self.ops, other.ops))

    @classmethod
    def deterministic(cls, f: Sequence[int], num_answers: int) -> "SyncQuantumStrategy":
        ops = np.zeros((len(f), num_answers, 1, 1), dtype=complex)
        for q, a in enumerate(f):
            ops[q, a, 0, 0] = 1
        return cls(ops)


def integral_ops(ops: np.ndarray) -> bool:
    """True if every entry is a real integer (exact evaluation possible)."""
    return bool(np.all(ops.imag == 0) and np.all(ops.real == np.round(ops.real)))


def gram(ops_a: np.ndarray, ops_b: np.ndarray | None = None, exact: bool = False) -> np.ndarray:
    """G[x, y] = Tr(A_x B_y) (unnormalized) over flattened leading indices."""
    if ops_b is None:
        ops_b = ops_a
    d = ops_a.shape[-1]
    fa = ops_a.reshape(-1, d, d)
    fb = ops_b.reshape(-1, d, d)
    if exact:
        ia = np.rint(fa.real).astype(np.int64)
        ib = np.rint(fb.real).astype(np.int64)
        # Tr(A B) = sum_{jk} A_jk B_kj
        return np.einsum("xjk,ykj->xy", ia, ib)
    return np.einsum("xjk,ykj->xy", fa, fb)


def correlation(s: SyncQuantumStrategy) -> np.ndarray:
    """p[q, q', a, a'] = tau(P_q^a P_{q'}^{a'}) as floats."""
    nq, na, d = s.ops.shape[0], s.ops.shape[1], s.dim
    g = gram(s.ops).real.reshape(nq, na, nq, na) / d
    return g.transpose(0, 2, 1, 3)


def eval_sync_strategy(g: SynchronousGame, s: SyncQuantumStrategy, tol: Tolerance = DEFAULT_TOL):
    """Winning probability sum pi(q,q') sum_{V=1} tau(P_q^a P_{q'}^{a'}).

    Exact (``Fraction``) when the distribution is rational and every operator
    entry is a real integer; float otherwise.
    """
    nq, na = g.num_questions, g.num_answers
    if s.ops.shape[:2] != (nq, na):
        raise ValidationError(
            f"strategy is for {s.ops.shape[:2]} questions/answers, game has {(nq, na)}"
        )
    bad = s.validate(tol)
    if bad:
        raise ValidationError(f"strategy families are not PVMs for questions {bad}")
    d = s.dim
    if is_exact(g.distribution) and integral_ops(s.ops):
        tr = gram(s.ops, exact=True).reshape(nq, na, nq, na).transpose(0, 2, 1, 3)
        won = np.where(g.predicate, tr, 0).sum(axis=(2, 3))
        total = Fraction(0)
        for q in range(nq):
            for q2 in range(nq):
                if won[q, q2]:
                    total += g.distribution[q, q2] * int(won[q, q2])
        return total / d
    p = correlation(s)
    won = np.where(g.predicate, p, 0.0).sum(axis=(2, 3))
    return float(np.sum(g.distribution.astype(float) * won))


def diagonal_loss(g: SynchronousGame, s: SyncQuantumStrategy) -> float:
    """sum_q pi(q,q) sum_{a != a'} tau(P_q^a P_q^{a'})."""
    p = correlation(s)
    na = g.num_answers
    off = ~np.eye(na, dtype=bool)
    pi = g.distribution.astype(float)
    return float(sum(pi[q, q] * p[q, q][off].sum() for q in range(g.num_questions)))


def _as_coefficient(c, exact: bool):
    if not exact:
        return float(c)
    if isinstance(c, (int, Fraction)):
        return Fraction(c)
    return Fraction(str(c))


def c_diagonal_weighting(g: SynchronousGame, c) -> SynchronousGame:
    """pi'(x,y) = (C/2)(row_x + col_x) delta_xy + (1-C) pi(x,y), for 0 <= C < 1/2."""
    require_valid(g)
    if not (0 <= c < Fraction(1, 2)):
        raise ValidationError(f"weighting constant must lie in [0, 1/2), got {c}")
    pi = g.distribution
    exact = is_exact(pi)
    c = _as_coefficient(c, exact)
    rows = pi.sum(axis=1)
    cols = pi.sum(axis=0)
    new = (1 - c) * pi
    for x in range(g.num_questions):
        new[x, x] = new[x, x] + c / 2 * (rows[x] + cols[x])
    if not exact:
        new = new.astype(float)
    return SynchronousGame(g.questions, g.answers, new, g.predicate.copy())


def diagonal_dominance(pi: np.ndarray):
    """Largest C with pi(q,q) >= C max(row_q, col_q) for every q."""
    pi = np.asarray(pi)
    n = pi.shape[0]
    rows = pi.sum(axis=1)
    cols = pi.sum(axis=0)
    ratios = []
    for q in range(n):
        if pi[q, q] == 0:
            return Fraction(0) if is_exact(pi) else 0.0
        ratios.append(pi[q, q] / max(rows[q], cols[q]))
    best = min(ratios)
    return best if is_exact(pi) else float(best)


def agreement_game(num_questions: int = 2, num_answers: int = 2) -> SynchronousGame:
    """V(q,q';a,a') = [a = a'], uniform questions."""
    nq, na = num_questions, num_answers
    v = np.broadcast_to(np.eye(na, dtype=bool), (nq, nq, na, na)).copy()
    return SynchronousGame(list(range(nq)), list(range(na)), uniform_distribution(nq), v)


def coloring_game(adjacency, num_colors: int) -> SynchronousGame:
    """Graph coloring game: equal answers on equal questions, distinct on edges."""
    adj = np.asarray(adjacency, dtype=bool)
    nq, na = adj.shape[0], num_colors
    eye = np.eye(na, dtype=bool)
    v = np.ones((nq, nq, na, na), dtype=bool)
    for q in range(nq):
        v[q, q] = eye
        for q2 in range(nq):
            if q != q2 and adj[q, q2]:
                v[q, q2] = ~eye
    return SynchronousGame(list(range(nq)), list(range(na)), uniform_distribution(nq), v)


def random_synchronous_game(
    num_questions: int, num_answers: int, rng: np.random.Generator, lose_prob: float = 0.3
) -> SynchronousGame:
    nq, na = num_questions, num_answers
    v = rng.random((nq, nq, na, na)) >= lose_prob
    eye = np.eye(na, dtype=bool)
    for q in range(nq):
        v[q, q] = eye
    return SynchronousGame(list(range(nq)), list(range(na)), uniform_distribution(nq), v)


def conjugate(s: SyncQuantumStrategy, u: np.ndarray) -> SyncQuantumStrategy:
    return SyncQuantumStrategy(u @ s.ops @ dagger(u))
