"""Moving synchronous strategies between G and its independent set game (X(G), |Q|).

Question labels [t] are identified with Q in sorted (index) order.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .algebra import DEFAULT_TOL, Tolerance, ValidationError, trace_norm2
from .games import SynchronousGame, SyncQuantumStrategy, eval_sync_strategy, gram, require_valid
from .graph import build_game_graph
from .indepset import IndependentSetGame, IndepStrategy, make_indep_set_game, sync_loss_indep
from .stability import round_projection_family

DEFAULT_KAPPA = 10.0


class LiftError(ValidationError):
    """The summed operators do not form PVMs; use the approximate lift instead."""


def reduce_game(g: SynchronousGame) -> IndependentSetGame:
    """G -> diagonally weighted (X(G), |Q|)."""
    return make_indep_set_game(build_game_graph(g), g.num_questions, "diagonal", source=g)


def forward_lift(g: SynchronousGame, s: SyncQuantumStrategy, tol: Tolerance = DEFAULT_TOL) -> IndepStrategy:
    """On index i answer vertex (q_i, a) with P_{q_i}^a, all other vertices get 0."""
    nq, na = g.num_questions, g.num_answers
    if s.ops.shape[:2] != (nq, na):
        raise ValidationError(f"strategy shape {s.ops.shape[:2]} does not match game {(nq, na)}")
    bad = s.validate(tol)
    if bad:
        raise ValidationError(f"strategy families are not PVMs for questions {bad}")
    d = s.dim
    ops = np.zeros((nq, nq * na, d, d), dtype=complex)
    for i in range(nq):
        ops[i, i * na:(i + 1) * na] = s.ops[i]
    vertices = [(q, a) for q in range(nq) for a in range(na)]
    return IndepStrategy(ops, vertices)


def _per_question(s: IndepStrategy, g: SynchronousGame) -> np.ndarray:
    """ops[q, i, a] = P_i^(q,a)."""
    nq, na = g.num_questions, g.num_answers
    vertices = [(q, a) for q in range(nq) for a in range(na)]
    if s.vertices != vertices or s.t != nq:
        raise ValidationError("strategy is not for the independent set game (X(G), |Q|)")
    d = s.dim
    return s.ops.reshape(nq, nq, na, d, d).transpose(1, 0, 2, 3, 4)


def backward_lift_perfect(s: IndepStrategy, g: SynchronousGame, tol: Tolerance = DEFAULT_TOL) -> SyncQuantumStrategy:
    """P_q^a = sum_i P_i^(q,a); valid only when the input is (near) perfect."""
    require_valid(g)
    bad = s.validate(tol)
    if bad:
        raise ValidationError(f"strategy families are not PVMs for indices {bad}")
    per_q = _per_question(s, g)
    out = SyncQuantumStrategy(per_q.sum(axis=1))
    failed = out.validate(tol)
    if failed:
        raise LiftError(f"summed operators are not PVMs for questions {failed}")
    return out


@dataclass
class LiftReport:
    delta: float
    per_question_residuals: list[float]
    mean_residual: float
    sum_sq_residuals: float
    orthogonality_mass: float
    rounding_distances: list[float]
    mean_rounding_distance: float
    value_on_G: float
    kappa: float
    bound_rhs: float
    t: int

    @property
    def jensen_bound(self) -> float:
        return float(np.sqrt(2 * self.t * max(self.delta, 0.0)))

    def as_dict(self) -> dict:
        out = asdict(self)
        out["jensen_bound"] = self.jensen_bound
        return out

    def violations(self, slack: float = 1e-9) -> list[str]:
        """Relations proven for every input strategy."""
        t, dl = self.t, self.delta
        out = []
        if self.orthogonality_mass > 2 * dl + slack:
            out.append(f"orthogonality mass {self.orthogonality_mass:.3e} > 2 delta = {2 * dl:.3e}")
        if self.sum_sq_residuals > 2 * t * t * dl + 1e-6:
            out.append(f"sum of squared residuals {self.sum_sq_residuals:.3e} > 2 t^2 delta")
        if self.mean_residual > self.jensen_bound + slack:
            out.append(f"mean residual {self.mean_residual:.3e} > sqrt(2 t delta) = {self.jensen_bound:.3e}")
        return out


def orthogonality_mass(per_q: np.ndarray) -> float:
    """(1/t^2) sum_q sum_{(i,a) != (i',a')} tau(P_i^(q,a) P_i'^(q,a'))."""
    nq, t, d = per_q.shape[0], per_q.shape[1], per_q.shape[3]
    total = 0.0
    for q in range(nq):
        g = gram(per_q[q]).real / d
        total += g.sum() - np.trace(g)
    return float(total / t**2)


def backward_lift_approx(
    s: IndepStrategy, g: SynchronousGame, tol: Tolerance = DEFAULT_TOL, kappa: float = DEFAULT_KAPPA
):
    """Round {P_i^(q,a)}_(i,a) per question, then sum over i.

    Returns ``(strategy, LiftReport)``.
    """
    require_valid(g)
    game = reduce_game(g)
    delta, _ = sync_loss_indep(game, s, tol)
    delta = float(delta)
    per_q = _per_question(s, g)
    nq, t, na, d = per_q.shape[:4]
    one = np.eye(d)

    residuals = [trace_norm2(per_q[q].sum(axis=(0, 1)) - one) for q in range(nq)]
    rounded = np.empty_like(per_q)
    distances = []
    for q in range(nq):
        family = list(per_q[q].reshape(t * na, d, d))
        out, report = round_projection_family(family, tol)
        rounded[q] = np.asarray(out).reshape(t, na, d, d)
        distances.append(report.total_dist_sq)

    strategy = SyncQuantumStrategy(rounded.sum(axis=1))
    value = float(eval_sync_strategy(g, strategy, Tolerance(max(tol.eta, 1e-8))))
    report = LiftReport(
        delta=delta,
        per_question_residuals=residuals,
        mean_residual=float(np.mean(residuals)),
        sum_sq_residuals=float(np.sum(np.square(residuals))),
        orthogonality_mass=orthogonality_mass(per_q),
        rounding_distances=distances,
        mean_rounding_distance=float(np.mean(distances)),
        value_on_G=value,
        kappa=kappa,
        bound_rhs=float(1 - kappa * np.sqrt(t * max(delta, 0.0))),
        t=t,
    )
    return strategy, report
