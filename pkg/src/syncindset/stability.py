"""Rounding near-PVM operator families to exact PVMs.

The pipeline for a positive family {a_j} with a_j <= 1:

    x   = 1 - sum_j a_j,   a_0 = x_+
    b_1 = a_0 + a_1,       b_j = a_j (j >= 2)
    rho = sum_j b_j >= 1,  c_j = rho^{-1/2} b_j rho^{-1/2}   (a POVM)
    q   = povm_to_pvm(c)

Every intermediate distance is recorded in a ``RoundingReport``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    Tolerance,
    ValidationError,
    as_matrix,
    dagger,
    hermitian_eig,
    is_projection,
    is_pvm,
    normalized_trace,
    trace_norm2,
)

log = logging.getLogger(__name__)

SLACK = 1e-9
SEESAW_MAX_SWEEPS = 50
SEESAW_MIN_GAIN = 1e-12


class StabilityError(RuntimeError):
    """A relation that holds exactly in the algebra failed numerically."""


@dataclass
class RoundingReport:
    eps_meas: float
    delta_meas: float
    norm_a0: float
    norm_rho_minus_1: float
    dist_a_to_b_sq: float
    dist_b_to_c_sq: float
    povm_purity: float
    dist_c_to_p_sq: float
    total_dist_sq: float
    # only set by round_subordinate: distance of the block-wise pipeline output
    unconstrained_dist_sq: float | None = None

    def as_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    @property
    def purity_defect(self) -> float:
        """1 - sum_j tau(c_j^2), the quantity the POVM rounding contract is stated in."""
        return 1.0 - self.povm_purity

    @property
    def final_bound(self) -> float:
        """Squared form of 3 sqrt(2 delta + 10 eps)."""
        return 18 * self.delta_meas + 90 * self.eps_meas

    def proof_violations(self, slack: float = SLACK) -> list[str]:
        """Inequalities that hold for every admissible input; empty if all pass."""
        e, dl = self.eps_meas, self.delta_meas
        out = []
        if self.norm_a0 > e + slack:
            out.append(f"||a0||_2 = {self.norm_a0:.3e} > eps = {e:.3e}")
        if self.norm_rho_minus_1 > e + slack:
            out.append(f"||rho-1||_2 = {self.norm_rho_minus_1:.3e} > eps = {e:.3e}")
        if self.dist_b_to_c_sq > 4 * e + slack:
            out.append(f"sum ||b-c||^2 = {self.dist_b_to_c_sq:.3e} > 4 eps = {4 * e:.3e}")
        if self.povm_purity < 1 - dl - 4 * e - slack:
            out.append(f"sum tau(c^2) = {self.povm_purity:.6f} < 1 - delta - 4 eps = {1 - dl - 4 * e:.6f}")
        chain = (
            np.sqrt(self.dist_a_to_b_sq) + np.sqrt(self.dist_b_to_c_sq) + np.sqrt(self.dist_c_to_p_sq)
        ) ** 2
        if self.total_dist_sq > chain + slack:
            out.append(f"triangle inequality failed: {self.total_dist_sq:.3e} > {chain:.3e}")
        return out


def _sq_dist(xs, ys) -> float:
    return float(sum(trace_norm2(x - y) ** 2 for x, y in zip(xs, ys)))


# Block frames: a list of isometries W_k (d x r_k) whose ranges decompose C^d.
# ``None`` means the whole algebra M_d(C).

def _spectral(x: np.ndarray, fn, frames, tol: Tolerance) -> np.ndarray:
    if frames is None:
        w, v = hermitian_eig(x, tol)
        return (v * fn(w)) @ dagger(v)
    out = np.zeros_like(x)
    for wk in frames:
        w, v = hermitian_eig(dagger(wk) @ x @ wk, tol)
        u = wk @ v
        out += (u * fn(w)) @ dagger(u)
    return out


def _prepare_positive_family(a: Sequence, tol: Tolerance) -> list[np.ndarray]:
    mats = [as_matrix(m) for m in a]
    if not mats:
        raise ValidationError("empty operator family")
    d = mats[0].shape[0]
    if any(m.shape[0] != d for m in mats):
        raise ValidationError("dimension mismatch in operator family")
    out = []
    for j, m in enumerate(mats):
        skew = trace_norm2(m - dagger(m))
        if skew > 100 * tol.eta:
            raise ValidationError(f"operator {j} is not hermitian (||x - x*||_2 = {skew:.3e})")
        h = (m + dagger(m)) / 2
        w, v = np.linalg.eigh(h)
        if w[0] < -100 * tol.eta:
            raise ValidationError(f"operator {j} is not positive (eigenvalue {w[0]:.3e})")
        if w[-1] > 1 + 100 * tol.eta:
            raise ValidationError(f"operator {j} exceeds the identity (eigenvalue {w[-1]:.6g})")
        if w[0] < 0 or w[-1] > 1:
            h = (v * np.clip(w, 0.0, 1.0)) @ dagger(v)
        out.append(h)
    return out


def _check_povm(c: Sequence[np.ndarray], tol: Tolerance) -> None:
    d = c[0].shape[0]
    for j, m in enumerate(c):
        if trace_norm2(m - dagger(m)) > 100 * tol.eta:
            raise ValidationError(f"POVM element {j} is not hermitian")
        if np.linalg.eigvalsh((m + dagger(m)) / 2)[0] < -100 * tol.eta:
            raise ValidationError(f"POVM element {j} is not positive")
    resid = trace_norm2(sum(c) - np.eye(d))
    if resid > 100 * tol.eta:
        raise ValidationError(f"POVM does not sum to the identity (||sum - 1||_2 = {resid:.3e})")


def _assignment_projections(basis: np.ndarray, assign: np.ndarray, m: int) -> list[np.ndarray]:
    d = basis.shape[0]
    p = []
    for j in range(m):
        cols = basis[:, assign == j]
        p.append(cols @ dagger(cols) if cols.shape[1] else np.zeros((d, d), dtype=complex))
    return p


def _overlaps(c: Sequence[np.ndarray], basis: np.ndarray) -> np.ndarray:
    """O[j, k] = <v_k, c_j v_k>."""
    return np.einsum("xk,jxy,yk->jk", basis.conj(), np.asarray(c), basis).real


def _round_povm_block(c: list[np.ndarray]) -> list[np.ndarray]:
    """Round one POVM on the whole space C^r."""
    m = len(c)
    r = c[0].shape[0]
    if m == 1:
        return [np.eye(r, dtype=complex)]
    weights = np.arange(1, m + 1) / m
    h = sum(wt * cj for wt, cj in zip(weights, c))
    _, basis = np.linalg.eigh((h + dagger(h)) / 2)
    assign = np.argmax(_overlaps(c, basis), axis=0)  # first maximum = lowest j

    # see-saw: exact two-block exchanges. For blocks j, k the best split of
    # range(p_j + p_k) is the positive eigenspace of the compression of c_j - c_k.
    def score(basis, assign):
        ov = _overlaps(c, basis)
        return float(ov[assign, np.arange(r)].sum())

    current = score(basis, assign)
    for _ in range(SEESAW_MAX_SWEEPS):
        before = current
        for j, k in itertools.combinations(range(m), 2):
            sel = (assign == j) | (assign == k)
            if not sel.any():
                continue
            w = basis[:, sel]
            diff = dagger(w) @ (c[j] - c[k]) @ w
            vals, vecs = np.linalg.eigh((diff + dagger(diff)) / 2)
            new_val = float(np.real(np.trace(dagger(w) @ c[k] @ w))) + float(vals[vals > 0].sum())
            ov = _overlaps([c[j], c[k]], w)
            old_val = float(ov[np.where(assign[sel] == j, 0, 1), np.arange(w.shape[1])].sum())
            if new_val <= old_val + SEESAW_MIN_GAIN:
                continue
            basis[:, sel] = w @ vecs
            assign[np.flatnonzero(sel)] = np.where(vals > 0, j, k)
        current = score(basis, assign)
        if current - before <= SEESAW_MIN_GAIN:
            break
    return _assignment_projections(basis, assign, m)


def _round_povm(c: list[np.ndarray], frames) -> list[np.ndarray]:
    if frames is None:
        return _round_povm_block(c)
    d = c[0].shape[0]
    out = [np.zeros((d, d), dtype=complex) for _ in c]
    for wk in frames:
        local = [dagger(wk) @ cj @ wk for cj in c]
        for j, pj in enumerate(_round_povm_block(local)):
            out[j] += wk @ pj @ dagger(wk)
    return out


def povm_to_pvm(c: Sequence, tol: Tolerance = DEFAULT_TOL) -> list[np.ndarray]:
    """Round a POVM to a nearby PVM.

    Weighted-sum diagonalization (weights j/m) with argmax assignment, then a
    see-saw of pairwise block exchanges until the gain drops below 1e-12 or
    50 sweeps. Exact on commuting inputs; deterministic.
    """
    mats = [as_matrix(x) for x in c]
    if not mats or any(x.shape != mats[0].shape for x in mats):
        raise ValidationError("POVM elements must be a nonempty list of equal-size matrices")
    _check_povm(mats, tol)
    mats = [(x + dagger(x)) / 2 for x in mats]
    return _round_povm(mats, None)


def purity_defect(c: Sequence[np.ndarray]) -> float:
    return 1.0 - float(sum(normalized_trace(x @ x).real for x in c))


def _pipeline(a: list[np.ndarray], tol: Tolerance, frames=None):
    d = a[0].shape[0]
    one = np.eye(d, dtype=complex)
    x = one - sum(a)
    eps = trace_norm2(x)
    delta = abs(1.0 - sum(normalized_trace(aj @ aj).real for aj in a))
    a0 = _spectral(x, lambda w: np.maximum(w, 0.0), frames, tol)
    b = [a0 + a[0]] + list(a[1:])
    rho = sum(b)
    low = np.linalg.eigvalsh((rho + dagger(rho)) / 2)[0]
    if low < 1 - 100 * tol.eta:
        raise StabilityError(f"rho is not >= 1 (smallest eigenvalue {low:.6g})")
    r = _spectral(rho, lambda w: 1.0 / np.sqrt(np.maximum(w, 1.0)), frames, tol)
    c = [r @ bj @ r for bj in b]
    c = [(cj + dagger(cj)) / 2 for cj in c]
    p = _round_povm(c, frames)
    report = RoundingReport(
        eps_meas=eps,
        delta_meas=delta,
        norm_a0=trace_norm2(a0),
        norm_rho_minus_1=trace_norm2(rho - one),
        dist_a_to_b_sq=trace_norm2(a0) ** 2,
        dist_b_to_c_sq=_sq_dist(b, c),
        povm_purity=float(sum(normalized_trace(cj @ cj).real for cj in c)),
        dist_c_to_p_sq=_sq_dist(c, p),
        total_dist_sq=_sq_dist(a, p),
    )
    return p, report


def round_positive_family(a: Sequence, tol: Tolerance = DEFAULT_TOL):
    """Round positive operators 0 <= a_j <= 1 with sum ~ 1 to a PVM q_j.

    Returns ``(q, report)``.
    """
    mats = _prepare_positive_family(a, tol)
    q, report = _pipeline(mats, tol)
    return q, report


def round_projection_family(p: Sequence, tol: Tolerance = DEFAULT_TOL):
    mats = [as_matrix(x) for x in p]
    for j, m in enumerate(mats):
        if not is_projection(m, tol):
            raise ValidationError(f"operator {j} is not a projection")
    q, report = round_positive_family(mats, tol)
    # for projections |1 - tau(sum p^2)| = |tau(1 - sum p)| <= ||1 - sum p||_2
    if report.delta_meas > report.eps_meas + SLACK:
        raise StabilityError(
            f"delta = {report.delta_meas:.3e} exceeds eps = {report.eps_meas:.3e} for a projection family"
        )
    return q, report


def _frame(p: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((p + dagger(p)) / 2)
    return v[:, w > 0.5]


def round_subordinate(a: Sequence, p: Sequence, partition: Sequence[Sequence[int]], tol: Tolerance = DEFAULT_TOL):
    """Round {a_j} to a PVM {q_j} with q_j <= p_k whenever j is in partition[k].

    Indices are 0-based. The pipeline runs block-wise in the compressed
    algebra sum_k p_k M p_k; its output r is then corrected by
    q_j = r_j p_k + [j = min(partition[k])] sum_l r_l (1 - p_lam(l)) p_k.
    """
    mats = _prepare_positive_family(a, tol)
    proj = [as_matrix(x) for x in p]
    m, n = len(mats), len(proj)
    if any(x.shape != mats[0].shape for x in proj):
        raise ValidationError("dimension mismatch between family and PVM")
    if not is_pvm(proj, tol):
        raise ValidationError("the reference family is not a PVM")
    parts = [sorted(int(j) for j in part) for part in partition]
    if len(parts) != n:
        raise ValidationError(f"partition has {len(parts)} parts, PVM has {n} elements")
    flat = sorted(itertools.chain.from_iterable(parts))
    if flat != list(range(m)) or any(not part for part in parts):
        raise ValidationError("partition must split 0..m-1 into nonempty disjoint parts")
    lam = {j: k for k, part in enumerate(parts) for j in part}
    for j, aj in enumerate(mats):
        pk = proj[lam[j]]
        leak = trace_norm2(aj - pk @ aj @ pk)
        if leak > 100 * tol.eta:
            raise ValidationError(f"a_{j} is not supported under its PVM element (leak {leak:.3e})")
        w = np.linalg.eigvalsh((pk - aj + dagger(pk - aj)) / 2)
        if w[0] < -100 * tol.eta:
            raise ValidationError(f"a_{j} is not below its PVM element (eigenvalue {w[0]:.3e})")

    d = mats[0].shape[0]
    one = np.eye(d)
    if n == 1:
        frames = None
    else:
        frames = [f for f in (_frame(pk) for pk in proj) if f.shape[1]]
    r, report = _pipeline(mats, tol, frames)

    kappa = [min(part) for part in parts]
    spill = [r[l] @ (one - proj[lam[l]]) for l in range(m)]
    q = []
    for j in range(m):
        k = lam[j]
        qj = r[j] @ proj[k]
        if j == kappa[k]:
            qj = qj + sum(s @ proj[k] for s in spill)
        q.append((qj + dagger(qj)) / 2)
    report.unconstrained_dist_sq = report.total_dist_sq
    report.total_dist_sq = _sq_dist(mats, q)
    return q, report
