"""Matrix primitives for the finite-dimensional tracial algebra M_d(C).

The trace is always the normalized one, tau(x) = Tr(x)/d, so tau(1) = 1 and
the 2-norm is ||x||_2 = sqrt(tau(x* x)).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

DEFAULT_ETA = 1e-9
MAX_DIM = 256


class ValidationError(ValueError):
    """An input violates a mathematical invariant (not a file-format problem)."""


class NonHermitianError(ValidationError):
    pass


@dataclass(frozen=True)
class Tolerance:
    eta: float = DEFAULT_ETA

    def __post_init__(self):
        if not (self.eta >= 0):
            raise ValueError(f"tolerance must be nonnegative, got {self.eta}")


DEFAULT_TOL = Tolerance()


def as_tolerance(tol) -> Tolerance:
    """Accept a Tolerance or a bare eta."""
    return tol if isinstance(tol, Tolerance) else Tolerance(float(tol))


def as_matrix(x, max_dim: int = MAX_DIM) -> np.ndarray:
    """Coerce ``x`` to a square, finite complex matrix."""
    m = np.asarray(x, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] > max_dim:
        raise ValidationError(f"dimension {m.shape[0]} exceeds cap {max_dim}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix has non-finite entries")
    return m


def dagger(x: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(x, -1, -2))


def normalized_trace(x) -> complex:
    x = np.asarray(x)
    return complex(np.trace(x) / x.shape[0])


def trace_norm2(x) -> float:
    x = np.asarray(x)
    # tau(x* x) = sum |x_ij|^2 / d
    return float(np.sqrt(np.sum(np.abs(x) ** 2) / x.shape[0]))


def _hermitian_part(x, tol: Tolerance) -> np.ndarray:
    x = as_matrix(x)
    skew = trace_norm2(x - dagger(x))
    if skew > 100 * tol.eta:
        raise NonHermitianError(f"matrix is not hermitian: ||x - x*||_2 = {skew:.3e}")
    return (x + dagger(x)) / 2


def hermitian_eig(x, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a hermitian matrix."""
    h = _hermitian_part(x, tol)
    return np.linalg.eigh(h)


def spectral_apply(x, fn, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Apply a real function to the spectrum of a hermitian matrix."""
    w, v = hermitian_eig(x, tol)
    return (v * fn(w)) @ dagger(v)


def positive_part(x, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    return spectral_apply(x, lambda w: np.maximum(w, 0.0), tol)


def negative_part(x, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    return spectral_apply(x, lambda w: np.maximum(-w, 0.0), tol)


def inv_sqrt(rho, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """rho^{-1/2} for a hermitian rho >= 1."""
    w, v = hermitian_eig(rho, tol)
    if w[0] < 1 - 100 * tol.eta:
        raise ValidationError(f"inv_sqrt needs rho >= 1, smallest eigenvalue is {w[0]:.6g}")
    return (v * (1.0 / np.sqrt(np.maximum(w, 1.0)))) @ dagger(v)


def is_projection(p, tol: Tolerance = DEFAULT_TOL) -> bool:
    tol = as_tolerance(tol)
    p = np.asarray(p, dtype=complex)
    return trace_norm2(p - dagger(p)) <= tol.eta and trace_norm2(p @ p - p) <= tol.eta


def _check_family(family: Sequence) -> list[np.ndarray]:
    mats = [as_matrix(m) for m in family]
    if not mats:
        raise ValidationError("empty operator family")
    dims = {m.shape[0] for m in mats}
    if len(dims) != 1:
        raise ValidationError(f"dimension mismatch in family: {sorted(dims)}")
    return mats


def is_pvm(family: Sequence, tol: Tolerance = DEFAULT_TOL) -> bool:
    tol = as_tolerance(tol)
    mats = _check_family(family)
    d = mats[0].shape[0]
    if not all(is_projection(m, tol) for m in mats):
        return False
    return trace_norm2(sum(mats) - np.eye(d)) <= tol.eta


def is_povm(family: Sequence, tol: Tolerance = DEFAULT_TOL) -> bool:
    tol = as_tolerance(tol)
    mats = _check_family(family)
    d = mats[0].shape[0]
    for m in mats:
        if trace_norm2(m - dagger(m)) > tol.eta:
            return False
        if np.linalg.eigvalsh((m + dagger(m)) / 2)[0] < -tol.eta:
            return False
    return trace_norm2(sum(mats) - np.eye(d)) <= tol.eta


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (z + dagger(z)) / 2


def expi(h, theta: float) -> np.ndarray:
    """exp(i theta h) for hermitian h."""
    w, v = np.linalg.eigh((h + dagger(h)) / 2)
    return (v * np.exp(1j * theta * w)) @ dagger(v)
