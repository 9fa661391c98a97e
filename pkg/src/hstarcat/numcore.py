"""Dense complex linear algebra primitives and the tolerance policy.

Every other module routes its numerics through the handful of operations
here so that there is a single audited eigendecomposition path and a
single tolerance convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NotHermitian(ValueError):
    pass


class NegativeEigenvalue(ValueError):
    pass


class NotProjection(ValueError):
    pass


class NonSquare(ValueError):
    pass


@dataclass(frozen=True)
class Tolerance:
    """Uniform numerical tolerance: absolute and relative epsilon."""

    abs_eps: float = 1e-9
    rel_eps: float = 1e-9

    def __post_init__(self):
        if self.abs_eps < 0 or self.rel_eps < 0:
            raise ValueError("tolerances must be nonnegative")

    def bound(self, scale: float = 1.0) -> float:
        return self.abs_eps + self.rel_eps * abs(scale)


DEFAULT_TOL = Tolerance()


def as_cmatrix(entries) -> np.ndarray:
    """Coerce input to a 2d complex ndarray (the working CMatrix form)."""
    m = np.asarray(entries, dtype=complex)
    if m.ndim != 2:
        raise ValueError("CMatrix must be 2-dimensional")
    return m


def cmatrix_to_json(m: np.ndarray) -> list:
    """Nested [re, im] pairs, row major."""
    m = as_cmatrix(m)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def cmatrix_from_json(data) -> np.ndarray:
    rows = []
    for row in data:
        rows.append([complex(re, im) for re, im in row])
    return np.array(rows, dtype=complex) if rows else np.zeros((0, 0), dtype=complex)


def _sorted_eigh(m: np.ndarray):
    """Hermitian eigendecomposition, eigenvalues descending, deterministic
    column phases: first nonzero coordinate of each eigenvector is positive
    real."""
    vals, vecs = np.linalg.eigh(m)
    order = np.argsort(-vals)
    vals = vals[order]
    vecs = vecs[:, order]
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size:
            phase = col[nz[0]] / abs(col[nz[0]])
            vecs[:, j] = col / phase
    return vals, vecs


def _require_square(m: np.ndarray):
    if m.shape[0] != m.shape[1]:
        raise NonSquare(f"expected square matrix, got shape {m.shape}")


def hermitian_sqrt(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix.

    Eigenvalues below -tol.abs_eps raise; small negative eigenvalues are
    clamped to zero.
    """
    m = as_cmatrix(m)
    _require_square(m)
    scale = max(1.0, float(np.linalg.norm(m)))
    if np.linalg.norm(m - m.conj().T) > tol.bound(scale):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    h = (m + m.conj().T) / 2
    vals, vecs = _sorted_eigh(h)
    if vals.size and vals.min() < -tol.bound(scale):
        raise NegativeEigenvalue(f"eigenvalue {vals.min()} below tolerance")
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def split_projection(p: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Split an orthogonal projection P as V V-dagger with V-dagger V = I.

    Columns of V: eigenvectors of P with eigenvalue 1, descending order,
    phase-normalized. Rank is the count of eigenvalues above 1/2.
    """
    p = as_cmatrix(p)
    _require_square(p)
    scale = max(1.0, float(np.linalg.norm(p)))
    if np.linalg.norm(p - p.conj().T) > tol.bound(scale) or np.linalg.norm(
        p @ p - p
    ) > tol.bound(scale):
        raise NotProjection("input is not an orthogonal projection within tolerance")
    h = (p + p.conj().T) / 2
    vals, vecs = _sorted_eigh(h)
    rank = int(np.sum(vals > 0.5))
    return vecs[:, :rank]


def unitarity_defect(m: np.ndarray) -> float:
    """max(||M*M - I||_F, ||M M* - I||_F); zero iff M is unitary."""
    m = as_cmatrix(m)
    _require_square(m)
    eye = np.eye(m.shape[0])
    return float(
        max(
            np.linalg.norm(m.conj().T @ m - eye),
            np.linalg.norm(m @ m.conj().T - eye),
        )
    )
