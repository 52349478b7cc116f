"""Dense complex linear algebra used by every other module.

Vectors are 1-d complex numpy arrays, matrices 2-d arrays with
eigenvectors stored column-wise.  Everything here is a pure function;
matrices involved are small (dimension <= ~16), so plain LAPACK dense
routines are used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularMatrixError

HERMITICITY_RTOL = 1e-12
SINGULARITY_FLOOR = 1e-12


def as_vector(entries) -> np.ndarray:
    v = np.asarray(entries, dtype=complex)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"expected a vector, got shape {v.shape}")
    if not np.isfinite(v).all():
        raise ValueError("vector entries must be finite")
    return v


def as_matrix(entries) -> np.ndarray:
    m = np.asarray(entries, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix entries must be finite")
    return m


def hermitian(entries) -> np.ndarray:
    """Validate that a square matrix is Hermitian and return it.

    The defect max|H - H^dagger| must not exceed HERMITICITY_RTOL times
    the largest entry magnitude.
    """
    m = as_matrix(entries)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"Hermitian matrix must be square, got shape {m.shape}")
    scale = float(np.abs(m).max())
    defect = float(np.abs(m - m.conj().T).max())
    if defect > HERMITICITY_RTOL * scale:
        raise ValueError(
            f"matrix is not Hermitian: defect {defect:.3e} exceeds "
            f"{HERMITICITY_RTOL:.0e} * scale {scale:.3e}"
        )
    return m


def inner(u, v) -> complex:
    """Scalar product, conjugate-linear in the first argument."""
    u = as_vector(u)
    v = as_vector(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    return complex(np.vdot(u, v))


@dataclass(frozen=True)
class EigenDecomposition:
    """Full Hermitian eigendecomposition with a deterministic gauge.

    eigenvalues are real and nondecreasing; eigenvectors[:, i] is the unit
    eigenvector of eigenvalues[i], rotated so that its largest-magnitude
    entry is real positive (ties broken by the lowest index).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def pin_column_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive."""
    pinned = np.array(vectors, dtype=complex)
    for j in range(pinned.shape[1]):
        col = pinned[:, j]
        i = int(np.argmax(np.abs(col)))
        mag = abs(col[i])
        if mag > 0.0:
            pinned[:, j] = col * (col[i].conjugate() / mag)
    return pinned


def hermitian_eigen(H) -> EigenDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix."""
    H = hermitian(H)
    try:
        vals, vecs = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"eigensolver did not converge: {exc}") from exc
    return EigenDecomposition(vals, pin_column_phases(vecs))


def unitarize(M) -> np.ndarray:
    """Nearest unitary matrix: the polar factor U in M = U P with P positive."""
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"unitarize needs a square matrix, got shape {M.shape}")
    w, s, vh = np.linalg.svd(M)
    if s[-1] <= SINGULARITY_FLOOR:
        raise SingularMatrixError(
            f"matrix is numerically singular: smallest singular value {s[-1]:.3e}"
        )
    return w @ vh


def expi_hermitian(H, t: float) -> np.ndarray:
    """exp(-i H t) for Hermitian H, built from the eigendecomposition."""
    eig = hermitian_eigen(H)
    phases = np.exp(-1j * eig.eigenvalues * float(t))
    return (eig.eigenvectors * phases) @ eig.eigenvectors.conj().T
