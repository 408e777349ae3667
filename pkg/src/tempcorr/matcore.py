"""Dense complex matrix algebra for small dimensions (d <= ~32).

Operators are plain numpy arrays (complex128, row-major). This module owns
the hermitian-aware primitives used everywhere else, plus the tolerance
ladder shared across the package:

- TOL_CONSTRUCT: representation-level checks on freshly built operators,
- TOL_DERIVED:   quantities coming out of linear algebra,
- TOL_PHYSICS:   comparisons against the RK4 integrator.
"""

from __future__ import annotations

import numpy as np

from .errors import NonHermitianInput

TOL_CONSTRUCT = 1e-12
TOL_DERIVED = 1e-10
TOL_PHYSICS = 1e-6

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
# Lowering operator |0><1| in the convention ground = |0> (sigma_z = +1).
SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.conj().T.copy()

for _m in (SIGMA_X, SIGMA_Y, SIGMA_Z, SIGMA_MINUS, SIGMA_PLUS):
    _m.setflags(write=False)


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def frozen(m: np.ndarray) -> np.ndarray:
    """Complex, row-major, non-writeable copy of `m`."""
    out = np.array(m, dtype=complex, order="C")
    out.setflags(write=False)
    return out


def hermiticity_defect(m: np.ndarray) -> float:
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(m - m.conj().T)))


def is_hermitian(m: np.ndarray, tol: float = TOL_CONSTRUCT) -> bool:
    return hermiticity_defect(m) <= tol


def require_hermitian(m: np.ndarray, tol: float = TOL_CONSTRUCT, what: str = "matrix") -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonHermitianInput(f"{what} must be a square matrix, got shape {m.shape}")
    defect = hermiticity_defect(m)
    if defect > tol:
        raise NonHermitianInput(f"{what} is not hermitian: max |M - M^dag| = {defect:.3e} > {tol:.0e}")
    return m


def is_unitary(m: np.ndarray, tol: float = TOL_CONSTRUCT) -> bool:
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(dagger(m) @ m - identity(m.shape[0])))) <= tol


def is_positive_semidefinite(m: np.ndarray, tol: float = TOL_DERIVED) -> bool:
    return min_eigenvalue(m) >= -tol


def eig_hermitian(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a hermitian matrix."""
    m = require_hermitian(m)
    w, v = np.linalg.eigh(m)
    return w, v


def min_eigenvalue(m: np.ndarray) -> float:
    """Smallest eigenvalue; the positivity witness for effects, states, and global POVMs."""
    return float(eig_hermitian(m)[0][0])


def expm_antihermitian(h: np.ndarray, t: float, hbar_scale: float = 1.0) -> np.ndarray:
    """exp(-i H t / hbar_scale) for hermitian H, by spectral decomposition.

    Exponentiating the eigenvalues keeps the result unitary to roundoff,
    which matters more here than generality: every generator in the
    package is hermitian and tiny.
    """
    h = require_hermitian(h, what="generator")
    w, v = np.linalg.eigh(h)
    phases = np.exp(-1j * w * (float(t) / float(hbar_scale)))
    return (v * phases) @ dagger(v)


def sqrtm_psd(m: np.ndarray) -> np.ndarray:
    """Spectral square root of a positive semidefinite hermitian matrix.

    Eigenvalues within roundoff below zero are clipped to zero.
    """
    w, v = eig_hermitian(m)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ dagger(v)
