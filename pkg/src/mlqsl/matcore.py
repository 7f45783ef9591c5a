"""Dense complex matrix primitives used throughout the toolkit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonHermitian, NotPSD

HERMITIAN_TOL = 1e-10
# Eigenvalues in [-PSD_TOL, 0) are clamped to zero.
PSD_TOL = 1e-10
# An eigenvalue of a density matrix counts as nonzero iff it is >= RANK_TOL.
RANK_TOL = 1e-10
# Eigenvalues of a unit-trace PSD matrix below this are roundoff; their square
# roots (~1e-8) would otherwise swamp the null space.
SQRT_NOISE_FLOOR = 1e-14
# Eigenvalues closer than this are grouped into one eigenspace.
DEGENERACY_TOL = 1e-8


@dataclass(frozen=True)
class HermitianEig:
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # columns

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def hermiticity_error(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def symmetrize(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``(A + A^dagger)/2`` after checking that ``A`` is Hermitian within ``tol``."""
    m = as_matrix(a)
    err = hermiticity_error(m)
    if err > tol:
        raise NonHermitian(f"matrix deviates from its adjoint by {err:.3e} > {tol:g}")
    return 0.5 * (m + m.conj().T)


def hermitian_eig(a, tol: float = HERMITIAN_TOL) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix.

    Args:
        a: Square complex matrix, Hermitian up to ``tol`` (max entry deviation).
        tol: Symmetry tolerance.

    Returns:
        Ascending real eigenvalues and the matching orthonormal eigenvectors.

    Raises:
        NonHermitian: if ``a`` and its adjoint differ by more than ``tol``.
    """
    m = symmetrize(a, tol)
    w, v = np.linalg.eigh(m)
    return HermitianEig(eigenvalues=w, eigenvectors=v)


def psd_sqrt(a, tol: float = PSD_TOL, floor: float = 0.0) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-tol, floor)`` are treated as exact zeros.
    """
    eig = hermitian_eig(a)
    w = eig.eigenvalues
    if w.size and w[0] < -tol:
        raise NotPSD(f"smallest eigenvalue {w[0]:.3e} is below -{tol:g}")
    root = np.sqrt(np.where(w < floor, 0.0, np.clip(w, 0.0, None)))
    v = eig.eigenvectors
    return (v * root) @ v.conj().T


def trace_norm(a) -> float:
    """Sum of the singular values of ``a``, i.e. ``tr sqrt(A^dagger A)``."""
    return float(np.sum(np.linalg.svd(as_matrix(a), compute_uv=False)))


def polar_modulus(a) -> np.ndarray:
    """The positive factor ``|A| = sqrt(A^dagger A)`` computed from an SVD."""
    _, s, vh = np.linalg.svd(as_matrix(a))
    return (vh.conj().T * s) @ vh


def unimodular_proportionality_check(a, tol: float = 1e-8) -> float | None:
    """Test whether ``A = exp(i theta) |A|`` and return ``theta`` if so.

    The candidate phase is ``arg(tr A)``. When the trace is too small to carry
    a reliable phase, the phase of ``<v|A|v>`` for the leading right singular
    vector ``v`` is used instead. The candidate is accepted iff
    ``||A - exp(i theta)|A|||_F <= tol * max(1, ||A||_F)``.

    A zero matrix is trivially proportional to its modulus and yields 0.0.
    """
    m = as_matrix(a)
    norm = float(np.linalg.norm(m))
    scale = max(1.0, norm)
    _, s, vh = np.linalg.svd(m)
    modulus = (vh.conj().T * s) @ vh
    if norm <= tol * scale:
        return 0.0
    tr = np.trace(m)
    if abs(tr) > 1e-3 * float(np.sum(s)):
        theta = float(np.angle(tr))
    else:
        v = vh[0].conj()
        theta = float(np.angle(v.conj() @ m @ v))
    residual = float(np.linalg.norm(m - np.exp(1j * theta) * modulus))
    if residual <= tol * scale:
        return theta
    return None


def projector(vectors) -> np.ndarray:
    """Orthogonal projector onto the span of orthonormal columns."""
    v = np.asarray(vectors, dtype=complex)
    if v.ndim == 1:
        v = v[:, None]
    return v @ v.conj().T


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def group_eigenvalues(values, tol: float = DEGENERACY_TOL) -> list[list[int]]:
    """Partition sorted eigenvalue indices into runs whose consecutive gaps are <= tol."""
    groups: list[list[int]] = []
    for i, w in enumerate(values):
        if groups and abs(w - values[groups[-1][-1]]) <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups
