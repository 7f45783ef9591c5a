"""Density matrices, Hamiltonians, unitary evolution, fidelity and purification."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import matcore
from .errors import DimMismatch, NotDensityMatrix

TRACE_TOL = 1e-10


class DensityMatrix:
    """A Hermitian, positive semidefinite, unit-trace matrix.

    Inputs may drift from Hermiticity by up to 1e-10; they are re-symmetrized
    on construction. The spectral decomposition is computed once and cached.
    """

    def __init__(self, matrix):
        m = matcore.symmetrize(matrix)
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise NotDensityMatrix(f"trace is {tr.real:.12g}, expected 1")
        self._matrix = m
        self._matrix.setflags(write=False)
        w = self.eigenvalues
        if w.size and w[-1] < -matcore.PSD_TOL:
            raise NotDensityMatrix(f"negative eigenvalue {w[-1]:.3e}")

    @classmethod
    def from_vector(cls, psi) -> DensityMatrix:
        v = np.asarray(psi, dtype=complex).ravel()
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def from_mixture(cls, weights, vectors) -> DensityMatrix:
        """Build ``sum_j p_j |v_j><v_j|`` from weights and (unnormalized) vectors."""
        dim = len(np.asarray(vectors[0]))
        m = np.zeros((dim, dim), dtype=complex)
        for p, v in zip(weights, vectors):
            v = np.asarray(v, dtype=complex)
            m += p * np.outer(v, v.conj())
        return cls(m)

    @classmethod
    def maximally_mixed(cls, dim: int) -> DensityMatrix:
        return cls(np.eye(dim, dtype=complex) / dim)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @cached_property
    def _eig(self) -> matcore.HermitianEig:
        eig = matcore.hermitian_eig(self._matrix)
        # descending; ties keep their ascending-solver order
        order = np.argsort(-eig.eigenvalues, kind="stable")
        return matcore.HermitianEig(eig.eigenvalues[order], eig.eigenvectors[:, order])

    @property
    def eigenvalues(self) -> np.ndarray:
        """Spectrum ``p_j`` in descending order."""
        return self._eig.eigenvalues

    @property
    def eigenvectors(self) -> np.ndarray:
        return self._eig.eigenvectors

    @cached_property
    def purity(self) -> float:
        return float(np.real(np.vdot(self._matrix, self._matrix)))

    @cached_property
    def rank(self) -> int:
        return int(np.count_nonzero(self.eigenvalues >= matcore.RANK_TOL))

    @cached_property
    def sqrt_eigenvalues(self) -> np.ndarray:
        w = self.eigenvalues
        return np.sqrt(np.where(w < matcore.SQRT_NOISE_FLOOR, 0.0, w))

    @cached_property
    def sqrt(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.sqrt_eigenvalues) @ v.conj().T

    @cached_property
    def support_projector(self) -> np.ndarray:
        return matcore.projector(self.eigenvectors[:, : self.rank])

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim}, rank={self.rank}, purity={self.purity:.6g})"


@dataclass(frozen=True)
class Level:
    energy: float
    basis: np.ndarray  # orthonormal columns spanning the eigenspace
    projector: np.ndarray

    @property
    def multiplicity(self) -> int:
        return self.basis.shape[1]


class Hamiltonian:
    """Hermitian generator (hbar = 1) with its eigenspaces grouped into levels.

    Eigenvalues within 1e-8 of their neighbour are merged into a single level,
    whose energy is the mean of the merged eigenvalues.
    """

    def __init__(self, matrix):
        m = matcore.symmetrize(matrix)
        m.setflags(write=False)
        self._matrix = m
        eig = matcore.hermitian_eig(m)
        levels = []
        for group in matcore.group_eigenvalues(eig.eigenvalues):
            basis = eig.eigenvectors[:, group]
            levels.append(
                Level(
                    energy=float(np.mean(eig.eigenvalues[group])),
                    basis=basis,
                    projector=basis @ basis.conj().T,
                )
            )
        self.levels: tuple[Level, ...] = tuple(levels)
        self.eigenvalues = eig.eigenvalues

    @classmethod
    def from_levels(cls, energies, multiplicities=None, basis=None) -> Hamiltonian:
        """Hamiltonian with prescribed level energies and multiplicities.

        ``basis`` is a unitary whose columns become the eigenvectors; the
        computational basis is used when it is omitted.
        """
        if multiplicities is None:
            multiplicities = [1] * len(energies)
        diag = np.repeat(np.asarray(energies, dtype=float), multiplicities)
        if basis is None:
            return cls(np.diag(diag).astype(complex))
        u = np.asarray(basis, dtype=complex)
        return cls((u * diag) @ u.conj().T)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @property
    def energies(self) -> np.ndarray:
        return np.array([lv.energy for lv in self.levels])

    @property
    def spread(self) -> float:
        return self.levels[-1].energy - self.levels[0].energy

    def negated(self) -> Hamiltonian:
        return Hamiltonian(-self._matrix)

    def level_index(self, energy: float, tol: float = matcore.DEGENERACY_TOL) -> int:
        for k, lv in enumerate(self.levels):
            if abs(lv.energy - energy) <= tol:
                return k
        raise KeyError(f"no level at energy {energy!r}")

    def unitary(self, t: float) -> np.ndarray:
        """``exp(-i t H)`` assembled from the eigenprojectors."""
        u = np.zeros_like(self._matrix)
        for lv in self.levels:
            u = u + np.exp(-1j * t * lv.energy) * lv.projector
        return u

    def __repr__(self):
        mult = [lv.multiplicity for lv in self.levels]
        return f"Hamiltonian(dim={self.dim}, energies={self.energies.tolist()}, multiplicities={mult})"


def _check_dims(*objs):
    dims = {o.dim for o in objs}
    if len(dims) != 1:
        raise DimMismatch(f"dimension mismatch: {sorted(dims)}")


def evolve(rho: DensityMatrix, H: Hamiltonian, t: float) -> DensityMatrix:
    """Return ``U_t rho U_t^dagger`` with ``U_t = exp(-itH)``."""
    _check_dims(rho, H)
    if not np.isfinite(t):
        raise ValueError("time must be finite")
    u = H.unitary(t)
    return DensityMatrix(u @ rho.matrix @ u.conj().T)


def fidelity(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """Uhlmann-Jozsa fidelity ``(tr|sqrt(rho1) sqrt(rho2)|)^2``, clamped to [0, 1]."""
    _check_dims(rho1, rho2)
    f = matcore.trace_norm(rho1.sqrt @ rho2.sqrt) ** 2
    return min(max(f, 0.0), 1.0)


def orbit_fidelity(rho: DensityMatrix, H: Hamiltonian, t: float) -> float:
    """Fidelity between ``rho`` and ``rho_t`` via ``tr|sqrt(rho) U_t sqrt(rho)|``.

    Equal to ``fidelity(rho, evolve(rho, H, t))`` by unitary invariance of the
    trace norm, but needs a single square root.
    """
    _check_dims(rho, H)
    s = rho.sqrt
    f = matcore.trace_norm(s @ H.unitary(t) @ s) ** 2
    return min(max(f, 0.0), 1.0)


@dataclass(frozen=True)
class Purification:
    vector: np.ndarray  # length dim**2, index a*dim + j for |a> (x) |j>
    source: DensityMatrix

    @property
    def dim(self) -> int:
        return self.source.dim

    def as_matrix(self) -> np.ndarray:
        """Coefficient matrix ``W`` with ``|w> = sum_{a,j} W[a, j] |a>|j>``."""
        return self.vector.reshape(self.dim, self.dim)

    def reduced(self) -> np.ndarray:
        """Partial trace of ``|w><w|`` over the second factor."""
        return partial_trace_second(self.vector, self.dim)


def partial_trace_second(vector, dim: int) -> np.ndarray:
    w = np.asarray(vector, dtype=complex).reshape(dim, dim)
    return w @ w.conj().T


def purify(rho: DensityMatrix) -> Purification:
    """Canonical purification ``sum_j sqrt(p_j) |psi_j> (x) |e_j>``."""
    w = rho.eigenvectors * rho.sqrt_eigenvalues
    vec = w.reshape(-1)
    vec = vec / np.linalg.norm(vec)
    return Purification(vector=vec, source=rho)


def purified_overlap(w: Purification, H: Hamiltonian, t: float) -> float:
    """``|<w|w_t>|^2`` for ``|w_t> = (U_t (x) 1)|w>``, computed as ``|tr(rho U_t)|^2``."""
    _check_dims(w.source, H)
    return float(abs(np.trace(w.source.matrix @ H.unitary(t))) ** 2)


def expected_energy(rho: DensityMatrix, H: Hamiltonian) -> float:
    _check_dims(rho, H)
    e = np.trace(rho.matrix @ H.matrix)
    if abs(e.imag) > 1e-10 * max(1.0, abs(e.real)):
        raise ValueError(f"expected energy has imaginary part {e.imag:.3e}")
    return float(e.real)


def level_populations(rho: DensityMatrix, H: Hamiltonian) -> np.ndarray:
    _check_dims(rho, H)
    return np.array([np.real(np.vdot(lv.projector, rho.matrix)) for lv in H.levels])


def populated_levels(rho: DensityMatrix, H: Hamiltonian, tol: float = 1e-10) -> list[int]:
    """Indices of the levels of ``H`` whose population ``tr(P_k rho)`` exceeds ``tol``."""
    pops = level_populations(rho, H)
    return [k for k, p in enumerate(pops) if p > tol]


def ground_and_top(rho: DensityMatrix, H: Hamiltonian) -> tuple[float, float]:
    """Smallest and largest populated energies."""
    idx = populated_levels(rho, H)
    if not idx:
        raise ValueError("state populates no level")
    return H.levels[idx[0]].energy, H.levels[idx[-1]].energy
