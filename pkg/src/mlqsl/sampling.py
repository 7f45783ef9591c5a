"""Seedable random states, unitaries and Hamiltonians."""

from __future__ import annotations

import numpy as np

from .states import DensityMatrix, Hamiltonian


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a complex Ginibre matrix."""
    g = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_pure_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Random state with Dirichlet(1) spectrum and Haar-random eigenvectors."""
    rank = dim if rank is None else rank
    p = np.zeros(dim)
    p[:rank] = rng.dirichlet(np.ones(rank))
    u = random_unitary(dim, rng)
    return DensityMatrix((u * p) @ u.conj().T)


def random_hamiltonian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> Hamiltonian:
    """GUE-distributed Hamiltonian."""
    g = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) * (scale / 2)
    return Hamiltonian(g + g.conj().T)


def random_degenerate_hamiltonian(
    multiplicities, rng: np.random.Generator, energy_range=(-2.0, 2.0), min_gap: float = 0.1
) -> Hamiltonian:
    """Hamiltonian with random well-separated level energies, prescribed multiplicities
    and a Haar-random eigenbasis."""
    k = len(multiplicities)
    while True:
        e = np.sort(rng.uniform(*energy_range, size=k))
        if k == 1 or np.min(np.diff(e)) >= min_gap:
            break
    u = random_unitary(int(sum(multiplicities)), rng)
    return Hamiltonian.from_levels(e, multiplicities, basis=u)
