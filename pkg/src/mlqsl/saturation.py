"""Construction and verification of states that attain the speed limit."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import matcore
from .errors import (
    DimMismatch,
    LevelOrderError,
    NonOrthogonalPairing,
    RankBoundViolation,
)
from .mlbound import alpha, minimize_objective
from .states import (
    DensityMatrix,
    Hamiltonian,
    _check_dims,
    expected_energy,
    orbit_fidelity,
    populated_levels,
)

DEFAULT_TOL = 1e-8
PAIRING_TOL = 1e-10

RANK_BOUND_MESSAGE = (
    "requested rank {r} exceeds min(dim E0, dim E1) = {m}: each eigenvector of a "
    "saturating state needs its own ground and excited directions, orthogonal to "
    "those of every other eigenvector, so the rank is capped by the smaller "
    "multiplicity and no full-rank (faithful) state can saturate the bound"
)


@dataclass
class SaturatingSpec:
    """Data fixing one member of the family of saturating states.

    ``pairing[j] = (v0, v1)`` holds the ground- and excited-level directions
    of the j-th eigenvector. Validation happens in :meth:`validate`, which the
    constructors call.
    """

    H: Hamiltonian
    level0: int
    level1: int
    delta: float
    weights: np.ndarray
    pairing: list[tuple[np.ndarray, np.ndarray]]

    @classmethod
    def from_levels(cls, H, level0, level1, delta, weights=None, rank=None, rng=None):
        """Pair up the first ``rank`` basis vectors of the two eigenspaces.

        With ``rng`` each eigenspace basis is first rotated by a random
        unitary, so the pairing vectors are generic elements of the eigenspaces.
        """
        if weights is None:
            weights = np.full(rank or 1, 1.0 / (rank or 1))
        weights = np.asarray(weights, dtype=float)
        r = len(weights)
        b0 = H.levels[level0].basis
        b1 = H.levels[level1].basis
        if rng is not None:
            from .sampling import random_unitary

            b0 = b0 @ random_unitary(b0.shape[1], rng)
            b1 = b1 @ random_unitary(b1.shape[1], rng)
        m = min(b0.shape[1], b1.shape[1])
        if r > m:
            raise RankBoundViolation(RANK_BOUND_MESSAGE.format(r=r, m=m))
        pairing = [(b0[:, j].copy(), b1[:, j].copy()) for j in range(r)]
        return cls(H, level0, level1, float(delta), weights, pairing)

    @property
    def rank(self) -> int:
        return len(self.weights)

    @property
    def E0(self) -> float:
        return self.H.levels[self.level0].energy

    @property
    def E1(self) -> float:
        return self.H.levels[self.level1].energy

    def validate(self) -> None:
        H = self.H
        n = len(H.levels)
        if not (0 <= self.level0 < n and 0 <= self.level1 < n):
            raise LevelOrderError(f"level indices must lie in [0, {n})")
        if self.E1 <= self.E0:
            raise LevelOrderError(f"E1 = {self.E1} must exceed E0 = {self.E0}")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta {self.delta!r} outside [0, 1]")
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or len(w) == 0 or np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-10:
            raise ValueError("weights must be positive and sum to 1")
        if len(self.pairing) != len(w):
            raise ValueError(f"{len(w)} weights but {len(self.pairing)} pairs")
        m = min(H.levels[self.level0].multiplicity, H.levels[self.level1].multiplicity)
        if len(w) > m:
            raise RankBoundViolation(RANK_BOUND_MESSAGE.format(r=len(w), m=m))
        p0 = H.levels[self.level0].projector
        p1 = H.levels[self.level1].projector
        vecs = []
        for j, (v0, v1) in enumerate(self.pairing):
            v0 = np.asarray(v0, dtype=complex)
            v1 = np.asarray(v1, dtype=complex)
            if v0.shape != (H.dim,) or v1.shape != (H.dim,):
                raise DimMismatch(f"pair {j} vectors must have length {H.dim}")
            for v, p, name in ((v0, p0, "E0"), (v1, p1, "E1")):
                if np.linalg.norm(p @ v - v) > PAIRING_TOL:
                    raise NonOrthogonalPairing(f"pair {j}: vector is not in the {name} eigenspace")
            vecs += [v0, v1]
        gram = np.array(vecs).conj() @ np.array(vecs).T
        err = float(np.max(np.abs(gram - np.eye(len(vecs)))))
        if err > PAIRING_TOL:
            raise NonOrthogonalPairing(f"pairing vectors are not orthonormal (max deviation {err:.3e})")

    def tau_star(self) -> float:
        """Saturation time ``alpha(delta) / (E - E0)`` for these levels."""
        z = z_for_delta(self.delta)
        e = 0.5 * (1 - z) * self.E0 + 0.5 * (1 + z) * self.E1
        return alpha(self.delta) / (e - self.E0)


def z_for_delta(delta: float) -> float:
    return minimize_objective(delta).z_min


def construct_saturating_state(spec: SaturatingSpec) -> DensityMatrix:
    """Mixture of ``sqrt((1-z)/2)|E0^j> + sqrt((1+z)/2)|E1^j>`` with weights ``p_j``."""
    spec.validate()
    z = z_for_delta(spec.delta)
    a = math.sqrt(0.5 * (1.0 - z))
    b = math.sqrt(0.5 * (1.0 + z))
    vectors = [a * np.asarray(v0) + b * np.asarray(v1) for v0, v1 in spec.pairing]
    return DensityMatrix.from_mixture(spec.weights, vectors)


def dual_spec(spec: SaturatingSpec) -> SaturatingSpec:
    """Relabel ``spec`` for the reversed generator ``-H``.

    Under ``-H`` the upper level becomes the ground level, so the roles of the
    two eigenspaces are swapped.
    """
    Hr = spec.H.negated()
    k0 = Hr.level_index(-spec.E1)
    k1 = Hr.level_index(-spec.E0)
    # -H has its own eigenvectors; the original pairing vectors still lie in the matching eigenspaces
    pairing = [(v1, v0) for v0, v1 in spec.pairing]
    return SaturatingSpec(Hr, k0, k1, spec.delta, spec.weights, pairing)


def construct_dual_saturating_state(spec: SaturatingSpec) -> DensityMatrix:
    """State attaining the dual bound; ``level1`` plays the role of the top level ``E_m``.

    Each eigenvector is ``sqrt((1+z)/2)|E0^j> + sqrt((1-z)/2)|E_m^j>``.
    """
    spec.validate()
    return construct_saturating_state(dual_spec(spec))


@dataclass
class ConditionResult:
    passed: bool
    residual: float
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"pass": bool(self.passed), "residual": float(self.residual), **self.detail}


@dataclass
class SaturationReport:
    condition_i: ConditionResult
    condition_ii: ConditionResult
    condition_iii: ConditionResult
    compression_phase: float | None
    compression_vanishes: bool
    compression_residual: float
    sufficiency_residual: float
    q0: complex
    q1: complex
    q0_expected: complex | None
    q1_expected: complex | None
    q_residual: float
    fidelity_at_tau: float
    fidelity_residual: float
    time_residual: float
    E: float
    E0: float | None
    E1: float | None
    z_delta: float
    alpha: float
    tau: float
    tau_star: float | None
    delta: float
    tol: float
    saturates: bool

    def to_dict(self) -> dict:
        def num(x):
            return float(x) if x is not None and math.isfinite(x) else None

        def cplx(c):
            return None if c is None else {"re": float(np.real(c)), "im": float(np.imag(c))}

        return {
            "saturates": bool(self.saturates),
            "tau": self.tau,
            "tau_star": num(self.tau_star),
            "delta": self.delta,
            "tol": self.tol,
            "z_delta": self.z_delta,
            "alpha": self.alpha,
            "E": self.E,
            "E0": self.E0,
            "E1": self.E1,
            "condition_i": self.condition_i.to_dict(),
            "condition_ii": self.condition_ii.to_dict(),
            "condition_iii": self.condition_iii.to_dict(),
            "compression": {
                "phase": self.compression_phase,
                "vanishes": self.compression_vanishes,
                "residual": num(self.compression_residual),
                "sufficiency_residual": num(self.sufficiency_residual),
                "q0": cplx(self.q0),
                "q1": cplx(self.q1),
                "q0_expected": cplx(self.q0_expected),
                "q1_expected": cplx(self.q1_expected),
                "q_residual": self.q_residual,
            },
            "fidelity_at_tau": self.fidelity_at_tau,
            "fidelity_residual": self.fidelity_residual,
            "time_residual": num(self.time_residual),
        }


def _resolved_eigenbasis(rho: DensityMatrix, p0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvectors of the support, with degenerate blocks rotated to diagonalize ``P0``."""
    r = rho.rank
    w = rho.eigenvalues[:r]
    v = rho.eigenvectors[:, :r].copy()
    for group in matcore.group_eigenvalues(w):
        if len(group) < 2:
            continue
        block = v[:, group]
        _, rot = np.linalg.eigh(block.conj().T @ p0 @ block)
        v[:, group] = block @ rot
    return w, v


def check_saturation(
    rho: DensityMatrix,
    H: Hamiltonian,
    tau: float,
    delta: float,
    tol: float = DEFAULT_TOL,
) -> SaturationReport:
    """Measure how far ``(rho, H)`` is from attaining the bound at ``(tau, delta)``.

    Evaluates the three structural conditions (support in two eigenspaces;
    fixed amplitude split of every eigenvector; mutually orthogonal
    two-dimensional evolution subspaces), the compression identities of
    ``U_tau`` onto the support, and whether the fidelity and elapsed time
    actually meet the bound at ``tau``.
    """
    _check_dims(rho, H)
    if not tau > 0:
        raise ValueError("tau must be positive")
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta {delta!r} outside [0, 1]")
    dim = H.dim
    eye = np.eye(dim)
    m = minimize_objective(delta)
    z, a_delta = m.z_min, m.alpha
    e = expected_energy(rho, H)

    # (i) support inside two eigenspaces
    pop = populated_levels(rho, H)
    zero = np.zeros((dim, dim), dtype=complex)
    p0 = H.levels[pop[0]].projector if pop else zero
    p1 = H.levels[pop[1]].projector if len(pop) > 1 else zero
    e0 = H.levels[pop[0]].energy if pop else None
    e1 = H.levels[pop[1]].energy if len(pop) > 1 else None
    leak = float(np.linalg.norm((eye - p0 - p1) @ rho.matrix))
    cond_i = ConditionResult(
        passed=len(pop) <= 2 and leak <= tol,
        residual=leak,
        detail={"populated_levels": pop},
    )

    # (ii) every eigenvector splits (1-z)/2 : (1+z)/2 between E0 and E1
    w, v = _resolved_eigenbasis(rho, p0)
    want0, want1 = 0.5 * (1 - z), 0.5 * (1 + z)
    per_vec = []
    for j in range(v.shape[1]):
        psi = v[:, j]
        n0 = float(np.real(np.vdot(psi, p0 @ psi)))
        n1 = float(np.real(np.vdot(psi, p1 @ psi)))
        per_vec.append(max(abs(n0 - want0), abs(n1 - want1)))
    res_ii = max(per_vec, default=0.0)
    cond_ii = ConditionResult(passed=res_ii <= tol, residual=res_ii, detail={"per_eigenvector": per_vec})

    # (iii) the energy components of different eigenvectors are orthogonal
    def unit(x):
        n = np.linalg.norm(x)
        return x / n if n > matcore.RANK_TOL else np.zeros_like(x)

    c0 = [unit(p0 @ v[:, j]) for j in range(v.shape[1])]
    c1 = [unit(p1 @ v[:, j]) for j in range(v.shape[1])]
    overlap = 0.0
    for j in range(len(c0)):
        for k in range(len(c0)):
            if j == k:
                continue
            overlap = max(
                overlap,
                abs(np.vdot(c0[j], c0[k])),
                abs(np.vdot(c1[j], c1[k])),
                abs(np.vdot(c0[j], c1[k])),
            )
    cond_iii = ConditionResult(passed=overlap <= tol, residual=float(overlap))

    # compression of U_tau onto the support
    u = H.unitary(tau)
    s = rho.sqrt
    a_op = s @ u @ s
    tn = matcore.trace_norm(a_op)
    support = matcore.projector(v)
    vanishes = tn <= tol
    theta = None if vanishes else matcore.unimodular_proportionality_check(a_op, tol)
    coeff = 0.0 if vanishes else (math.sqrt(delta) * np.exp(1j * theta) if theta is not None else None)
    pup = support @ u @ support
    if coeff is None:
        comp_res = math.inf
    else:
        comp_res = float(np.linalg.norm(pup - coeff * support))

    kappa = 0.5 * ((1 - z) * np.exp(-1j * tau * e0) + (1 + z) * np.exp(-1j * tau * e1)) if e1 is not None else None
    suff_res = math.inf if kappa is None else float(np.linalg.norm(a_op - kappa * rho.matrix))

    r = max(v.shape[1], 1)
    pp0p = support @ p0 @ support
    pp1p = support @ p1 @ support
    q0 = complex(np.trace(pp0p) / r)
    q1 = complex(np.trace(pp1p) / r)
    q_res = max(float(np.linalg.norm(pp0p - q0 * support)), float(np.linalg.norm(pp1p - q1 * support)))
    q0_exp = q1_exp = None
    if coeff is not None and e1 is not None:
        f0, f1 = np.exp(-1j * tau * e0), np.exp(-1j * tau * e1)
        if abs(f0 - f1) > 1e-12:
            q0_exp = complex((coeff - f1) / (f0 - f1))
            q1_exp = complex((coeff - f0) / (f1 - f0))
            q_res = max(q_res, abs(q0 - q0_exp), abs(q1 - q1_exp))

    fid = orbit_fidelity(rho, H, tau)
    fid_res = abs(fid - delta)
    time_res = abs(tau * (e - e0) - a_delta) if e0 is not None else math.inf
    tau_star = a_delta / (e - e0) if e0 is not None and e - e0 > 0 else None

    saturates = (
        cond_i.passed and cond_ii.passed and cond_iii.passed and fid_res <= tol and time_res <= tol
    )
    return SaturationReport(
        condition_i=cond_i,
        condition_ii=cond_ii,
        condition_iii=cond_iii,
        compression_phase=theta,
        compression_vanishes=bool(vanishes),
        compression_residual=comp_res,
        sufficiency_residual=suff_res,
        q0=q0,
        q1=q1,
        q0_expected=q0_exp,
        q1_expected=q1_exp,
        q_residual=float(q_res),
        fidelity_at_tau=fid,
        fidelity_residual=fid_res,
        time_residual=time_res,
        E=e,
        E0=e0,
        E1=e1,
        z_delta=z,
        alpha=a_delta,
        tau=float(tau),
        tau_star=tau_star,
        delta=float(delta),
        tol=tol,
        saturates=bool(saturates),
    )
