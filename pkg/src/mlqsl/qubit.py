"""Two-level systems: Bloch vectors, Huebner's fidelity formula and the
purity-resolved speed limit with its saturating states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DegenerateHamiltonian, InfeasibleFidelity, NotQubit, OutsideBall, PurityMismatch
from .mlbound import ENERGY_GAP_TOL, BoundReport, _check_delta
from .states import DensityMatrix, Hamiltonian, expected_energy, ground_and_top

GRID_POINTS = 100_001
FEASIBILITY_SLACK = 1e-12
EPS = np.finfo(float).eps


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float
    purity: float
    omega: float = 1.0

    def __post_init__(self):
        if abs(self.x**2 + self.y**2 + self.z**2 - (2 * self.purity - 1)) > 1e-10:
            raise PurityMismatch("Bloch vector length does not match 2*purity - 1")

    @classmethod
    def from_components(cls, x, y, z, omega=1.0) -> BlochVector:
        return cls(float(x), float(y), float(z), 0.5 * (1.0 + x * x + y * y + z * z), float(omega))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.vector))

    @property
    def azimuth(self) -> float:
        """Angle of the projection onto the xy-plane."""
        return math.atan2(self.y, self.x)


def _qubit_levels(H: Hamiltonian):
    if H.dim != 2:
        raise NotQubit(f"expected a two-level system, got dimension {H.dim}")
    if len(H.levels) != 2:
        raise DegenerateHamiltonian("qubit Hamiltonian has a single degenerate level")
    lo, hi = H.levels
    return lo.basis[:, 0], hi.basis[:, 0], hi.energy - lo.energy


def bloch_from_state(rho: DensityMatrix, H: Hamiltonian) -> BlochVector:
    """Bloch vector of ``rho`` in the energy eigenbasis ``|E0>, |E1>`` of ``H``."""
    if rho.dim != 2:
        raise NotQubit(f"expected a qubit state, got dimension {rho.dim}")
    e0, e1, omega = _qubit_levels(H)
    m = rho.matrix
    c = np.vdot(e1, m @ e0)  # <E1|rho|E0>
    x = 2.0 * c.real
    y = -2.0 * c.imag
    z = float(np.real(np.vdot(e1, m @ e1) - np.vdot(e0, m @ e0)))
    return BlochVector(float(x), float(y), z, rho.purity, omega)


def state_from_bloch(b: BlochVector, H: Hamiltonian) -> DensityMatrix:
    if b.length > 1.0 + 1e-12:
        raise OutsideBall(f"Bloch vector length {b.length} exceeds 1")
    e0, e1, _ = _qubit_levels(H)
    c = 0.5 * (b.x - 1j * b.y)  # <E1|rho|E0>
    m = (
        0.5 * (1 - b.z) * np.outer(e0, e0.conj())
        + 0.5 * (1 + b.z) * np.outer(e1, e1.conj())
        + c * np.outer(e1, e0.conj())
        + np.conj(c) * np.outer(e0, e1.conj())
    )
    return DensityMatrix(m)


def hubner_fidelity(b1: BlochVector, b2: BlochVector) -> float:
    """Fidelity of two qubit states of equal purity from their Bloch vectors."""
    if abs(b1.purity - b2.purity) > 1e-10:
        raise PurityMismatch(f"purities differ: {b1.purity} vs {b2.purity}")
    f = 0.5 * (3.0 + float(b1.vector @ b2.vector) - 2.0 * b1.purity)
    return min(max(f, 0.0), 1.0)


def precession_angle(b: BlochVector, b_t: BlochVector) -> float:
    """Angle in [0, pi] between the xy-projections of two Bloch vectors on one orbit."""
    denom = 2.0 * b.purity - 1.0 - b.z**2
    if denom <= 0:
        return 0.0
    c = (float(b.vector @ b_t.vector) - b.z**2) / denom
    return math.acos(min(1.0, max(-1.0, c)))


@dataclass(frozen=True)
class QubitObjectiveMinimum:
    delta: float
    purity: float
    z_min: float
    alpha_p: float


def _radius_sq(delta: float, purity: float) -> float:
    # delta - 2(1 - purity): 1 - purity is exact near purity 1, so small delta survives
    d = delta - 2.0 * (1.0 - purity)
    # a few ulps off the feasibility edge is the single-point domain {0}
    if abs(d) <= 4.0 * EPS * max(delta, 2.0 * (1.0 - purity)):
        return 0.0
    return d


def qubit_objective(delta: float, purity: float, z):
    """``(1 + z) arcsin sqrt((1 - delta)/(2 purity - 1 - z^2))``, vectorized over ``z``."""
    r = math.sqrt(max(_radius_sq(delta, purity), 0.0))
    z = np.asarray(z, dtype=float)
    gap = np.clip((r - z) * (r + z), 0.0, None)
    return (1.0 + z) * np.arctan2(math.sqrt(1.0 - delta), np.sqrt(gap))


def _qubit_derivative(delta, purity, z):
    r = math.sqrt(_radius_sq(delta, purity))
    gap = (r - z) * (r + z)
    s = math.sqrt(1.0 - delta)
    return math.atan2(s, math.sqrt(gap)) + (1 + z) * z * s / ((1.0 - z * z - 2.0 * (1.0 - purity)) * math.sqrt(gap))


def qubit_alpha(delta: float, purity: float) -> QubitObjectiveMinimum:
    """Global minimum of the purity-resolved objective over ``z^2 <= delta + 2 purity - 2``.

    A dense grid locates the basin, bounded Brent refines it, and when the
    derivative changes sign across the refined bracket the root is bisected.

    Raises:
        InfeasibleFidelity: if ``delta < 2 (1 - purity)``; no unitary orbit of
            a qubit with that purity gets that far from its starting point.
    """
    delta = _check_delta(delta)
    if not 0.5 - 1e-12 <= purity <= 1.0 + 1e-12:
        raise ValueError(f"qubit purity {purity!r} outside [1/2, 1]")
    purity = min(max(float(purity), 0.5), 1.0)
    d = _radius_sq(delta, purity)
    if d < -FEASIBILITY_SLACK:
        raise InfeasibleFidelity(
            f"fidelity {delta} is unreachable at purity {purity}: the minimum is 2(1 - purity) = {2 * (1 - purity):.12g}"
        )
    if d <= 0.0:
        return QubitObjectiveMinimum(delta, purity, 0.0, float(qubit_objective(delta, purity, 0.0)))
    r = math.sqrt(d)
    zs = np.linspace(-r, r, GRID_POINTS)
    fs = qubit_objective(delta, purity, zs)
    i = int(np.argmin(fs))
    z_best, f_best = float(zs[i]), float(fs[i])
    a, b = float(zs[max(i - 1, 0)]), float(zs[min(i + 1, len(zs) - 1)])
    res = minimize_scalar(
        lambda z: float(qubit_objective(delta, purity, z)),
        bounds=(a, b),
        method="bounded",
        options={"xatol": 1e-12},
    )
    if res.fun <= f_best:
        z_best, f_best = float(res.x), float(res.fun)
    if delta < 1.0:
        # the derivative diverges to -inf at -r and +inf at +r
        da = -math.inf if a <= -r else _qubit_derivative(delta, purity, a)
        db = math.inf if b >= r else _qubit_derivative(delta, purity, b)
        if da < 0.0 < db:
            lo, hi = a, b
            while True:
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break
                if _qubit_derivative(delta, purity, mid) < 0.0:
                    lo = mid
                else:
                    hi = mid
            fz = float(qubit_objective(delta, purity, mid))
            if fz <= f_best:
                z_best, f_best = mid, fz
    return QubitObjectiveMinimum(delta, purity, z_best, f_best)


def qubit_ml_bound(rho: DensityMatrix, H: Hamiltonian, delta: float) -> BoundReport:
    """Purity-resolved bound ``alpha(delta, purity) / (E - E0)`` for a qubit."""
    if rho.dim != 2:
        raise NotQubit(f"expected a qubit state, got dimension {rho.dim}")
    _qubit_levels(H)
    m = qubit_alpha(delta, rho.purity)
    e = expected_energy(rho, H)
    e0, em = ground_and_top(rho, H)
    gap = e - e0
    if gap <= ENERGY_GAP_TOL:
        tau = 0.0 if m.alpha_p == 0.0 else None
    else:
        tau = m.alpha_p / gap
    return BoundReport(tau_lower=tau, E=e, E0=e0, E_m=em, delta=m.delta, variant="qubit")


def construct_saturating_qubit(delta: float, purity: float, H: Hamiltonian) -> DensityMatrix:
    """Qubit of the given purity whose Bloch vector is ``(sqrt(2p - 1 - z^2), 0, z)``
    with ``z`` the minimizer of the purity-resolved objective."""
    _qubit_levels(H)
    m = qubit_alpha(delta, purity)
    z = m.z_min
    x = math.sqrt(max(2.0 * m.purity - 1.0 - z * z, 0.0))
    return state_from_bloch(BlochVector.from_components(x, 0.0, z), H)
