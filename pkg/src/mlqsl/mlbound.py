"""The alpha(delta) solver, standard and dual speed-limit bounds, and a
numerical first-passage search used to verify tightness."""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import DegenerateHamiltonian, DomainError
from .states import (
    DensityMatrix,
    Hamiltonian,
    _check_dims,
    expected_energy,
    ground_and_top,
    orbit_fidelity,
)

DOMAIN_SLACK = 1e-14
# Bisection runs until the bracket is narrower than this or its ends are adjacent floats.
BISECTION_WIDTH = 0.0
# Within this distance of delta = 1 alpha is below 1e-12 and reported as 0.
EDGE_TOL = 1e-12
ENERGY_GAP_TOL = 1e-12


@dataclass(frozen=True)
class ObjectiveMinimum:
    delta: float
    z_min: float
    alpha: float
    boundary: bool = False


@dataclass(frozen=True)
class BoundReport:
    """Lower bound on the time to reach fidelity ``delta``.

    ``tau_lower`` is None when the bound is unbounded (the state has no
    population above E0, resp. below E_m, and delta < 1).
    """

    tau_lower: float | None
    E: float
    E0: float
    E_m: float
    delta: float
    variant: str = "standard"

    @property
    def unbounded(self) -> bool:
        return self.tau_lower is None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["unbounded"] = self.unbounded
        return d


def _check_delta(delta: float) -> float:
    delta = float(delta)
    if not 0.0 <= delta <= 1.0:
        raise DomainError(f"fidelity {delta!r} outside [0, 1]")
    return delta


def _angle(delta: float, z: float) -> float:
    # arcsin(sqrt((1-d)/(1-z^2))) written as an atan2 that stays accurate near both ends
    gap = max((math.sqrt(delta) - z) * (math.sqrt(delta) + z), 0.0)
    return math.atan2(math.sqrt(1.0 - delta), math.sqrt(gap))


def objective(delta: float, z: float) -> float:
    """``f(z) = (1 + z) arcsin sqrt((1 - delta)/(1 - z^2))`` on ``z^2 <= delta``."""
    delta = _check_delta(delta)
    z = float(z)
    if z * z > delta + DOMAIN_SLACK:
        raise DomainError(f"z={z!r} outside [-sqrt(delta), sqrt(delta)] for delta={delta!r}")
    if abs(z) >= 1.0:
        if z <= -1.0:
            return 0.0
        raise DomainError("z must satisfy z^2 < 1")
    return (1.0 + z) * _angle(delta, z)


def objective_derivative(delta: float, z: float) -> float:
    """Derivative of the objective on the open interval ``(-sqrt(delta), 0)``."""
    delta = float(delta)
    z = float(z)
    if not 0.0 < delta < 1.0:
        raise DomainError(f"derivative needs 0 < delta < 1, got {delta!r}")
    root = math.sqrt(delta)
    if not -root < z < 0.0:
        raise DomainError(f"z={z!r} outside the open interval (-{root}, 0)")
    # factored so that tiny delta does not underflow
    return _angle(delta, z) + z * math.sqrt(1.0 - delta) / ((1.0 - z) * math.sqrt(root - z) * math.sqrt(root + z))


def _bisect_sign_change(fn, lo: float, hi: float, width: float) -> float:
    # assumes fn(lo) < 0 < fn(hi)
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if fn(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def minimize_objective(delta: float) -> ObjectiveMinimum:
    """Locate the unique minimizer ``z_delta`` of the objective.

    The objective is minimized on ``[-sqrt(delta), 0]`` where its derivative
    runs from minus infinity to ``arcsin sqrt(1 - delta) > 0`` and changes sign
    exactly once; that sign change is bracketed and bisected.

    At ``delta = 0`` the domain is ``{0}`` and ``alpha = pi/2``. At ``delta = 1``
    ``alpha = 0`` and ``z_min = -1`` is reported with ``boundary=True``.
    """
    delta = _check_delta(delta)
    if delta == 0.0:
        return ObjectiveMinimum(delta, 0.0, math.pi / 2)
    if delta >= 1.0 - EDGE_TOL:
        return ObjectiveMinimum(delta, -1.0, 0.0, boundary=True)
    root = math.sqrt(delta)
    lo = -root * (1.0 - 1e-12)
    hi = -min(1e-15, 1e-3 * root)
    deriv = lambda z: objective_derivative(delta, z)  # noqa: E731
    if deriv(lo) >= 0.0:
        # only reachable for delta so small that the bracket endpoint already sits past the root
        z = lo
    else:
        z = _bisect_sign_change(deriv, lo, hi, BISECTION_WIDTH)
    return ObjectiveMinimum(delta, z, objective(delta, z))


def alpha(delta: float) -> float:
    """Numerator of the speed limit, strictly decreasing from pi/2 to 0."""
    return minimize_objective(delta).alpha


def ml_bound(rho: DensityMatrix, H: Hamiltonian, delta: float) -> BoundReport:
    """Lower bound ``alpha(delta) / (E - E0)`` on the time to reach fidelity ``delta``.

    ``E0`` is the smallest populated eigenvalue of ``H``. If ``E == E0`` within
    1e-12 the state is stationary in energy and, for ``delta < 1``, the
    report is unbounded.
    """
    _check_dims(rho, H)
    delta = _check_delta(delta)
    e = expected_energy(rho, H)
    e0, em = ground_and_top(rho, H)
    a = alpha(delta)
    gap = e - e0
    if gap <= ENERGY_GAP_TOL:
        tau = 0.0 if a == 0.0 else None
    else:
        tau = a / gap
    return BoundReport(tau_lower=tau, E=e, E0=e0, E_m=em, delta=delta, variant="standard")


def dual_ml_bound(rho: DensityMatrix, H: Hamiltonian, delta: float) -> BoundReport:
    """Dual bound ``alpha(delta) / (E_m - E)`` via the time-reversed generator ``-H``."""
    rev = ml_bound(rho, H.negated(), delta)
    return BoundReport(
        tau_lower=rev.tau_lower,
        E=-rev.E,
        E0=-rev.E_m,
        E_m=-rev.E0,
        delta=rev.delta,
        variant="dual",
    )


def minimal_time_to_fidelity(
    rho: DensityMatrix,
    H: Hamiltonian,
    delta: float,
    horizon: float,
    *,
    resolution: float = 1e-12,
    touch_tol: float = 1e-12,
) -> float | None:
    """Earliest ``t`` in ``(0, horizon]`` with ``F(rho, rho_t) = delta``.

    ``g(t) = F(rho, rho_t) - delta`` is sampled with step
    ``pi / (50 (E_max - E_min))``. The first sampled sign change is bisected
    to ``resolution``. Sampled local minima are refined as well, which catches
    dips between samples and tangential contacts such as ``delta = 0`` reached
    exactly at a zero of the fidelity.

    Returns None when no crossing occurs before ``horizon`` (in particular for
    ``delta = 1``, where ``g`` starts at zero).

    Raises:
        DegenerateHamiltonian: if ``H`` is proportional to the identity.
    """
    _check_dims(rho, H)
    delta = _check_delta(delta)
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    spread = H.spread
    if spread <= 0.0:
        raise DegenerateHamiltonian("H has a single level; the state does not evolve")
    if delta >= 1.0:
        return None

    def g(t):
        return orbit_fidelity(rho, H, t) - delta

    root_delta = math.sqrt(delta)

    def h(t):
        return math.sqrt(max(orbit_fidelity(rho, H, t), 0.0)) - root_delta

    step = math.pi / (50.0 * spread)
    n = max(int(math.ceil(horizon / step)), 2)
    ts = np.linspace(0.0, horizon, n + 1)
    gs = np.empty_like(ts)
    gs[0] = g(0.0)
    for i in range(1, n + 1):
        gs[i] = g(ts[i])
        if gs[i] <= 0.0 and gs[i - 1] > 0.0:
            return _bisect_first(g, ts[i - 1], ts[i], resolution)
        # sample i-1 as a local minimum of the grid
        if i >= 2 and gs[i - 1] <= gs[i - 2] and gs[i - 1] <= gs[i]:
            t_hit = _refine_dip(g, h, ts[i - 2], ts[i], resolution, touch_tol)
            if t_hit is not None:
                return t_hit
    # the horizon itself can be the lowest sample, with a dip just before it
    if gs[n] <= gs[n - 1]:
        return _refine_dip(g, h, ts[n - 1], ts[n], resolution, touch_tol)
    return None


def _bisect_first(g, lo: float, hi: float, resolution: float) -> float:
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _golden_min(fn, a: float, b: float, resolution: float) -> float:
    # scipy's bounded Brent adds a sqrt(eps)*|t| term to its tolerance; this keeps an absolute one
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > resolution:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = fn(d)
        if not a < c < b or not a < d < b:
            break
    return c if fc <= fd else d


def _refine_dip(g, h, a: float, b: float, resolution: float, touch_tol: float) -> float | None:
    # h has the sign of g but turns a quadratic touch into a kink
    t_min = _golden_min(h, a, b, resolution)
    g_min = g(t_min)
    if g_min < 0.0:
        if g(a) <= 0.0:
            return None
        return _bisect_first(g, a, t_min, resolution)
    if g_min <= touch_tol:
        return t_min
    return None
