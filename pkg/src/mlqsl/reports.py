"""Tabular sweeps of the bound numerators and the randomized validation campaign."""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .mlbound import dual_ml_bound, minimize_objective, ml_bound, objective
from .qubit import qubit_alpha
from .sampling import random_density_matrix, random_hamiltonian
from .states import evolve, fidelity, purified_overlap, purify

SCHEMA_VERSION = 1
FIGURE_DELTAS = (0.9, 0.7, 0.5, 0.3, 0.1)
CURVE_SAMPLES = 2001

ALPHA_HEADER = ("delta", "z_min", "alpha")
CURVE_HEADER = ("delta", "z", "f", "is_min")
QUBIT_HEADER = ("delta", "purity", "z_min", "alpha")


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def to_csv(header, rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def alpha_sweep(n: int) -> list[tuple]:
    if n < 2:
        raise ValueError("alpha sweep needs at least 2 grid points")
    rows = []
    for k in range(n):
        delta = k / (n - 1)
        m = minimize_objective(delta)
        rows.append((delta, m.z_min, m.alpha))
    return rows


def objective_curves(deltas=FIGURE_DELTAS, samples: int = CURVE_SAMPLES) -> list[tuple]:
    rows = []
    for delta in deltas:
        if not 0.0 < delta < 1.0:
            raise DomainError(f"curve fidelity {delta!r} must lie strictly between 0 and 1")
        r = math.sqrt(delta)
        for z in np.linspace(-r, r, samples):
            z = float(min(max(z, -r), r))
            rows.append((delta, z, objective(delta, z), False))
        m = minimize_objective(delta)
        rows.append((delta, m.z_min, m.alpha, True))
    return rows


def qubit_alpha_sweep(purities, n: int) -> list[tuple]:
    if n < 2:
        raise ValueError("qubit sweep needs at least 2 grid points")
    rows = []
    for p in purities:
        lo = 2.0 * (1.0 - p)
        for k in range(n):
            delta = lo + (1.0 - lo) * k / (n - 1)
            m = qubit_alpha(delta, p)
            rows.append((m.delta, m.purity, m.z_min, m.alpha_p))
    return rows


def _sample(seed: int, index: int, dim_min: int, dim_max: int) -> dict:
    rng = np.random.default_rng([seed, index])
    dim = int(rng.integers(dim_min, dim_max + 1))
    rank = int(rng.integers(1, dim + 1))
    rho = random_density_matrix(dim, rng, rank=rank)
    H = random_hamiltonian(dim, rng)
    t = float(rng.uniform(0.0, 4.0 * math.pi / H.spread))
    delta = fidelity(rho, evolve(rho, H, t))
    std = ml_bound(rho, H, delta)
    dual = dual_ml_bound(rho, H, delta)
    overlap = purified_overlap(purify(rho), H, t)
    margins = {
        "standard": None if std.unbounded else t - std.tau_lower,
        "dual": None if dual.unbounded else t - dual.tau_lower,
        "purification": delta - overlap,
    }
    return {"index": index, "dim": dim, "rank": rank, "t": t, "delta": delta, "margins": margins}


def run_validation(count: int, dim_min: int = 2, dim_max: int = 6, seed: int = 0, tol: float = 1e-9) -> dict:
    """Check the standard bound, the dual bound and purified overlap <= fidelity
    on ``count`` random (state, Hamiltonian, time) samples.

    Every sample draws from its own generator seeded by ``(seed, index)``, so
    the report does not depend on evaluation order.
    """
    if not 2 <= dim_min <= dim_max <= 8:
        raise ValueError("dimensions must satisfy 2 <= dim_min <= dim_max <= 8")
    results = sorted((_sample(seed, i, dim_min, dim_max) for i in range(count)), key=lambda s: s["index"])
    worst: dict[str, float | None] = {"standard": None, "dual": None, "purification": None}
    violations = []
    for s in results:
        for check, margin in s["margins"].items():
            if margin is None:
                continue
            if worst[check] is None or margin < worst[check]:
                worst[check] = margin
            if margin < -tol:
                violations.append({"index": s["index"], "check": check, "margin": margin})
    return {
        "schema": SCHEMA_VERSION,
        "command": "validate",
        "config": {"count": count, "dim_min": dim_min, "dim_max": dim_max, "seed": seed, "tol": tol},
        "samples": len(results),
        "violations": violations,
        "worst_margins": worst,
    }
