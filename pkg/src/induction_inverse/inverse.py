"""Velocity reconstruction on the torus.

The magnetic data determine the source ``h = db/dt - eta lap(b)``; the
velocity then solves ``(F.grad) v = -h`` mode by mode,
``v(k) = i h(k) / (2 pi F.g(k))``, wherever ``F.g(k)`` does not vanish.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .arithmetic import ResonanceReport
from .errors import ConfigError, InputError, PreconditionError, UnsolvableModeError
from .fields import (
    BackgroundField,
    SpectralVectorField,
    spectral_norm,
    transport_apply,
    transport_symbol,
)
from .forward import EvolutionSeries, SOLENOIDAL_TOL, phi1, relative_divergence

__all__ = [
    "ResonancePolicyRecord",
    "ReconstructionResult",
    "source_from_series",
    "source_from_snapshot",
    "reconstruct_velocity",
    "sobolev_seminorm",
    "stability_rhs",
]

OBSTRUCTION_TOL = 1e-12


@dataclass
class ResonancePolicyRecord:
    policy: str
    zeroed_modes: list = field(default_factory=list)
    dropped_energy: float = 0.0


@dataclass
class ReconstructionResult:
    v: SpectralVectorField
    resonant_policy_applied: ResonancePolicyRecord
    residual: float
    stability_rhs: Optional[float] = None


def source_from_series(series: EvolutionSeries) -> list:
    """Source at every snapshot time from second-order finite differences in time."""
    n = len(series)
    if n < 3:
        raise InputError(f"need at least 3 snapshots, got {n}")
    t = series.times
    steps = np.diff(t)
    dt = float(np.mean(steps))
    if np.max(np.abs(steps - dt)) > 1e-9 * dt:
        raise InputError("snapshot times must be uniformly spaced")
    lat = series.lattice
    b = np.stack([s.coeffs for s in series.snapshots])

    db = np.empty_like(b)
    db[1:-1] = (b[2:] - b[:-2]) / (2 * dt)
    db[0] = (-3 * b[0] + 4 * b[1] - b[2]) / (2 * dt)
    db[-1] = (3 * b[-1] - 4 * b[-2] + b[-3]) / (2 * dt)

    h = db + series.eta * lat.eigenvalues * b
    return [SpectralVectorField(lat, hj) for hj in h]


def source_from_snapshot(b_t: SpectralVectorField, t: float, eta: float) -> SpectralVectorField:
    """Invert the closed-form solution for zero initial data and constant source."""
    if not t > 0:
        raise InputError(f"snapshot time must be positive, got {t}")
    if not eta > 0:
        raise ConfigError(f"magnetic diffusivity must be positive, got {eta}")
    lat = b_t.lattice
    c = b_t.coeffs / (t * phi1(eta * lat.eigenvalues * t))
    c[(slice(None),) + (0,) * lat.d] = 0.0
    return SpectralVectorField(lat, c)


def _resonance_mask(report: ResonanceReport, lattice, sym: np.ndarray) -> np.ndarray:
    mask = sym == 0.0
    k = lattice.k_grid
    for mode in report.resonant_modes:
        if all(abs(ki) <= t for ki, t in zip(mode, lattice.truncation)):
            mask[lattice.slot(mode)] = True
    # modes beyond the report window fall back on the report's own zero test
    if report.tolerance is not None:
        outside = np.any(np.abs(k) > report.kmax, axis=0)
        mask |= outside & (np.abs(sym) < report.tolerance)
    mask[(0,) * lattice.d] = False
    return mask & lattice.retained


def reconstruct_velocity(
    h: SpectralVectorField,
    F,
    report: ResonanceReport,
    policy: str = "strict",
    tau: Optional[float] = None,
    C: Optional[float] = None,
) -> ReconstructionResult:
    """Solve ``(F.grad) v = -h`` for the mean-zero velocity.

    Resonant modes come from ``report``. Under ``"strict"`` any source
    energy there raises :class:`UnsolvableModeError`; under ``"zero-fill"``
    those modes are set to zero and the discarded source energy is recorded.
    When ``tau`` and ``C`` are given the stability bound is evaluated too.
    """
    if policy not in ("strict", "zero-fill"):
        raise ConfigError(f"unknown resonance policy {policy!r}")
    F = F if isinstance(F, BackgroundField) else BackgroundField(F)
    lat = h.lattice
    hnorm = spectral_norm(h)
    if np.max(np.abs(h.mean)) > 1e-12 * max(1.0, hnorm):
        raise PreconditionError("source must have zero mean")
    if relative_divergence(h) > SOLENOIDAL_TOL:
        raise PreconditionError(
            f"source is not solenoidal: divergence residual {relative_divergence(h):.3e}"
        )

    sym = transport_symbol(F, lat)
    res = _resonance_mask(report, lat, sym)
    energy = np.sum(np.abs(h.coeffs) ** 2, axis=0)
    record = ResonancePolicyRecord(policy=policy)
    if np.any(res):
        slots = np.argwhere(res)
        modes = [tuple(int(lat.k_grid[(i,) + tuple(s)]) for i in range(lat.d)) for s in slots]
        loaded = np.sqrt(energy[res]) > OBSTRUCTION_TOL * hnorm
        if policy == "strict" and np.any(loaded):
            raise UnsolvableModeError(sorted(m for m, bad in zip(modes, loaded) if bad))
        record.zeroed_modes = sorted(modes)
        record.dropped_energy = float(np.sum(energy[res]))

    solvable = ~res & lat.retained
    solvable[(0,) * lat.d] = False
    denom = np.where(solvable, 2 * np.pi * sym, 1.0)
    v = np.where(solvable, 1j * h.coeffs / denom, 0.0)
    vfield = SpectralVectorField(lat, v)

    residual = spectral_norm(transport_apply(F, vfield) + h) / hnorm if hnorm > 0 else 0.0
    bound = None
    if tau is not None and C is not None:
        bound = stability_rhs(h, tau, C)
    return ReconstructionResult(vfield, record, float(residual), bound)


def sobolev_seminorm(f, tau: float) -> float:
    """``sqrt(sum_{k != 0} |k|^{2 tau} |f(k)|^2)`` with Euclidean integer |k|."""
    kn = f.lattice.k_norm
    weight = np.where(kn > 0, kn, 1.0) ** (2.0 * tau)
    weight = np.where(kn > 0, weight, 0.0)
    return float(np.sqrt(np.sum(weight * np.abs(f.coeffs) ** 2)))


def stability_rhs(h, tau: float, C: float) -> float:
    if not C > 0:
        raise ConfigError(f"Diophantine constant must be positive, got {C}")
    return sobolev_seminorm(h, tau) / (2 * np.pi * C)
