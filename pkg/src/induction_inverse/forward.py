"""Forward solver for ``db/dt - eta lap(b) = curl(F x v)`` on the torus.

Each Fourier mode obeys a scalar linear ODE, so the evolution is done
exactly per mode: the closed-form forced heat solution for a source that is
constant on each step, and pure exponential decay of the initial data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ConfigError, InputError, PreconditionError
from .fields import (
    BackgroundField,
    SpectralVectorField,
    curl_cross,
    divergence,
    spectral_norm,
)
from .lattice import TorusLattice

__all__ = [
    "EvolutionSeries",
    "phi1",
    "duhamel_snapshot",
    "evolve_series",
    "stokes_domain_norm",
    "h1_norm",
    "divergence_residual",
    "relative_divergence",
    "check_solenoidal",
]

SOLENOIDAL_TOL = 1e-10
SERIES_CUTOFF = 1e-8


def phi1(x):
    """``(1 - exp(-x)) / x`` evaluated without cancellation; ``phi1(0) = 1``."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SERIES_CUTOFF
    safe = np.where(small, 1.0, x)
    series = 1.0 - x / 2.0 + x * x / 6.0
    return np.where(small, series, -np.expm1(-safe) / safe)


@dataclass
class EvolutionSeries:
    times: np.ndarray
    snapshots: list
    eta: float

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.ndim != 1 or len(self.times) != len(self.snapshots):
            raise InputError("need exactly one snapshot per time")
        if len(self.times) and self.times[0] < 0:
            raise InputError("times must be nonnegative")
        if np.any(np.diff(self.times) <= 0):
            raise InputError("times must be strictly increasing")
        if len({s.lattice for s in self.snapshots}) > 1:
            raise InputError("snapshots live on different lattices")

    @property
    def lattice(self) -> TorusLattice:
        return self.snapshots[0].lattice

    def __len__(self):
        return len(self.times)


def _check_eta(eta):
    if not (np.isfinite(eta) and eta > 0):
        raise ConfigError(f"magnetic diffusivity must be positive, got {eta}")


def _check_mean_zero(s: SpectralVectorField, what: str):
    if np.max(np.abs(s.mean)) > 1e-12 * max(1.0, spectral_norm(s)):
        raise PreconditionError(f"{what} must have zero mean")


def relative_divergence(s: SpectralVectorField) -> float:
    """``||div s|| / max(1, ||s||_H1)`` with spectral norms."""
    return spectral_norm(divergence(s)) / max(1.0, h1_norm(s))


def check_solenoidal(s: SpectralVectorField, what: str):
    res = relative_divergence(s)
    if res > SOLENOIDAL_TOL:
        raise PreconditionError(
            f"{what} is not solenoidal: divergence residual {res:.3e} > {SOLENOIDAL_TOL:g}"
        )


def duhamel_snapshot(
    lattice: TorusLattice, eta: float, h: SpectralVectorField, t: float
) -> SpectralVectorField:
    """b(t) for zero initial data and a time-constant mean-zero source."""
    _check_eta(eta)
    if t < 0:
        raise InputError(f"time must be nonnegative, got {t}")
    _check_mean_zero(h, "source")
    factor = t * phi1(eta * lattice.eigenvalues * t)
    c = factor * h.coeffs
    c[(slice(None),) + (0,) * lattice.d] = 0.0
    return SpectralVectorField(lattice, c)


def evolve_series(
    lattice: TorusLattice,
    eta: float,
    F,
    v: Union[SpectralVectorField, Sequence[SpectralVectorField]],
    b0: SpectralVectorField = None,
    times: Sequence[float] = (),
) -> EvolutionSeries:
    """March b from t=0 through ``times`` with an exponential integrator.

    ``v`` is either one field (time-constant flow, exact to round-off) or one
    field per entry of ``times``; on ``[t_j, t_{j+1}]`` the source uses the
    velocity sampled at ``t_j`` (and at ``times[0]`` on the initial step).
    """
    _check_eta(eta)
    F = F if isinstance(F, BackgroundField) else BackgroundField(F)
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0:
        raise InputError("need at least one output time")
    if times[0] < 0 or np.any(np.diff(times) <= 0):
        raise InputError("times must be nonnegative and strictly increasing")

    if isinstance(v, SpectralVectorField):
        velocities = [v] * len(times)
    else:
        velocities = list(v)
        if len(velocities) != len(times):
            raise InputError("need one velocity sample per output time")
    for j, vj in enumerate(velocities):
        if vj.lattice != lattice:
            raise InputError("velocity lives on a different lattice")
        if j == 0 or vj is not velocities[j - 1]:
            check_solenoidal(vj, "velocity")

    if b0 is None:
        b0 = SpectralVectorField.zeros(lattice)
    _check_mean_zero(b0, "initial field")
    check_solenoidal(b0, "initial field")

    lam = eta * lattice.eigenvalues
    b = b0.coeffs.copy()
    t_prev = 0.0
    snapshots = []
    h_cache = None
    for j, t in enumerate(times):
        vj = velocities[max(j - 1, 0)]
        if h_cache is None or h_cache[0] is not vj:
            h_cache = (vj, curl_cross(F, vj).coeffs)
        dt = t - t_prev
        if dt > 0:
            b = np.exp(-lam * dt) * b + dt * phi1(lam * dt) * h_cache[1]
        b[(slice(None),) + (0,) * lattice.d] = 0.0
        snapshots.append(SpectralVectorField(lattice, b.copy()))
        t_prev = t
    return EvolutionSeries(times=times, snapshots=snapshots, eta=float(eta))


def stokes_domain_norm(b: SpectralVectorField) -> float:
    """``sqrt(sum_{k != 0} lambda_k^2 |b(k)|^2)``."""
    lam = b.lattice.eigenvalues
    return float(np.sqrt(np.sum(lam**2 * np.abs(b.coeffs) ** 2)))


def h1_norm(b: SpectralVectorField) -> float:
    lam = b.lattice.eigenvalues
    return float(np.sqrt(np.sum((1.0 + lam) * np.abs(b.coeffs) ** 2)))


def divergence_residual(series: EvolutionSeries) -> float:
    """Worst relative divergence over the snapshots of a series."""
    if not series.snapshots:
        return 0.0
    return max(relative_divergence(b) for b in series.snapshots)
