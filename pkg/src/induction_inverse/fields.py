"""Real vector fields on the torus in grid and spectral form, and the linear
differential operators acting on them.

Spectral coefficients follow the expansion ``f(x) = sum_k c(k) e_k(x)`` with
``e_k(x) = exp(2 pi i g(k).x)``, so the forward transform carries the factor
``1/prod(N)`` and a derivative along ``a`` multiplies mode ``k`` by
``2 pi i a.g(k)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, DataError, InputError, SymmetryError
from .lattice import TorusLattice

__all__ = [
    "GridVectorField",
    "SpectralVectorField",
    "SpectralScalarField",
    "BackgroundField",
    "to_spectral",
    "to_grid",
    "divergence",
    "project_mean_zero",
    "leray_project",
    "transport_apply",
    "curl_cross",
    "random_solenoidal",
    "random_scalar",
    "enforce_hermitian",
    "hermitian_violation",
    "spectral_norm",
    "l2_norm",
    "grid_l2_norm",
    "transport_symbol",
]

HERMITIAN_TOL = 1e-10
IMAG_RESIDUE_TOL = 1e-12


def _spatial_axes(arr: np.ndarray, d: int) -> tuple:
    return tuple(range(arr.ndim - d, arr.ndim))


def _conjugate_partner(arr: np.ndarray, d: int) -> np.ndarray:
    """Array whose entry at k holds conj(arr at -k)."""
    out = arr
    for ax in _spatial_axes(arr, d):
        out = np.roll(np.flip(out, axis=ax), 1, axis=ax)
    return np.conj(out)


def enforce_hermitian(arr: np.ndarray, lattice: TorusLattice) -> np.ndarray:
    """Average conjugate pairs and zero everything outside the truncation."""
    out = 0.5 * (arr + _conjugate_partner(arr, lattice.d))
    return np.where(lattice.retained, out, 0.0)


def hermitian_violation(arr: np.ndarray, lattice: TorusLattice) -> float:
    """Relative size of the anti-Hermitian part plus any Nyquist content."""
    scale = max(1.0, float(np.max(np.abs(arr), initial=0.0)))
    asym = np.max(np.abs(arr - _conjugate_partner(arr, lattice.d)), initial=0.0)
    nyq = np.max(np.abs(np.where(lattice.retained, 0.0, arr)), initial=0.0)
    return float(max(asym, nyq)) / scale


@dataclass(frozen=True, eq=False)
class GridVectorField:
    """Real samples, shape ``(d, *N)``, component axis outermost."""

    lattice: TorusLattice
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        expected = (self.lattice.d,) + self.lattice.N
        if data.shape != expected:
            raise InputError(f"grid data shape {data.shape} != {expected}")
        if not np.all(np.isfinite(data)):
            raise DataError("grid field contains non-finite samples")
        object.__setattr__(self, "data", data)


class _SpectralBase:
    lattice: TorusLattice
    coeffs: np.ndarray

    # let numpy scalars defer to __rmul__
    __array_ufunc__ = None

    def _like(self, coeffs):
        return type(self)(self.lattice, coeffs)

    def __add__(self, other):
        self._check_compatible(other)
        return self._like(self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check_compatible(other)
        return self._like(self.coeffs - other.coeffs)

    def __neg__(self):
        return self._like(-self.coeffs)

    def __mul__(self, scalar):
        return self._like(self.coeffs * scalar)

    __rmul__ = __mul__

    def _check_compatible(self, other):
        if type(other) is not type(self) or other.lattice != self.lattice:
            raise InputError("fields live on different lattices or have different kinds")

    def coefficient(self, k: Sequence[int]):
        return self.coeffs[(Ellipsis,) + self.lattice.slot(k)]

    @property
    def mean(self):
        return self.coeffs[(Ellipsis,) + (0,) * self.lattice.d]


@dataclass(frozen=True, eq=False)
class SpectralVectorField(_SpectralBase):
    """Fourier coefficients of a real d-vector field, shape ``(d, *N)``."""

    lattice: TorusLattice
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        expected = (self.lattice.d,) + self.lattice.N
        if c.shape != expected:
            raise InputError(f"coefficient shape {c.shape} != {expected}")
        if not np.all(np.isfinite(c)):
            raise DataError("spectral field contains non-finite coefficients")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, lattice: TorusLattice) -> "SpectralVectorField":
        return cls(lattice, np.zeros((lattice.d,) + lattice.N, dtype=complex))

    @classmethod
    def from_modes(cls, lattice: TorusLattice, modes: dict) -> "SpectralVectorField":
        """Build a real field from ``{k: c(k)}``; conjugate partners are filled in.

        Passing both ``k`` and ``-k`` is allowed only if they already agree.
        """
        c = np.zeros((lattice.d,) + lattice.N, dtype=complex)
        for k, vec in modes.items():
            vec = np.asarray(vec, dtype=complex).reshape(lattice.d)
            c[(slice(None),) + lattice.slot(k)] = vec
            minus = tuple(-int(x) for x in k)
            c[(slice(None),) + lattice.slot(minus)] = np.conj(vec)
            if not any(k):
                c[(slice(None),) + lattice.slot(k)] = vec.real
        return cls(lattice, c)


@dataclass(frozen=True, eq=False)
class SpectralScalarField(_SpectralBase):
    """Fourier coefficients of a real scalar field, shape ``N``."""

    lattice: TorusLattice
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != self.lattice.N:
            raise InputError(f"coefficient shape {c.shape} != {self.lattice.N}")
        if not np.all(np.isfinite(c)):
            raise DataError("spectral field contains non-finite coefficients")
        object.__setattr__(self, "coeffs", c)


@dataclass(frozen=True)
class BackgroundField:
    """Constant, nonzero background magnetic field."""

    F: tuple

    def __post_init__(self):
        F = tuple(float(x) for x in np.ravel(self.F))
        if not all(np.isfinite(F)):
            raise ConfigError(f"background field must be finite, got {F}")
        if np.linalg.norm(F) == 0.0:
            raise ConfigError("background field must be nonzero")
        object.__setattr__(self, "F", F)

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.F)

    @property
    def d(self) -> int:
        return len(self.F)


def _as_background(F) -> BackgroundField:
    return F if isinstance(F, BackgroundField) else BackgroundField(F)


def _bcast(vec, d):
    return np.reshape(np.asarray(vec, dtype=float), (-1,) + (1,) * d)


def transport_symbol(F, lattice: TorusLattice) -> np.ndarray:
    """``F.g(k)`` on the FFT grid."""
    F = _as_background(F)
    if F.d != lattice.d:
        raise InputError(f"background field has dimension {F.d}, lattice has {lattice.d}")
    return np.sum(_bcast(F.vector, lattice.d) * lattice.g_grid, axis=0)


def to_spectral(f: GridVectorField) -> SpectralVectorField:
    lat = f.lattice
    if not np.all(np.isfinite(f.data)):
        raise DataError("grid field contains non-finite samples")
    axes = _spatial_axes(f.data, lat.d)
    c = np.fft.fftn(f.data, axes=axes) / np.prod(lat.N)
    return SpectralVectorField(lat, enforce_hermitian(c, lat))


def to_grid(s: SpectralVectorField) -> GridVectorField:
    lat = s.lattice
    viol = hermitian_violation(s.coeffs, lat)
    if viol > HERMITIAN_TOL:
        raise SymmetryError(f"coefficients violate Hermitian symmetry by {viol:.3e}")
    c = enforce_hermitian(s.coeffs, lat)
    axes = _spatial_axes(c, lat.d)
    z = np.fft.ifftn(c, axes=axes) * np.prod(lat.N)
    scale = max(1.0, float(np.max(np.abs(z), initial=0.0)))
    residue = float(np.max(np.abs(z.imag), initial=0.0))
    if residue > IMAG_RESIDUE_TOL * scale:
        raise SymmetryError(f"imaginary residue {residue:.3e} after inverse transform")
    return GridVectorField(lat, z.real.copy())


def spectral_norm(s) -> float:
    """Coefficient l2 norm, i.e. the L2 norm for a unit-volume torus."""
    return float(np.sqrt(np.sum(np.abs(s.coeffs) ** 2)))


def l2_norm(s) -> float:
    """Physical L2 norm: the coefficient norm scaled by sqrt(volume)."""
    return float(np.sqrt(s.lattice.volume)) * spectral_norm(s)


def grid_l2_norm(f: GridVectorField) -> float:
    lat = f.lattice
    cell = lat.volume / np.prod(lat.N)
    return float(np.sqrt(cell * np.sum(f.data**2)))


def divergence(s: SpectralVectorField) -> SpectralScalarField:
    g = s.lattice.g_grid
    return SpectralScalarField(s.lattice, 2j * np.pi * np.sum(g * s.coeffs, axis=0))


def project_mean_zero(s: SpectralVectorField) -> SpectralVectorField:
    c = s.coeffs.copy()
    c[(slice(None),) + (0,) * s.lattice.d] = 0.0
    return SpectralVectorField(s.lattice, c)


def leray_project(s: SpectralVectorField) -> SpectralVectorField:
    """Remove the component of each mode along g(k); the mean is untouched."""
    lat = s.lattice
    g = lat.g_grid
    g2 = np.sum(g**2, axis=0)
    safe = np.where(g2 > 0, g2, 1.0)
    along = np.sum(g * s.coeffs, axis=0) / safe
    return SpectralVectorField(lat, s.coeffs - g * along)


def transport_apply(F, s):
    """Apply ``(F.grad)`` mode by mode; accepts vector or scalar fields."""
    sym = 2j * np.pi * transport_symbol(F, s.lattice)
    return type(s)(s.lattice, sym * s.coeffs)


def curl_cross(F, s: SpectralVectorField) -> SpectralVectorField:
    """``curl(F x v)`` for constant F, via ``-(F.grad)v + F div(v)``."""
    F = _as_background(F)
    lat = s.lattice
    adv = 2j * np.pi * transport_symbol(F, lat) * s.coeffs
    div = divergence(s).coeffs
    return SpectralVectorField(lat, _bcast(F.vector, lat.d) * div - adv)


def _random_band(lattice: TorusLattice, rng, band: int, lead: tuple) -> np.ndarray:
    if band < 1 or band > lattice.kmax_full:
        raise ConfigError(f"band {band} outside [1, {lattice.kmax_full}]")
    shape = lead + lattice.N
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    inside = np.all(np.abs(lattice.k_grid) <= band, axis=0)
    inside[(0,) * lattice.d] = False
    return enforce_hermitian(np.where(inside, c, 0.0), lattice)


def random_solenoidal(
    lattice: TorusLattice, seed: int, band: int, amplitude: float = 1.0
) -> SpectralVectorField:
    """Deterministic mean-zero divergence-free field supported on |k_i| <= band."""
    rng = np.random.default_rng(seed)
    c = _random_band(lattice, rng, band, (lattice.d,))
    return leray_project(SpectralVectorField(lattice, amplitude * c))


def random_scalar(
    lattice: TorusLattice, seed: int, band: int, amplitude: float = 1.0
) -> SpectralScalarField:
    rng = np.random.default_rng(seed)
    return SpectralScalarField(lattice, amplitude * _random_band(lattice, rng, band, ()))
