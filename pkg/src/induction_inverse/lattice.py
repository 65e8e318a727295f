"""Periodic box geometry: dual-lattice vectors, Laplacian eigenvalues and the
truncated set of retained Fourier modes.

Spectral arrays throughout the package use numpy's FFT ordering, shape
``N_1 x ... x N_d``, with the integer wavenumber along axis ``i`` given by
``fftfreq(N_i) * N_i``. Only modes with ``|k_i| <= N_i/2 - 1`` are retained;
the Nyquist planes are kept identically zero so every retained mode has its
conjugate partner.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .errors import ConfigError, ModeRangeError

__all__ = [
    "TorusLattice",
    "dual_vector",
    "laplacian_eigenvalue",
    "enumerate_modes",
]


@dataclass(frozen=True)
class TorusLattice:
    """Rectangular torus with periods ``L`` sampled on an ``N`` grid."""

    L: tuple
    N: tuple

    def __post_init__(self):
        L = tuple(float(x) for x in self.L)
        N = tuple(int(n) for n in self.N)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "N", N)
        if len(L) != len(N):
            raise ConfigError(f"L has {len(L)} entries but N has {len(N)}")
        if len(L) not in (2, 3):
            raise ConfigError(f"dimension must be 2 or 3, got {len(L)}")
        if not all(np.isfinite(x) and x > 0 for x in L):
            raise ConfigError(f"periods must be positive and finite, got {L}")
        if not all(n >= 4 and n % 2 == 0 for n in N):
            raise ConfigError(f"grid counts must be even and >= 4, got {N}")

    @classmethod
    def unit(cls, d: int, n: int) -> "TorusLattice":
        return cls((1.0,) * d, (n,) * d)

    @property
    def d(self) -> int:
        return len(self.L)

    @property
    def shape(self) -> tuple:
        return self.N

    @property
    def volume(self) -> float:
        return float(np.prod(self.L))

    @property
    def truncation(self) -> tuple:
        """Largest retained |k_i| per axis."""
        return tuple(n // 2 - 1 for n in self.N)

    @property
    def kmax_full(self) -> int:
        return min(self.truncation)

    @cached_property
    def wavenumbers(self) -> tuple:
        """Integer wavenumbers along each axis in FFT order."""
        return tuple(np.rint(np.fft.fftfreq(n) * n).astype(np.int64) for n in self.N)

    @cached_property
    def k_grid(self) -> np.ndarray:
        """Integer wavevectors, shape ``(d, *N)``."""
        return np.stack(np.meshgrid(*self.wavenumbers, indexing="ij"))

    @cached_property
    def retained(self) -> np.ndarray:
        """Boolean mask of retained modes (Nyquist planes excluded)."""
        return np.all(
            np.abs(self.k_grid) <= np.reshape(self.truncation, (-1,) + (1,) * self.d),
            axis=0,
        )

    @cached_property
    def g_grid(self) -> np.ndarray:
        """Dual-lattice vectors ``k_i / L_i``, shape ``(d, *N)``."""
        L = np.reshape(self.L, (-1,) + (1,) * self.d)
        return self.k_grid / L

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        """Stokes/Laplacian eigenvalues ``4 pi^2 |g(k)|^2`` on the FFT grid."""
        return 4.0 * np.pi**2 * np.sum(self.g_grid**2, axis=0)

    @cached_property
    def k_norm(self) -> np.ndarray:
        """Euclidean norm of the integer wavevector on the FFT grid."""
        return np.sqrt(np.sum(self.k_grid.astype(float) ** 2, axis=0))

    def grid_points(self) -> np.ndarray:
        """Physical sample points ``x_j = j L / N``, shape ``(d, *N)``."""
        axes = [np.arange(n) * (l / n) for l, n in zip(self.L, self.N)]
        return np.stack(np.meshgrid(*axes, indexing="ij"))

    def check_mode(self, k: Sequence[int]) -> tuple:
        k = tuple(int(c) for c in k)
        if len(k) != self.d:
            raise ModeRangeError(f"mode {k} has wrong dimension for d={self.d}")
        for ki, t in zip(k, self.truncation):
            if abs(ki) > t:
                raise ModeRangeError(f"mode {k} outside truncation {self.truncation}")
        return k

    def slot(self, k: Sequence[int]) -> tuple:
        """Array index of mode ``k`` in FFT-ordered spectral arrays."""
        k = self.check_mode(k)
        return tuple(ki % n for ki, n in zip(k, self.N))


def dual_vector(lattice: TorusLattice, k: Sequence[int]) -> np.ndarray:
    """g(k) = (k_1/L_1, ..., k_d/L_d)."""
    k = lattice.check_mode(k)
    return np.array([ki / li for ki, li in zip(k, lattice.L)])


def laplacian_eigenvalue(lattice: TorusLattice, k: Sequence[int]) -> float:
    g = dual_vector(lattice, k)
    return float(4.0 * np.pi**2 * np.dot(g, g))


def enumerate_modes(lattice: TorusLattice, kmax: Union[int, str] = "full") -> list:
    """All nonzero retained ``k`` with ``|k_i| <= kmax``, in lexicographic order.

    ``kmax="full"`` enumerates the whole retained truncation, which may be
    anisotropic when the grid counts differ.
    """
    if kmax == "full":
        bounds = lattice.truncation
    else:
        kmax = int(kmax)
        if kmax < 1 or kmax > lattice.kmax_full:
            raise ModeRangeError(
                f"kmax={kmax} outside [1, {lattice.kmax_full}] for N={lattice.N}"
            )
        bounds = (kmax,) * lattice.d
    ranges = [range(-b, b + 1) for b in bounds]
    return [k for k in itertools.product(*ranges) if any(k)]
