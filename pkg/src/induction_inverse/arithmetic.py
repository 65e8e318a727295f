"""Resonance and small-divisor analysis of a background field on a torus.

The resonant set collects nonzero integer wavevectors on which the transport
symbol ``F.g(k)`` vanishes. Every scan here is a finite window
``|k_i| <= kmax``; reports carry the window so no claim is made beyond it.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, UnsupportedInputError
from .lattice import TorusLattice

__all__ = [
    "ResonanceReport",
    "DiophantineEstimate",
    "scan_window",
    "resonant_set",
    "is_incommensurable",
    "diophantine_estimate",
    "default_tolerance",
    "as_exact",
]


@dataclass
class ResonanceReport:
    kmax: int
    resonant_modes: list
    min_abs_pairing: float
    argmin_k: tuple
    mode: str
    tolerance: Optional[float] = None

    @property
    def incommensurable_in_window(self) -> bool:
        return not self.resonant_modes

    def to_text(self) -> str:
        lines = [
            f"mode = {self.mode}",
            f"kmax = {self.kmax}",
        ]
        if self.tolerance is not None:
            lines.append(f"tolerance = {self.tolerance:.17g}")
        lines += [
            f"resonant_count = {len(self.resonant_modes)}",
            f"min_abs_pairing = {self.min_abs_pairing:.17g}",
            f"argmin_k = {_fmt_k(self.argmin_k)}",
            "incommensurable_in_window = " + str(self.incommensurable_in_window).lower(),
        ]
        lines += [f"resonant {_fmt_k(k)}" for k in self.resonant_modes]
        return "\n".join(lines) + "\n"


@dataclass
class DiophantineEstimate:
    tau: float
    kmax: int
    C_est: float
    argmin_k: tuple
    envelope: np.ndarray = field(repr=False)

    def to_text(self) -> str:
        return (
            f"tau = {self.tau:.17g}\n"
            f"kmax = {self.kmax}\n"
            f"C_est = {self.C_est:.17g}\n"
            f"argmin_k = {_fmt_k(self.argmin_k)}\n"
        )


def _fmt_k(k) -> str:
    return "(" + ",".join(str(int(c)) for c in k) + ")"


def _periods(lattice) -> tuple:
    if isinstance(lattice, TorusLattice):
        return lattice.L
    return tuple(lattice)


def scan_window(d: int, kmax: int) -> np.ndarray:
    """Nonzero integer vectors with ``|k_i| <= kmax``, lexicographic, shape (m, d)."""
    if kmax < 1:
        raise ConfigError(f"kmax must be >= 1, got {kmax}")
    axis = np.arange(-kmax, kmax + 1, dtype=np.int64)
    grid = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    return grid[np.any(grid != 0, axis=1)]


def as_exact(x) -> Fraction:
    """Exact rational from int, Fraction or a ``"p/q"`` string."""
    if isinstance(x, bool):
        raise UnsupportedInputError("booleans are not rationals")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise UnsupportedInputError(f"cannot read {x!r} as an exact rational") from exc
    raise UnsupportedInputError(
        f"{x!r} ({type(x).__name__}) is not an exact rational; use a float-threshold scan"
    )


def default_tolerance(F: Sequence[float], L: Sequence[float]) -> float:
    return 1e-12 * float(np.linalg.norm(np.asarray(F, dtype=float))) / min(L)


def _pairings(F, L, ks: np.ndarray) -> np.ndarray:
    ratios = np.asarray(F, dtype=float) / np.asarray(L, dtype=float)
    return ks @ ratios


def resonant_set(
    F,
    lattice,
    kmax: int,
    mode: str = "float-threshold",
    tolerance: Optional[float] = None,
) -> ResonanceReport:
    """Scan the window for modes with ``F.g(k) = 0``.

    In ``"exact-rational"`` mode ``F`` entries must be exact rationals
    (``Fraction``, ``int`` or ``"p/q"``) and the periods are taken as the
    exact binary values of the floats; the zero test is then exact integer
    arithmetic. In ``"float-threshold"`` mode a mode is resonant when
    ``|F.g(k)| < tolerance``.
    """
    L = _periods(lattice)
    d = len(L)
    if len(F) != d:
        raise ConfigError(f"F has {len(F)} components, domain has {d}")
    ks = scan_window(d, kmax)

    if mode == "exact-rational":
        ratios = [as_exact(f) / Fraction(l) for f, l in zip(F, L)]
        denom = math.lcm(*(r.denominator for r in ratios))
        ints = [int(r * denom) for r in ratios]
        exact = ks.astype(object) @ np.array(ints, dtype=object)
        zero = np.array([v == 0 for v in exact], dtype=bool)
        pair = np.array([abs(float(Fraction(int(v), denom))) for v in exact])
        tol = None
    elif mode == "float-threshold":
        if tolerance is None:
            raise ConfigError("float-threshold scan needs a tolerance")
        if not tolerance > 0:
            raise ConfigError(f"tolerance must be positive, got {tolerance}")
        pair = np.abs(_pairings([float(f) for f in F], L, ks))
        zero = pair < tolerance
        tol = float(tolerance)
    else:
        raise ConfigError(f"unknown resonance mode {mode!r}")

    # argmin returns the first hit, which is the lexicographically smallest k
    i = int(np.argmin(pair))
    return ResonanceReport(
        kmax=int(kmax),
        resonant_modes=[tuple(int(c) for c in k) for k in ks[zero]],
        min_abs_pairing=float(pair[i]),
        argmin_k=tuple(int(c) for c in ks[i]),
        mode=mode,
        tolerance=tol,
    )


def is_incommensurable(ratios: Sequence) -> tuple:
    """Decide rational independence of exact rationals ``F_i/L_i``.

    Returns ``(flag, witness)`` where ``witness`` is a nonzero integer vector
    with ``sum k_i r_i = 0`` when ``flag`` is False, else None.
    """
    r = [as_exact(x) for x in ratios]
    d = len(r)
    if d == 0:
        raise ConfigError("need at least one ratio")
    for i, ri in enumerate(r):
        if ri == 0:
            k = [0] * d
            k[i] = 1
            return False, tuple(k)
    if d == 1:
        return True, None
    if d == 2:
        q = r[0] / r[1]
        return False, (q.denominator, -q.numerator)

    denom = math.lcm(*(x.denominator for x in r))
    a = [int(x * denom) for x in r]
    g = math.gcd(*a)
    a = [x // g for x in a]
    # shortest relation in a small box, else the pairwise one
    radius = min(max(abs(x) for x in a), 6)
    best = None
    for k in itertools.product(range(-radius, radius + 1), repeat=d):
        if any(k) and sum(ki * ai for ki, ai in zip(k, a)) == 0:
            n = sum(ki * ki for ki in k)
            if best is None or n < best[0]:
                best = (n, k)
    if best is not None:
        k = best[1]
        sign = -1 if next(c for c in k if c) < 0 else 1
        return False, tuple(sign * c for c in k)
    g01 = math.gcd(a[0], a[1])
    return False, (a[1] // g01, -a[0] // g01) + (0,) * (d - 2)


def diophantine_estimate(F, lattice, tau: float, kmax: int) -> DiophantineEstimate:
    """Scan ``|F.g(k)| |k|^tau`` over the window and return its minimum.

    ``envelope`` has columns ``(|k|, min |F.g| at that |k|, running min over
    all |k'| <= |k|)``, one row per distinct Euclidean norm.
    """
    L = _periods(lattice)
    d = len(L)
    if len(F) != d:
        raise ConfigError(f"F has {len(F)} components, domain has {d}")
    if tau < d - 1:
        warnings.warn(f"tau={tau} below d-1={d - 1}; the condition cannot hold for all k")
    ks = scan_window(d, kmax)
    pair = np.abs(_pairings([float(f) for f in F], L, ks))
    norm2 = np.sum(ks * ks, axis=1)
    knorm = np.sqrt(norm2.astype(float))
    weighted = pair * knorm**tau
    i = int(np.argmin(weighted))

    uniq, inverse = np.unique(norm2, return_inverse=True)
    per_norm = np.full(uniq.shape, np.inf)
    np.minimum.at(per_norm, inverse, pair)
    envelope = np.column_stack(
        [np.sqrt(uniq.astype(float)), per_norm, np.minimum.accumulate(per_norm)]
    )
    return DiophantineEstimate(
        tau=float(tau),
        kmax=int(kmax),
        C_est=float(weighted[i]),
        argmin_k=tuple(int(c) for c in ks[i]),
        envelope=envelope,
    )
