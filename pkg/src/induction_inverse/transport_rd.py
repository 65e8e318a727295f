"""Whole-space transport ``(F.grad) v = -h`` with data on a hyperplane.

The hyperplane ``S = {x : x.n = 0}`` is crossed once by every line
``y + sF`` as long as ``F.n != 0``. Samples live directly on those lines,
``x = y + sF`` with ``y`` on a surface grid and ``s = j ds``, so the solution is
a cumulative trapezoid integral of ``h`` along each line and no interpolation
is ever needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.linalg import null_space

from .errors import CharacteristicSurfaceError, ConfigError, InputError

__all__ = [
    "HyperplaneChart",
    "SlabSpec",
    "SlabGrid",
    "make_chart",
    "chart_decompose",
    "project_to_surface",
    "slab_points",
    "surface_points",
    "sample_slab",
    "solve_slab",
    "transport_residual_slab",
    "divergence_residual_slab",
]

CHARACTERISTIC_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class HyperplaneChart:
    n: np.ndarray
    F: np.ndarray
    surface_basis: np.ndarray  # rows span n-perp

    @property
    def d(self) -> int:
        return len(self.n)

    @property
    def jacobian(self) -> np.ndarray:
        """Columns ``e_1, ..., e_{d-1}, F``: derivative of ``(u, s) -> sum u_j e_j + sF``."""
        return np.column_stack([*self.surface_basis, self.F])


def make_chart(n: Sequence[float], F: Sequence[float]) -> HyperplaneChart:
    n = np.asarray(n, dtype=float)
    F = np.asarray(F, dtype=float)
    if n.shape != F.shape or n.ndim != 1 or len(n) not in (2, 3):
        raise ConfigError("normal and background field must be vectors of equal length 2 or 3")
    nn = np.linalg.norm(n)
    if nn == 0:
        raise ConfigError("normal must be nonzero")
    n = n / nn
    fn = np.linalg.norm(F)
    if fn == 0:
        raise ConfigError("background field must be nonzero")
    if abs(F @ n) <= CHARACTERISTIC_TOL * fn:
        raise CharacteristicSurfaceError(
            f"characteristic surface: F.n = {F @ n:.3e}, the hyperplane must be "
            "non-characteristic (F not tangent to it)"
        )
    basis = null_space(n[None, :]).T
    # fix orientation so the basis is reproducible across LAPACK builds
    for i, e in enumerate(basis):
        j = int(np.argmax(np.abs(e)))
        if e[j] < 0:
            basis[i] = -e
    return HyperplaneChart(n=n, F=F, surface_basis=basis)


def chart_decompose(chart: HyperplaneChart, x) -> tuple:
    """Split ``x = pi(x) + tau(x) F``; returns surface coordinates and ``tau``.

    ``x`` may be a single point or an array with the coordinate axis last.
    """
    x = np.asarray(x, dtype=float)
    tau = (x @ chart.n) / (chart.F @ chart.n)
    y = (x - np.multiply.outer(tau, chart.F)) @ chart.surface_basis.T
    return y, tau


def project_to_surface(chart: HyperplaneChart, x) -> np.ndarray:
    """``pi(x)``: the point where the characteristic through ``x`` meets S."""
    x = np.asarray(x, dtype=float)
    tau = (x @ chart.n) / (chart.F @ chart.n)
    return x - np.multiply.outer(tau, chart.F)


@dataclass(frozen=True, eq=False)
class SlabSpec:
    """Surface grid ``linspace(-W_j, W_j, M_j)`` times ``s = ds * (-m..m)``."""

    W: tuple
    M: tuple
    ds: float
    m: int

    def __post_init__(self):
        W = tuple(float(w) for w in np.ravel(self.W))
        M = tuple(int(c) for c in np.ravel(self.M))
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "M", M)
        if len(W) != len(M):
            raise InputError("W and M must have one entry per surface direction")
        if any(c < 1 for c in M) or any(w < 0 for w in W):
            raise InputError("surface counts must be >= 1 and half-widths >= 0")
        if not self.ds > 0 or int(self.m) < 0:
            raise InputError("need ds > 0 and m >= 0")

    @classmethod
    def from_extent(cls, W, M, S: float, Ms: int) -> "SlabSpec":
        if Ms % 2 != 1:
            raise InputError("Ms must be odd so that s = 0 is a grid node")
        m = (Ms - 1) // 2
        return cls(W=W, M=M, ds=(S / m) if m else 1.0, m=m)

    @property
    def Ms(self) -> int:
        return 2 * self.m + 1

    @property
    def S(self) -> float:
        return self.ds * self.m

    @property
    def s(self) -> np.ndarray:
        return self.ds * np.arange(-self.m, self.m + 1)

    @property
    def u_axes(self) -> list:
        return [np.linspace(-w, w, c) for w, c in zip(self.W, self.M)]

    @property
    def du(self) -> tuple:
        return tuple((2 * w / (c - 1)) if c > 1 else 0.0 for w, c in zip(self.W, self.M))

    @property
    def shape(self) -> tuple:
        return self.M + (self.Ms,)


@dataclass(frozen=True, eq=False)
class SlabGrid:
    chart: HyperplaneChart
    spec: SlabSpec
    values: np.ndarray  # (d, M_1, ..., M_{d-1}, Ms)

    def __post_init__(self):
        expected = (self.chart.d,) + self.spec.shape
        if self.values.shape != expected:
            raise InputError(f"slab values shape {self.values.shape} != {expected}")

    @property
    def trace(self) -> np.ndarray:
        return self.values[..., self.spec.m]


def surface_points(chart: HyperplaneChart, spec: SlabSpec) -> np.ndarray:
    """Points ``y`` of the surface grid, shape ``(d, M_1, ..., M_{d-1})``."""
    if len(spec.M) != chart.d - 1:
        raise InputError(f"surface grid needs {chart.d - 1} directions, got {len(spec.M)}")
    u = np.meshgrid(*spec.u_axes, indexing="ij")
    return np.tensordot(chart.surface_basis.T, np.stack(u), axes=1)


def slab_points(chart: HyperplaneChart, spec: SlabSpec) -> np.ndarray:
    """Characteristic-aligned nodes ``y + sF``, shape ``(d, M..., Ms)``."""
    y = surface_points(chart, spec)
    F = chart.F.reshape((-1,) + (1,) * (chart.d - 1) + (1,))
    return y[..., None] + spec.s * F


def sample_slab(chart: HyperplaneChart, spec: SlabSpec, func: Callable) -> SlabGrid:
    """Evaluate ``func(points)`` (points with the coordinate axis first) on the slab."""
    return SlabGrid(chart, spec, np.asarray(func(slab_points(chart, spec)), dtype=float))


def _as_samples(obj, points, shape, what) -> np.ndarray:
    arr = obj(points) if callable(obj) else obj
    arr = np.asarray(arr, dtype=float)
    if arr.shape != shape:
        raise InputError(f"{what} has shape {arr.shape}, expected {shape}")
    return arr


def solve_slab(
    chart: HyperplaneChart,
    h: Union[Callable, np.ndarray],
    v_S: Union[Callable, np.ndarray],
    spec: SlabSpec,
) -> SlabGrid:
    """``v(y + sF) = v_S(y) - int_0^s h(y + s'F) ds'`` by cumulative trapezoid.

    ``h`` is a callable on points ``(d, ...)`` or samples on the slab nodes;
    ``v_S`` likewise on the surface grid. Integration runs outward from the
    trace plane in both directions, so extending the slab in ``s`` leaves the
    existing nodes unchanged.
    """
    d = chart.d
    pts = slab_points(chart, spec)
    hs = _as_samples(h, pts, (d,) + spec.shape, "h")
    vs = _as_samples(v_S, pts[..., spec.m], (d,) + spec.M, "trace")
    m = spec.m

    integral = np.zeros_like(hs)
    if m > 0:
        fwd = cumulative_trapezoid(hs[..., m:], dx=spec.ds, axis=-1)
        integral[..., m + 1 :] = fwd
        back = cumulative_trapezoid(hs[..., m::-1], dx=spec.ds, axis=-1)
        integral[..., :m] = -back[..., ::-1]
    return SlabGrid(chart, spec, vs[..., None] - integral)


def transport_residual_slab(v: SlabGrid, h) -> float:
    """Max of ``|dv/ds + h|`` over interior s-nodes, scaled by ``max(1, max|h|)``."""
    hs = h.values if isinstance(h, SlabGrid) else np.asarray(h, dtype=float)
    if hs.shape != v.values.shape:
        raise InputError("h samples do not match the slab")
    if v.spec.Ms < 3:
        raise InputError("need at least 3 nodes along the characteristics")
    dvds = (v.values[..., 2:] - v.values[..., :-2]) / (2 * v.spec.ds)
    res = np.max(np.abs(dvds + hs[..., 1:-1]), initial=0.0)
    return float(res / max(1.0, float(np.max(np.abs(hs), initial=0.0))))


def divergence_residual_slab(v: SlabGrid) -> float:
    """Max |div v| at interior nodes, scaled by ``max(1, max |grad v|)``.

    Derivatives in the slab coordinates ``(u, s)`` are converted with the
    constant inverse Jacobian of ``(u, s) -> sum u_j e_j + sF``. Boundary
    nodes are excluded.
    """
    spec = v.spec
    if min(spec.M + (spec.Ms,)) < 5:
        raise InputError("divergence residual needs at least 5 nodes per direction")
    d = v.chart.d
    steps = spec.du + (spec.ds,)
    vals = v.values
    # dq[i, m] = dv_i / dq_m at interior nodes
    dq = []
    for ax, h in enumerate(steps):
        a = 1 + ax
        fwd = [slice(None)] * vals.ndim
        bwd = [slice(None)] * vals.ndim
        fwd[a] = slice(2, None)
        bwd[a] = slice(None, -2)
        diff = (vals[tuple(fwd)] - vals[tuple(bwd)]) / (2 * h)
        other = [slice(1, -1) if b != a else slice(None) for b in range(1, d + 1)]
        dq.append(diff[(slice(None),) + tuple(other)])
    dq = np.stack(dq, axis=1)
    jinv = np.linalg.inv(v.chart.jacobian)
    # grad[i, l] = sum_m dq[i, m] jinv[m, l]
    grad = np.einsum("im...,ml->il...", dq, jinv)
    div = np.einsum("ii...->...", grad)
    gnorm = np.sqrt(np.sum(grad**2, axis=(0, 1)))
    return float(np.max(np.abs(div)) / max(1.0, float(np.max(gnorm))))
