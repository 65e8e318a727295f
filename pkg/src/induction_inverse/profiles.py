"""Closed-form whole-space test fields for the characteristic solver.

Each profile pairs a velocity ``v`` with the source ``h = -(F.grad) v`` it
induces, so ``v`` restricted to a hyperplane is compatible trace data and
``v`` itself is the exact solution. Points are arrays with the coordinate
axis first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError

__all__ = ["Profile", "zero_profile", "constant_profile", "gaussian_vortex", "make_profile"]


@dataclass(frozen=True)
class Profile:
    name: str
    velocity: Callable
    source: Callable


def _col(vec, ndim):
    return np.reshape(np.asarray(vec, dtype=float), (-1,) + (1,) * (ndim - 1))


def zero_profile(d: int) -> Profile:
    z = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    return Profile("zero", z, z)


def constant_profile(d: int, value) -> Profile:
    """Source ``h = value`` with zero trace; ``v(y + sF) = -s value``."""
    value = np.asarray(value, dtype=float)
    if value.shape != (d,):
        raise ConfigError(f"constant source needs {d} components")

    def h(x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(_col(value, x.ndim), x.shape).copy()

    def v(x):
        # only defined on the trace plane, where it vanishes
        return np.zeros_like(np.asarray(x, dtype=float))

    return Profile("constant", v, h)


def gaussian_vortex(
    d: int,
    F,
    center=None,
    sigma: float = 0.5,
    amplitude: float = 1.0,
    axis=None,
) -> Profile:
    """Divergence-free vortex built on ``psi = A exp(-|x - c|^2 / (2 sigma^2))``.

    In 2D ``v = (d2 psi, -d1 psi)``; in 3D ``v = grad(psi) x axis``.
    """
    F = np.asarray(F, dtype=float)
    c = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    a = np.eye(3)[2] if axis is None else np.asarray(axis, dtype=float)
    if F.shape != (d,) or c.shape != (d,) or sigma <= 0:
        raise ConfigError("gaussian vortex needs d-vectors F, center and sigma > 0")
    s2 = sigma * sigma

    def parts(x):
        x = np.asarray(x, dtype=float)
        r = x - _col(c, x.ndim)
        psi = amplitude * np.exp(-np.sum(r * r, axis=0) / (2 * s2))
        grad = -psi * r / s2
        # (F.grad) grad(psi) = Hess(psi) F
        rF = np.tensordot(F, r, axes=1)
        hess_F = psi * (r * rF / (s2 * s2) - _col(F, x.ndim) / s2)
        return grad, hess_F

    def rot(w):
        if d == 2:
            return np.stack([w[1], -w[0]])
        return np.cross(w, _col(a, w.ndim), axis=0)

    def v(x):
        grad, _ = parts(x)
        return rot(grad)

    def h(x):
        _, hess_F = parts(x)
        return -rot(hess_F)

    return Profile("gaussian", v, h)


def make_profile(name: str, d: int, F, params: dict = None) -> Profile:
    params = dict(params or {})
    if name == "zero":
        return zero_profile(d)
    if name == "constant":
        return constant_profile(d, params.get("value", np.ones(d)))
    if name == "gaussian":
        return gaussian_vortex(
            d,
            F,
            center=params.get("center"),
            sigma=float(params.get("sigma", 0.5)),
            amplitude=float(params.get("amplitude", 1.0)),
            axis=params.get("axis"),
        )
    raise ConfigError(f"unknown profile {name!r}; choose zero, constant or gaussian")
