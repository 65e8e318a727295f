"""Transport along characteristics in the whole space.

Trace data on a plane crossed by F, plus the source along each line
y + sF, fix the velocity everywhere. The slab is sampled on those lines, so
the only error is the trapezoid rule, second order in the step.
"""

import numpy as np

from induction_inverse.profiles import gaussian_vortex
from induction_inverse.transport_rd import (
    SlabSpec,
    divergence_residual_slab,
    make_chart,
    slab_points,
    solve_slab,
    transport_residual_slab,
)

F = (1.0, np.sqrt(2.0), np.sqrt(3.0))
chart = make_chart((0.3, 0.2, 1.0), F)
print("surface basis:\n", np.round(chart.surface_basis, 4))

prof = gaussian_vortex(3, F, center=(0.1, 0.1, 0.1), sigma=0.5)

print("\n  Ms    transport   divergence   max error")
for level in range(3):
    spec = SlabSpec.from_extent([1.0, 1.0], [10 * 2**level + 1] * 2, 1.0, 20 * 2**level + 1)
    pts = slab_points(chart, spec)
    v = solve_slab(chart, prof.source, prof.velocity, spec)
    err = np.max(np.abs(v.values - prof.velocity(pts)))
    print(
        f"{spec.Ms:5d}  {transport_residual_slab(v, prof.source(pts)):.3e}"
        f"   {divergence_residual_slab(v):.3e}   {err:.3e}"
    )

try:
    make_chart((0.0, 1.0, 0.0), (1.0, 0.0, 1.0))
except ValueError as exc:
    print("\ntangent plane rejected:", exc)
