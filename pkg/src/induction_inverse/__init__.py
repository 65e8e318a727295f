"""Linearized magnetic induction: forward solver, velocity recovery,
resonance analysis on the torus and characteristic transport in R^d."""

from .arithmetic import (
    DiophantineEstimate,
    ResonanceReport,
    diophantine_estimate,
    is_incommensurable,
    resonant_set,
)
from .errors import (
    CharacteristicSurfaceError,
    ConfigError,
    FieldFileError,
    InductionError,
    ModeRangeError,
    PreconditionError,
    UnsolvableModeError,
)
from .fields import (
    BackgroundField,
    GridVectorField,
    SpectralScalarField,
    SpectralVectorField,
    curl_cross,
    leray_project,
    random_solenoidal,
    spectral_norm,
    to_grid,
    to_spectral,
    transport_apply,
)
from .forward import EvolutionSeries, duhamel_snapshot, evolve_series
from .inverse import (
    ReconstructionResult,
    reconstruct_velocity,
    sobolev_seminorm,
    source_from_series,
    source_from_snapshot,
    stability_rhs,
)
from .lattice import TorusLattice, dual_vector, enumerate_modes, laplacian_eigenvalue
from .transport_rd import SlabGrid, SlabSpec, make_chart, solve_slab

__version__ = "0.1.0"
