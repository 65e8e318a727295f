"""Exception hierarchy shared by the solver modules and the command line."""


class InductionError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(InductionError, ValueError):
    """A parameter is outside its admissible range (eta <= 0, tol <= 0, ...)."""


class PreconditionError(InductionError, ValueError):
    """Input data violates a structural hypothesis (solenoidality, zero mean)."""


class InputError(InductionError, ValueError):
    """Malformed input: inconsistent shapes, too few snapshots, bad spacing."""


class DataError(InductionError, ValueError):
    """Non-finite samples or coefficients."""


class SymmetryError(InductionError, ValueError):
    """Spectral coefficients are not Hermitian, so the field is not real."""


class ModeRangeError(InductionError, IndexError):
    """A wavevector lies outside the retained truncation of its lattice."""


class UnsupportedInputError(InductionError, TypeError):
    """The exact-arithmetic path received data it cannot treat exactly."""


class CharacteristicSurfaceError(InductionError, ValueError):
    """The trace hyperplane is (numerically) tangent to the background field."""


class UnsolvableModeError(InductionError):
    """The source carries energy on resonant modes, where the mode equation
    has a vanishing left-hand side and therefore no solution."""

    def __init__(self, modes, message=None):
        self.modes = [tuple(int(c) for c in k) for k in modes]
        if message is None:
            shown = ", ".join(str(k) for k in self.modes[:8])
            more = "" if len(self.modes) <= 8 else f" (+{len(self.modes) - 8} more)"
            message = (
                "incommensurability violated: source has energy on resonant "
                f"modes {shown}{more}"
            )
        super().__init__(message)


class FieldFileError(InductionError, OSError):
    """A VFLD file is unreadable, truncated, or fails its checksum."""
