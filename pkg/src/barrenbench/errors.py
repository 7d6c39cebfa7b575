"""Exception hierarchy shared by all modules."""


class BarrenBenchError(Exception):
    """Base class for library errors."""


class DimensionError(BarrenBenchError, ValueError):
    """Axis lengths or shapes are incompatible."""


class ValidationError(BarrenBenchError, ValueError):
    """An input fails a structural check (unitarity, hermiticity, ranges)."""


class DegenerateStateError(BarrenBenchError, ArithmeticError):
    """A state norm is too small to normalize by."""


class DivergenceError(BarrenBenchError, ArithmeticError):
    """A loss is infinite, e.g. KL divergence at zero acceptance probability."""


class DegenerateRegimeError(BarrenBenchError, ValueError):
    """Weingarten function requested with N < t."""


class RepresentationVanishesError(BarrenBenchError, ValueError):
    """Partition longer than the unitary group rank."""


class SizeGuardError(BarrenBenchError, ValueError):
    """Problem is too large for a dense or exact computation."""


class UnsupportedModeError(BarrenBenchError, ValueError):
    """Operation not available for the requested parameterization."""
