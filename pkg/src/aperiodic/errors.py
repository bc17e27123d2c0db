"""Exception hierarchy shared by all subsystems."""


class AperiodicError(Exception):
    """Base class for all library errors."""


class SingularBasis(AperiodicError):
    """Lattice basis is not invertible (or |det| is below tolerance)."""


class InjectivityViolation(AperiodicError):
    """A nonzero integer vector projects to zero in physical space.

    The offending integer vector is stored in ``witness``.
    """

    def __init__(self, witness, message=None):
        self.witness = tuple(int(v) for v in witness)
        super().__init__(message or f"physical projection kills index {self.witness}")


class RegionTooLarge(AperiodicError):
    """Candidate index box exceeds the enumeration budget."""


class RegionTooSmall(AperiodicError):
    """The available patch does not cover the requested analysis range."""


class EpsilonOutOfRange(AperiodicError):
    """Almost-period threshold outside the valid range (0, 2*eta0)."""


class NotInL(AperiodicError):
    """A physical vector could not be resolved to a lattice index."""


class NotSchemeBacked(AperiodicError):
    """Operation requires lattice indices but the point set has none."""


class UnsupportedShape(AperiodicError):
    """Window geometry outside the supported shape classes."""


class UnsupportedDimension(AperiodicError):
    """Operation not implemented for this internal dimension."""


class ChainFailure(AperiodicError):
    """Stepping-stone chain construction ran out of usable points.

    ``step`` is the index of the chain element that failed.
    """

    def __init__(self, step, message=None):
        self.step = int(step)
        super().__init__(message or f"no nearby point for chain step {self.step}")


class UndefinedStatistic(AperiodicError):
    """Statistic undefined for the given input (e.g. fewer than two points)."""


class InsufficientData(AperiodicError):
    """Not enough data to produce a meaningful estimate."""


class ConfigError(AperiodicError):
    """Run configuration is malformed or inconsistent."""


class ParseError(AperiodicError):
    """Input file could not be parsed; ``line`` is 1-based."""

    def __init__(self, line, message):
        self.line = int(line)
        super().__init__(f"line {self.line}: {message}")


class DuplicatePoint(AperiodicError):
    """Ingested data contains a repeated point."""
