"""Exception hierarchy shared across the package."""


class ScanRigError(Exception):
    """Base class for all scanrig errors."""


class RangeError(ScanRigError):
    """Commanded angle or rail position outside the axis limits."""


class ConfigError(ScanRigError):
    """Invalid scan, source, or service configuration."""


class CheckpointError(ScanRigError):
    """Completion set is not a prefix of the plan."""


class DomainError(ScanRigError):
    """Physical parameter outside its valid domain."""


class RegistryError(ScanRigError):
    """Duplicate source name in a registry."""


class HardwareFault(ScanRigError):
    """Motor execution failed; pose reflects the steps completed."""


class ConflictError(ScanRigError):
    """run_id already in use."""


class OrderError(ScanRigError):
    """Record appended out of prefix order."""


class StorageError(ScanRigError):
    """I/O failure while persisting session data."""


class FormatError(ScanRigError):
    """Archive is corrupt or violates the documented layout."""


class BusyError(ScanRigError):
    """Operation not allowed while a run is active."""


class StateError(ScanRigError):
    """Illegal run phase transition."""


class NotFoundError(ScanRigError):
    """Unknown run_id."""


class EmptyError(ScanRigError):
    """Archive contains no measurements to analyze."""


class ShapeError(ScanRigError):
    """Archives being compared have different scan grids."""
