"""Exception hierarchy shared by the table, graph and inference layers."""


class SparseJTError(Exception):
    """Base class for every error raised by the package."""


class DomainError(SparseJTError, ValueError):
    """Unknown labels/states or conflicting state lists between tables."""


class CapacityError(SparseJTError, OverflowError):
    """A dense state space is too large to count or to allocate."""


class NormalizationError(SparseJTError, ValueError):
    """A table cannot be normalized, or a CPT does not sum to one."""


class NetworkError(SparseJTError, ValueError):
    """Invalid network structure (cycles, duplicate children, bad files)."""


class PhaseError(SparseJTError, RuntimeError):
    """A propagation step was requested in the wrong order."""


class ImpossibleEvidenceError(SparseJTError):
    """The entered evidence has probability zero."""

    def __init__(self, message="evidence has probability zero (p(e) = 0)"):
        super().__init__(message)
        self.p_evidence = 0.0
