"""Exception hierarchy. Each class carries the process exit code used by the CLI."""


class SparseKFoldError(Exception):
    exit_code = 1


class IngestionError(SparseKFoldError, ValueError):
    """Malformed, inconsistent or duplicated input points."""

    exit_code = 2


class ResourceLimitError(SparseKFoldError, RuntimeError):
    """A configured size guard would be exceeded."""

    exit_code = 3


class VerificationError(SparseKFoldError, AssertionError):
    exit_code = 4
