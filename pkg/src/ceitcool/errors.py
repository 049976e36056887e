"""Exception types shared across the package."""

from __future__ import annotations


class CeitcoolError(Exception):
    """Base class for all errors raised by this package."""


class ParameterFileError(CeitcoolError):
    """Parameter file or override is malformed (unknown key, bad value)."""


class PoleError(CeitcoolError):
    """An evaluation point sits on (or too close to) a dressed-state pole."""

    def __init__(self, message: str, factor: str | None = None):
        super().__init__(message)
        self.factor = factor


class PreconditionError(CeitcoolError):
    """A closed-form expression was requested outside its regime of validity."""


class HeatingError(CeitcoolError):
    """No stationary phonon distribution exists (net heating, Gamma <= 0)."""


class NoRootError(CeitcoolError):
    """A root search found no solution in the supplied interval."""


class TruncationError(CeitcoolError):
    """Population leaked into the top of a truncated ladder beyond the cap."""


class DimensionError(CeitcoolError):
    """Requested Hilbert-space truncation exceeds the configured bound."""


class IntegrationError(CeitcoolError):
    """A master-equation integration failed to converge."""


class FitError(CeitcoolError):
    """A trajectory fit did not reach the required quality."""


class HeatingWarning(UserWarning):
    """The rate set describes net heating; returned values grow without bound."""
