"""Exception types shared across the package."""


class FiretwinError(Exception):
    """Base class for all package errors."""


# --- feed ingestion ---

class MalformedFeed(FiretwinError):
    """Feed document cannot be parsed in its declared format."""


class MissingField(FiretwinError):
    """A mapped source field is absent and no fallback applies."""


class StorageUnavailable(FiretwinError):
    """Incident store root is missing or not writable."""


# --- weather ---

class ProviderUnavailable(FiretwinError):
    """Weather provider unreachable and no cached sample applies."""


class OutOfCoverage(FiretwinError):
    """No weather sample near enough in space or time."""


# --- geometry ---

class OutOfFrame(FiretwinError):
    """Coordinates beyond the local frame's small-area validity."""


class HeaderMismatch(FiretwinError):
    """Terrain grid header inconsistent with its body."""


class NonNumericCell(FiretwinError):
    """Terrain grid body contains a non-numeric token."""


class EmptyExtent(FiretwinError):
    """Voxelization extent contains no cells or lies outside coverage."""


class DegeneratePolygon(FiretwinError):
    """Polygon ring has fewer than three vertices."""


# --- plume model ---

class NonPositiveDownwind(FiretwinError):
    """Dispersion coefficients are undefined at or behind the source."""


# --- voxel solver ---

class SourceOutsideDomain(FiretwinError):
    """Requested smoke source lies outside the simulation domain."""


class CFLViolation(FiretwinError):
    """Substepping cannot restore the CFL bound within the split limit."""


# --- validation ---

class NegativeInput(FiretwinError):
    """Concentration input below zero."""


class InsufficientBaseline(FiretwinError):
    """Sensor series does not cover the required pre-event baseline."""


# --- service ---

class UnknownCity(FiretwinError):
    """City identifier not present in the service configuration."""


class OutsideDomain(FiretwinError):
    """Scenario coordinates fall outside every configured city domain."""


class QueueFull(FiretwinError):
    """Bounded simulation queue cannot accept another job."""


class UnknownJob(FiretwinError):
    """Job identifier not present in the job index."""


class InvalidTransition(FiretwinError):
    """Job state change violates queued -> running -> done/failed."""
