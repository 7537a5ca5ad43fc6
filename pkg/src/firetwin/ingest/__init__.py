from firetwin.ingest.geocode import FixtureGeocoder, Geocoder
from firetwin.ingest.models import (
    ActiveDelta,
    FeedAdapterConfig,
    FireIncident,
    adapter_from_dict,
    diff_active,
    incident_id,
    load_adapters,
)
from firetwin.ingest.parsers import parse_feed
from firetwin.ingest.store import IncidentStore

__all__ = [
    "ActiveDelta",
    "FeedAdapterConfig",
    "FireIncident",
    "FixtureGeocoder",
    "Geocoder",
    "IncidentStore",
    "adapter_from_dict",
    "diff_active",
    "incident_id",
    "load_adapters",
    "parse_feed",
]
