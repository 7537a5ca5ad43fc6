"""Feed parsers: four source formats funneled into one normalizer.

Each format-specific reader extracts an ordered list of flat string
records; normalization (category whitelist, timestamp parsing, geocode
fallback, range checks) is shared. A record that cannot be normalized
is reported to the on_reject hook and skipped; only an unparseable
document is a hard error.
"""

from __future__ import annotations

import email.utils
import json
import logging
import xml.etree.ElementTree as ET
from datetime import datetime, timedelta, timezone
from html.parser import HTMLParser

from firetwin.errors import MalformedFeed, MissingField
from firetwin.ingest.geocode import Geocoder
from firetwin.ingest.models import FeedAdapterConfig, FireIncident, incident_id

log = logging.getLogger(__name__)

CLOCK_SKEW = timedelta(minutes=5)


def _as_text(raw) -> str:
    return raw.decode("utf-8", errors="replace") if isinstance(raw, bytes) else raw


# ------------------------------------------------------------- readers

def _read_json(text: str, config: FeedAdapterConfig) -> list[dict]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedFeed(f"{config.city}: invalid JSON: {exc}") from exc
    node = doc
    if config.records_path:
        for part in config.records_path.split("."):
            if not isinstance(node, dict) or part not in node:
                raise MalformedFeed(
                    f"{config.city}: records path {config.records_path!r} not found"
                )
            node = node[part]
    if not isinstance(node, list):
        raise MalformedFeed(f"{config.city}: feed root is not a record list")
    return [r for r in node if isinstance(r, dict)]


def _localname(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _read_rss(text: str, config: FeedAdapterConfig) -> list[dict]:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise MalformedFeed(f"{config.city}: invalid XML: {exc}") from exc
    items = [el for el in root.iter() if _localname(el.tag) == "item"]
    records = []
    for item in items:
        rec = {}
        for child in item:
            rec[_localname(child.tag)] = (child.text or "").strip()
        records.append(rec)
    return records


class _TableReader(HTMLParser):
    """First <table> in the document as header row + string cell rows."""

    def __init__(self):
        super().__init__()
        self.rows: list[list[str]] = []
        self._cell: list[str] | None = None
        self._row: list[str] | None = None
        self._table_depth = 0
        self._done = False

    def handle_starttag(self, tag, attrs):
        if self._done:
            return
        if tag == "table":
            self._table_depth += 1
        elif self._table_depth == 1:
            if tag == "tr":
                self._row = []
            elif tag in ("td", "th"):
                self._cell = []

    def handle_endtag(self, tag):
        if self._done:
            return
        if tag == "table" and self._table_depth:
            self._table_depth -= 1
            if self._table_depth == 0:
                self._done = True
        elif self._table_depth == 1:
            if tag in ("td", "th") and self._cell is not None:
                assert self._row is not None
                self._row.append("".join(self._cell).strip())
                self._cell = None
            elif tag == "tr" and self._row is not None:
                self.rows.append(self._row)
                self._row = None

    def handle_data(self, data):
        if self._cell is not None:
            self._cell.append(data)


def _read_html_table(text: str, config: FeedAdapterConfig) -> list[dict]:
    reader = _TableReader()
    reader.feed(text)
    if not reader.rows:
        raise MalformedFeed(f"{config.city}: no table found in document")
    header = [h.strip().lower() for h in reader.rows[0]]
    records = []
    for row in reader.rows[1:]:
        if not any(cell for cell in row):
            continue
        records.append({h: row[i] if i < len(row) else "" for i, h in enumerate(header)})
    return records


def _read_plain_text(text: str, config: FeedAdapterConfig) -> list[dict]:
    records = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tokens = [t.strip() for t in line.split(config.delimiter)]
        records.append({str(i): tok for i, tok in enumerate(tokens)})
    return records


_READERS = {
    "json": _read_json,
    "rss": _read_rss,
    "html_table": _read_html_table,
    "plain_text": _read_plain_text,
}


# --------------------------------------------------------- normalizing

def _source_value(record: dict, source_key) -> str:
    key = str(source_key)
    if ":" in key:
        base, _, index = key.rpartition(":")
        if index.isdigit() and base in record:
            tokens = str(record[base]).split()
            i = int(index)
            if i < len(tokens):
                return tokens[i]
            raise MissingField(f"{base!r} has no token {i}")
    if key not in record or str(record[key]).strip() == "":
        raise MissingField(f"source field {source_key!r} absent")
    return str(record[key]).strip()


def _parse_timestamp(value: str, fmt: str) -> datetime:
    if fmt == "rfc822":
        ts = email.utils.parsedate_to_datetime(value)
    elif fmt == "iso8601":
        ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    else:
        ts = datetime.strptime(value, fmt)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _default_reject(record: dict, reason: str) -> None:
    log.warning("record rejected: %s (%r)", reason, record)


def parse_feed(
    raw,
    config: FeedAdapterConfig,
    fetch_time: datetime | None = None,
    geocoder: Geocoder | None = None,
    on_reject=None,
) -> list[FireIncident]:
    """All fire-category records of a feed document, source order kept.

    Non-fire records are filtered by the category whitelist. Records
    with missing or invalid mapped fields go to on_reject(record,
    reason) and are skipped.
    """
    if fetch_time is None:
        fetch_time = datetime.now(timezone.utc)
    elif fetch_time.tzinfo is None:
        fetch_time = fetch_time.replace(tzinfo=timezone.utc)
    if on_reject is None:
        on_reject = _default_reject

    records = _READERS[config.format](_as_text(raw), config)
    fmap = config.field_map
    out = []
    for rec in records:
        try:
            name = _source_value(rec, fmap["name"])
        except MissingField as exc:
            on_reject(rec, str(exc))
            continue
        low = name.lower()
        if not any(cat.lower() in low for cat in config.categories):
            continue

        try:
            ts = _parse_timestamp(_source_value(rec, fmap["timestamp"]), config.datetime_format)
            if ts > fetch_time + CLOCK_SKEW:
                raise MissingField(f"timestamp {ts.isoformat()} is in the future")
            address = _source_value(rec, fmap["address"])
            department = _source_value(rec, fmap["department"])
            lat = lon = None
            try:
                lat = float(_source_value(rec, fmap["lat"])) if "lat" in fmap else None
                lon = float(_source_value(rec, fmap["lon"])) if "lon" in fmap else None
            except (MissingField, ValueError):
                lat = lon = None
            if lat is None or lon is None:
                if config.geocode_fallback and geocoder is not None:
                    hit = geocoder.geocode(address, config.city)
                    if hit is None:
                        raise MissingField(f"no coordinates and geocoder missed {address!r}")
                    lat, lon = hit
                else:
                    raise MissingField("no coordinates and no geocode fallback")
            incident = FireIncident(
                id=incident_id(config.city, name, ts, address),
                city=config.city,
                name=name,
                timestamp=ts,
                lat=lat,
                lon=lon,
                address=address,
                department=department,
            )
        except (MissingField, ValueError) as exc:
            on_reject(rec, str(exc))
            continue
        out.append(incident)
    return out
