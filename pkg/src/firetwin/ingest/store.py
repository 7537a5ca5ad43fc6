"""Append-only per-city, per-day incident persistence.

Layout: <root>/<city>/<YYYY>/<MM>/<DD> holds one JSON document per
line. Appends are idempotent by incident id and serialized per file;
rejected raw records land in a sibling <DD>.rejects file.
"""

from __future__ import annotations

import json
import threading
from collections import defaultdict
from datetime import datetime, timezone
from pathlib import Path

from firetwin.errors import StorageUnavailable
from firetwin.ingest.models import FireIncident


class IncidentStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._locks: dict[Path, threading.Lock] = defaultdict(threading.Lock)
        self._locks_guard = threading.Lock()
        self._known_ids: dict[Path, set] = {}

    def day_path(self, city: str, when: datetime) -> Path:
        t = when.astimezone(timezone.utc) if when.tzinfo else when
        return self.root / city / f"{t.year:04d}" / f"{t.month:02d}" / f"{t.day:02d}"

    def _lock_for(self, path: Path) -> threading.Lock:
        with self._locks_guard:
            return self._locks[path]

    def _ids_in(self, path: Path) -> set:
        if path not in self._known_ids:
            ids = set()
            if path.exists():
                for line in path.read_text().splitlines():
                    if line.strip():
                        ids.add(json.loads(line)["id"])
            self._known_ids[path] = ids
        return self._known_ids[path]

    def append(self, incident: FireIncident) -> Path:
        """Persist one incident; re-appending the same id is a no-op."""
        path = self.day_path(incident.city, incident.timestamp)
        with self._lock_for(path):
            try:
                ids = self._ids_in(path)
                if incident.id in ids:
                    return path
                path.parent.mkdir(parents=True, exist_ok=True)
                with path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(incident.to_json(), sort_keys=True) + "\n")
                ids.add(incident.id)
            except OSError as exc:
                raise StorageUnavailable(f"cannot append to {path}: {exc}") from exc
        return path

    def append_many(self, incidents) -> list[Path]:
        return [self.append(i) for i in incidents]

    def read_day(self, city: str, when: datetime) -> list[FireIncident]:
        path = self.day_path(city, when)
        if not path.exists():
            return []
        try:
            lines = path.read_text().splitlines()
        except OSError as exc:
            raise StorageUnavailable(f"cannot read {path}: {exc}") from exc
        return [FireIncident.from_json(json.loads(ln)) for ln in lines if ln.strip()]

    def read_range(self, city: str, start: datetime, end: datetime) -> list[FireIncident]:
        """All records with day files between start and end inclusive."""
        out = []
        day = start.astimezone(timezone.utc) if start.tzinfo else start
        end_u = end.astimezone(timezone.utc) if end.tzinfo else end
        from datetime import timedelta

        day = day.replace(hour=0, minute=0, second=0, microsecond=0)
        while day <= end_u:
            out.extend(self.read_day(city, day))
            day += timedelta(days=1)
        return out

    def quarantine(self, city: str, when: datetime, record: dict, reason: str) -> Path:
        path = self.day_path(city, when).with_suffix(".rejects")
        with self._lock_for(path):
            try:
                path.parent.mkdir(parents=True, exist_ok=True)
                with path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps({"reason": reason, "record": record}) + "\n")
            except OSError as exc:
                raise StorageUnavailable(f"cannot quarantine to {path}: {exc}") from exc
        return path
