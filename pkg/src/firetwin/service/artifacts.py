"""Content-addressed artifact store.

Artifacts are keyed by the sha256 of their bytes, so identical
simulation outputs land on the same file and storing is idempotent.
Files live under root/objects/<first two hex chars>/<digest>.<ext> to
keep directory fanout bounded.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
from pathlib import Path

ARTIFACT_KINDS = ("kml", "geojson", "obj", "grid", "json")

CONTENT_TYPES = {
    "kml": "application/vnd.google-earth.kml+xml",
    "geojson": "application/geo+json",
    "obj": "text/plain; charset=utf-8",
    "grid": "application/octet-stream",
    "json": "application/json",
}


class ArtifactStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        (self.root / "objects").mkdir(parents=True, exist_ok=True)

    def _path(self, digest: str, kind: str) -> Path:
        return self.root / "objects" / digest[:2] / f"{digest}.{kind}"

    def put(self, data: bytes, kind: str) -> str:
        """Store bytes, returning their content digest. Re-putting the
        same bytes is a no-op that returns the same digest."""
        if kind not in ARTIFACT_KINDS:
            raise ValueError(f"artifact kind {kind!r} not one of {ARTIFACT_KINDS}")
        if not isinstance(data, bytes):
            raise TypeError(f"artifact payload must be bytes, got {type(data).__name__}")
        digest = hashlib.sha256(data).hexdigest()
        path = self._path(digest, kind)
        if path.exists():
            return digest
        path.parent.mkdir(parents=True, exist_ok=True)
        # Temp file plus rename so a crashed write never leaves a
        # half-written object under its final name.
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp, path)
        except OSError:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return digest

    def get(self, digest: str, kind: str) -> bytes:
        path = self._path(digest, kind)
        try:
            return path.read_bytes()
        except OSError:
            raise KeyError(f"no {kind} artifact {digest}") from None

    def has(self, digest: str, kind: str) -> bool:
        return self._path(digest, kind).exists()

    def path_for(self, digest: str, kind: str) -> Path:
        """Filesystem location of a stored artifact (for streaming)."""
        path = self._path(digest, kind)
        if not path.exists():
            raise KeyError(f"no {kind} artifact {digest}")
        return path
