"""Disk persistence for computed recursion levels.

One file per (symbol fingerprint, level, full|top) key, written atomically:
a JSON header line identifying the container format and the key, then a
pickled {j: {alpha: frozen terms}} payload.  A header that does not match
what the caller asked for is treated as a miss, never deserialized, so a
stale or foreign file can cost a recompute but not poison a run.

The cache directory is chosen explicitly by the caller; resolve_cache_dir
implements the command-line precedence (flag, then RWHEAT_CACHE_DIR, else
caching stays off).
"""

from __future__ import annotations

import json
import os
import pickle
import tempfile
from pathlib import Path

_MAGIC = "rwheat-level-cache"
_VERSION = 1


def resolve_cache_dir(flag_value=None):
    """Cache directory: explicit flag, then RWHEAT_CACHE_DIR, else None
    (caching disabled; nothing is written outside a configured directory)."""
    if flag_value:
        return Path(flag_value)
    env = os.environ.get("RWHEAT_CACHE_DIR")
    if env:
        return Path(env)
    return None


class LevelCache:
    def __init__(self, directory):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0

    def _path(self, key: str) -> Path:
        return self.dir / f"{key}.lvl"

    def load(self, key: str):
        path = self._path(key)
        try:
            blob = path.read_bytes()
        except OSError:
            self.misses += 1
            return None
        nl = blob.find(b"\n")
        if nl < 0:
            self.misses += 1
            return None
        try:
            header = json.loads(blob[:nl])
        except ValueError:
            self.misses += 1
            return None
        if (
            header.get("magic") != _MAGIC
            or header.get("version") != _VERSION
            or header.get("key") != key
        ):
            self.misses += 1
            return None
        try:
            levels = pickle.loads(blob[nl + 1 :])
        except Exception:
            # matching header but damaged payload: recompute rather than die
            self.misses += 1
            return None
        self.hits += 1
        return levels

    def save(self, key: str, levels: dict):
        header = json.dumps(
            {"magic": _MAGIC, "version": _VERSION, "key": key}
        ).encode()
        payload = pickle.dumps(levels, protocol=4)
        fd, tmp = tempfile.mkstemp(dir=self.dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as f:
                f.write(header)
                f.write(b"\n")
                f.write(payload)
            os.replace(tmp, self._path(key))
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise
