"""Content-addressed on-disk cache for expensive results."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .io import content_hash


def default_root() -> Path:
    return Path(os.environ.get("MOTX_CACHE_DIR") or Path.home() / ".cache" / "motx")


class ResultCache:
    """JSON blobs stored under ``root/ab/abcdef...json`` keyed by a hash of the inputs."""

    def __init__(self, root: str | os.PathLike | None = None):
        self.root = Path(root) if root is not None else default_root()

    @staticmethod
    def key(**parts) -> str:
        return content_hash(parts)

    def path(self, key: str) -> Path:
        return self.root / key[:2] / (key + ".json")

    def get(self, key: str):
        p = self.path(key)
        try:
            with open(p) as fh:
                return json.load(fh)
        except (FileNotFoundError, json.JSONDecodeError):
            return None

    def put(self, key: str, value) -> Path:
        p = self.path(key)
        p.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=p.parent, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(value, fh, sort_keys=True)
            os.replace(tmp, p)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return p
