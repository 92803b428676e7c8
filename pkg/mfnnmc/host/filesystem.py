"""Run-directory file helpers: directories, JSON documents, content hashes."""

import hashlib
import json
from pathlib import Path


def ensure_dir(path: str | Path) -> Path:
    """Create ``path`` (and parents) if missing and return it as a Path."""
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def write_json(path: str | Path, payload: dict) -> Path:
    """Write a JSON document with sorted keys, creating parent directories."""
    p = Path(path)
    ensure_dir(p.parent)
    p.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
    return p


def read_json(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def content_hash(payload: dict) -> str:
    """SHA-256 of a canonical JSON encoding of ``payload``.

    Used to tie checkpoints and results to the config echo they came from.
    """
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()
