"""
Content digests for run manifests.

Input files and configuration payloads are reduced to SHA-1 hex digests so that a run
manifest identifies exactly what a study consumed and produced.
"""

import hashlib
import json
from pathlib import Path
from typing import Any

from gep_planner.common.logging_config import setup_logger

# Configure logging
log = setup_logger(__name__)

_CHUNK_SIZE = 1 << 16


def file_digest(file_path: Path) -> str:
    """SHA-1 of a file's bytes, read in chunks."""
    digest = hashlib.sha1()
    with open(file_path, "rb") as f:
        for chunk in iter(lambda: f.read(_CHUNK_SIZE), b""):
            digest.update(chunk)
    return digest.hexdigest()


def directory_digests(directory: Path) -> dict[str, str]:
    """Digest every data file below `directory`, keyed by relative path."""
    digests = {}
    for path in sorted(directory.rglob("*")):
        if path.is_file() and path.suffix.lower() in (".csv", ".parquet", ".toml"):
            digests[path.relative_to(directory).as_posix()] = file_digest(path)
    log.debug(f"Digested {len(digests)} files under {directory}")
    return digests


def payload_digest(payload: Any) -> str:
    """Digest of a JSON-serializable payload using canonical key order."""
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha1(text.encode()).hexdigest()
