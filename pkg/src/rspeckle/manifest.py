"""Plain-text run manifests: one "key = value" per line.

Every output file is recorded with its SHA-256 content hash so identical
configs can be verified to reproduce identical results byte for byte.
"""

from __future__ import annotations

import hashlib
from pathlib import Path


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


class RunManifest:
    def __init__(self, toolkit_version: str):
        self.entries: list[tuple[str, str]] = [("toolkit.version", toolkit_version)]

    def add(self, key: str, value) -> None:
        self.entries.append((key, str(value)))

    def add_config(self, items) -> None:
        for key, value in items:
            self.add(f"config.{key}", value)

    def add_output(self, name: str, path, base_dir=None) -> None:
        path = Path(path)
        shown = path.relative_to(base_dir) if base_dir else path
        self.add(f"file.{name}", shown)
        self.add(f"hash.{name}", sha256_file(path))

    def write(self, path) -> None:
        lines = [f"{key} = {value}" for key, value in self.entries]
        Path(path).write_text("\n".join(lines) + "\n")


def read_manifest(path) -> dict:
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#") or "=" not in line:
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        out[key] = value
    return out
