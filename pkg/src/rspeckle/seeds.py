"""Deterministic seed derivation.

Python's builtin hash() is salted per process, so per-task seeds are derived
by hashing (master_seed, label, index) with SHA-256 and taking the first
8 bytes.  Identical inputs give identical streams on every platform, and the
label keeps independent purposes (diffuser, frame, window, restart) from
ever colliding, no matter how work is split across workers.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

DEFAULT_LABELS = ("diffuser", "frame", "window", "restart", "init")


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_labels: tuple = DEFAULT_LABELS

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError(f"master_seed must fit in 64 bits, got {self.master_seed}")


def derive_seed(spec: SeedSpec, label: str, index: int) -> int:
    """Pure 64-bit seed for (master_seed, label, index)."""
    if spec.stream_labels and label not in spec.stream_labels:
        raise ValueError(f"unknown seed stream label {label!r}")
    payload = f"{spec.master_seed:016x}|{label}|{index}".encode("utf-8")
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


def rng_for(spec: SeedSpec, label: str, index: int) -> np.random.Generator:
    """PCG64 generator seeded from derive_seed."""
    return np.random.Generator(np.random.PCG64(derive_seed(spec, label, index)))
