"""Deterministic seed derivation.

Every randomized stage draws from its own seed derived from the single
root seed and a short stage label, so adding or reordering stages never
perturbs the streams of the others.
"""

from __future__ import annotations

import hashlib


def derive_seed(root: int, label: str) -> int:
    """Derive a stage seed from the root seed and a stage label.

    Returns an unsigned 64-bit integer, stable across platforms and
    Python versions.
    """
    digest = hashlib.blake2b(f"{root}:{label}".encode("utf-8"), digest_size=8)
    return int.from_bytes(digest.digest(), "big")
