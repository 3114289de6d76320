"""Deterministic sub-stream seed derivation.

Sub-streams get independent 64-bit seeds from (master, label, index) via a
stable hash of the label mixed through splitmix64, so sweeps and layout
draws are reproducible regardless of execution order.
"""

from __future__ import annotations

import hashlib

_MASK = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def derive_seed(master: int, label: str, index: int = 0) -> int:
    """64-bit seed for the (label, index) sub-stream of a master seed."""
    if index < 0:
        raise ValueError(f"index must be >= 0, got {index}")
    digest = hashlib.sha256(f"{label}:{index}".encode()).digest()
    h = int.from_bytes(digest[:8], "little")
    return _splitmix64((master ^ h) & _MASK)
