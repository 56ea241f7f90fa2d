"""Deterministic RNG substreams keyed by simulation coordinates.

Every (seed, scenario, neighborhood, year) owns an independent generator,
so results are identical no matter how work is scheduled across threads.
"""

from __future__ import annotations

import hashlib

import numpy as np


def token_to_int(token: str | int) -> int:
    """Stable 64-bit integer identity for a stream token."""
    if isinstance(token, int):
        return token & 0xFFFFFFFFFFFFFFFF
    digest = hashlib.sha256(token.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def substream(seed: int, *tokens: str | int) -> np.random.Generator:
    """Generator for the substream addressed by (seed, *tokens)."""
    entropy = [seed & 0xFFFFFFFFFFFFFFFF] + [token_to_int(t) for t in tokens]
    return np.random.default_rng(np.random.SeedSequence(entropy))
