"""Seeded random streams.

All randomness in the package flows through numpy's Philox engine, a 64-bit
counter-based generator whose output is identical across platforms for a given
seed.  Independent substreams are derived from a master seed plus a list of
tags (strings or integers), so two call sites can never collide by accident
and any result can be reproduced from the master seed alone.
"""

import hashlib

import numpy as np

_MASK = (1 << 64) - 1


def _tag_to_int(tag):
    if isinstance(tag, (int, np.integer)):
        return int(tag) & _MASK
    if isinstance(tag, str):
        digest = hashlib.sha256(tag.encode("utf8")).digest()
        return int.from_bytes(digest[:8], "little")
    raise TypeError(f"rng tag must be str or int, got {type(tag).__name__}")


def substream(seed, *tags):
    """Return a Generator for the substream identified by (seed, *tags)."""
    entropy = [int(seed) & _MASK] + [_tag_to_int(t) for t in tags]
    return np.random.Generator(np.random.Philox(seed=np.random.SeedSequence(entropy)))
