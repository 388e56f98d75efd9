"""Reproducible random substreams keyed by integer coordinates.

Each substream is a Philox counter-based generator whose 128-bit key is
derived from (seed, *coords) with the SplitMix64 finaliser, so a block of
replicates always sees the same numbers no matter which worker runs it.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(z: int) -> int:
    z = (z + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix(seed: int, *coords: int) -> int:
    h = splitmix64(seed & MASK64)
    for c in coords:
        h = splitmix64(h ^ (c & MASK64))
    return h


def substream(seed: int, *coords: int) -> np.random.Generator:
    hi = mix(seed, *coords)
    lo = splitmix64(hi ^ GOLDEN)
    return np.random.Generator(np.random.Philox(key=(hi << 64) | lo))
