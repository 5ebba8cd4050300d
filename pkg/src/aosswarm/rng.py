"""Seeded, splittable random streams.

Every stream is fully determined by a 64-bit seed plus a tuple of integer
keys (its "path"), so any consumer -- a run, a particle, the scene builder --
can own an independent stream that is reproduced exactly from the seed alone.
"""

from __future__ import annotations

import zlib

import numpy as np


def _key_to_int(key) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode("utf-8"))
    return int(key)


class RngStream:
    """A named PCG64 stream; equal (seed, path) means equal draw sequence."""

    def __init__(self, seed: int, path: tuple = ()):
        self.seed = int(seed)
        self.path = tuple(_key_to_int(k) for k in path)
        seq = np.random.SeedSequence([self.seed & 0xFFFFFFFFFFFFFFFF, *self.path])
        self._gen = np.random.Generator(np.random.PCG64(seq))

    def split(self, *keys) -> "RngStream":
        """Derive an independent child stream; same keys give the same child."""
        return RngStream(self.seed, self.path + keys)

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        return self._gen.uniform(low, high, size)

    def unit_vector(self) -> np.ndarray:
        """Uniformly random direction on the unit circle."""
        theta = self._gen.uniform(0.0, 2.0 * np.pi)
        return np.array([np.cos(theta), np.sin(theta)])


class SwarmRng:
    """Per-run RNG bundle: a root stream plus one child stream per particle.

    Particle i always draws from the same child stream regardless of what the
    other particles do, which keeps runs reproducible and comparable.
    """

    def __init__(self, seed: int, n: int):
        self.seed = int(seed)
        self.root = RngStream(seed)
        self.particles = [self.root.split("particle", i) for i in range(n)]
