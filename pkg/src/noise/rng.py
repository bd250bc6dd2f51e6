"""
Counter-based random streams

Every replication owns a stream keyed by (seed, stream_id), so results do not
depend on how replications are split across workers.
"""

from typing import Sequence, Union

import numpy as np

_MASK64 = (1 << 64) - 1


class RngStream:
    """Philox stream keyed by a 64-bit seed and a 64-bit stream id"""

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        self._bit_generator = np.random.Philox(key=self.seed | (self.stream_id << 64))
        self._generator = np.random.Generator(self._bit_generator)

    @property
    def counter(self) -> int:
        """Position of the underlying Philox counter"""
        words = self._bit_generator.state['state']['counter']
        return sum(int(w) << (64 * i) for i, w in enumerate(words))

    def standard_normal(self, size) -> np.ndarray:
        return self._generator.standard_normal(size)

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        return self._generator.uniform(low, high, size)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


RngLike = Union[RngStream, Sequence[RngStream]]


def streams_for(seed: int, start: int, stop: int, tag: int = 0):
    """One stream per replication index in [start, stop); tag separates experiment stages"""
    return [RngStream(seed, (tag << 40) | rep) for rep in range(start, stop)]


def standard_normals(rng: RngLike, size: int) -> np.ndarray:
    """
    Draw standard normals from one stream or one row per stream

    Args:
        rng: A single RngStream (1-D result) or a sequence of them (2-D result)
        size: Draws per stream

    Returns:
        Array of shape (size,) or (len(rng), size)
    """
    if isinstance(rng, RngStream):
        return rng.standard_normal(size)
    return np.stack([r.standard_normal(size) for r in rng]) if len(rng) else np.empty((0, size))
