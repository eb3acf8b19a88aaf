"""Addressable random streams built on the counter-based Philox generator.

A stream is identified by ``(master_seed, stream_id)`` and nothing else, so
any piece of work (a Monte Carlo replication, a simulated signal) can be
given its own substream and reproduced in isolation, in any order, on any
number of workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """One named position in a family of independent random streams.

    The 128-bit Philox key packs ``master_seed`` into the low word and
    ``stream_id`` into the high word, so distinct ids give statistically
    independent sequences under the same master seed.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.master_seed, int) or isinstance(self.master_seed, bool):
            raise TypeError("master_seed must be an int")
        if not isinstance(self.stream_id, int) or isinstance(self.stream_id, bool):
            raise TypeError("stream_id must be an int")
        if self.master_seed < 0:
            raise ValueError("master_seed must be nonnegative")
        if self.stream_id < 0:
            raise ValueError("stream_id must be nonnegative")

    def generator(self) -> np.random.Generator:
        """Return a fresh generator positioned at the start of this stream.

        A new generator is created on every call: sampling through it never
        mutates the stream object, so repeated calls replay the same draws.
        """
        key = (self.master_seed & _MASK64) | ((self.stream_id & _MASK64) << 64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, offset: int) -> "RngStream":
        """Derive the stream ``offset`` positions after this one."""
        if offset < 0:
            raise ValueError("offset must be nonnegative")
        return RngStream(self.master_seed, (self.stream_id + offset) & _MASK64)
