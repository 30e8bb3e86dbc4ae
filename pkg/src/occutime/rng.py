"""Counter-based splittable random number generator.

Every sampler in the package draws from streams of the form
``value(key, counter) = mix64(key + GOLDEN * (counter + 1))`` where ``mix64``
is the 64-bit finalizer of SplitMix64. A stream is therefore a pure function
of its key: batches and paths own independent keys derived by hashing
(parent_key, child_index), and results never depend on scheduling, thread
count, or how many values a neighbouring stream consumed.

The same integer recurrence is implemented three times: in Python ints
(scalar), in numpy uint64 (bulk), and in the compiled kernel. All three
produce identical bits for identical (key, counter) pairs.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
#: 2**-53; maps the top 53 bits of a word into (0, 1].
_INV53 = 1.0 / 9007199254740992.0

_U64_GOLDEN = np.uint64(GOLDEN)
_U64_MIX1 = np.uint64(_MIX1)
_U64_MIX2 = np.uint64(_MIX2)
_U64_1 = np.uint64(1)


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int (wrapping at 64 bits)."""
    z &= MASK64
    z ^= z >> 30
    z = (z * _MIX1) & MASK64
    z ^= z >> 27
    z = (z * _MIX2) & MASK64
    z ^= z >> 31
    return z


def stream_value(key: int, counter: int) -> int:
    """The ``counter``-th 64-bit word of the stream with the given key."""
    return mix64((key + GOLDEN * (counter + 1)) & MASK64)


def derive_key(key: int, index: int) -> int:
    """Split a stream: key of the ``index``-th child stream."""
    return stream_value(key, index)


def uniform(key: int, counter: int) -> float:
    """One double, uniform on (0, 1] so that log() is always finite."""
    return ((stream_value(key, counter) >> 11) + 1) * _INV53


def _bulk_mix64(z: np.ndarray) -> np.ndarray:
    z = z.copy()
    z ^= z >> np.uint64(30)
    z *= _U64_MIX1
    z ^= z >> np.uint64(27)
    z *= _U64_MIX2
    z ^= z >> np.uint64(31)
    return z


def bulk_stream_values(keys: np.ndarray, counters: np.ndarray) -> np.ndarray:
    """Vectorized ``stream_value`` over uint64 arrays (broadcasting)."""
    keys = np.asarray(keys, dtype=np.uint64)
    counters = np.asarray(counters, dtype=np.uint64)
    return _bulk_mix64(keys + _U64_GOLDEN * (counters + _U64_1))


def bulk_uniforms(keys: np.ndarray, counters: np.ndarray) -> np.ndarray:
    """Vectorized ``uniform`` over uint64 arrays (broadcasting)."""
    z = bulk_stream_values(keys, counters)
    return ((z >> np.uint64(11)) + _U64_1) * _INV53


def bulk_derive_keys(key: int, indices: np.ndarray) -> np.ndarray:
    """Vectorized ``derive_key`` for an array of child indices."""
    return bulk_stream_values(np.uint64(key & MASK64), np.asarray(indices, dtype=np.uint64))


def uniforms_from(key: int, count: int, offset: int = 0) -> np.ndarray:
    """``count`` consecutive uniforms of one stream starting at ``offset``."""
    counters = np.arange(offset, offset + count, dtype=np.uint64)
    return bulk_uniforms(np.uint64(key & MASK64), counters)


def normals_from(key: int, count: int) -> np.ndarray:
    """``count`` standard normals via Box-Muller, two uniforms per normal.

    Normal ``i`` consumes counters ``2i`` and ``2i + 1``, so the draw is a
    pure function of (key, i) like everything else here.
    """
    # interleaved counters: u1 at even positions, u2 at odd
    even = np.arange(0, 2 * count, 2, dtype=np.uint64)
    odd = even + _U64_1
    k = np.uint64(key & MASK64)
    u1 = bulk_uniforms(k, even)
    u2 = bulk_uniforms(k, odd)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


class Stream:
    """Sequential view of one counter-based stream."""

    __slots__ = ("key", "counter")

    def __init__(self, key: int):
        self.key = key & MASK64
        self.counter = 0

    def next_uniform(self) -> float:
        u = uniform(self.key, self.counter)
        self.counter += 1
        return u

    def spawn(self, index: int) -> "Stream":
        """Independent child stream; does not advance this one."""
        return Stream(derive_key(self.key, index))

    def __repr__(self):
        return f"Stream(key=0x{self.key:016x}, counter={self.counter})"
