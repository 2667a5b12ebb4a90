"""Counter-based random numbers (SplitMix64 keyed streams).

Every random value is a pure function of ``(key, counter)``::

    bits(key, i) = mix64(key + (i + 1) * 0x9E3779B97F4A7C15  mod 2**64)

    mix64(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
               z = (z ^ (z >> 27)) * 0x94D049BB133111EB
               return z ^ (z >> 31)

which is exactly the SplitMix64 output sequence for state ``key``. Streams are
split by key derivation, ``derive(key, i) = mix64(key ^ mix64((i + 1) * 0xD1B54A32D192ED03))``,
so a null draw, a Monte-Carlo repetition or a (sentence, layer, metric) cell
each get an independent stream that does not depend on evaluation order.

Derived variates:

* uniform in [0, 1): ``(bits >> 11) * 2**-53``
* normal: Box-Muller on consecutive counter pairs ``(2j, 2j+1)``, with
  ``u1 = ((bits(2j) >> 11) + 1) * 2**-53`` in (0, 1]; the pair yields the
  cosine branch at position ``2j`` and the sine branch at ``2j + 1``.
* permutation of n: Fisher-Yates, ``for i = n-1 .. 1: j = floor(u_k * (i + 1))``
  with ``u_k`` the k-th uniform of the stream, ``k = n-1-i``.
"""

from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_SPLIT = 0xD1B54A32D192ED03
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV53 = 2.0 ** -53


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    # uint64 array arithmetic wraps modulo 2**64
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def derive(key: int, index: int) -> int:
    return mix64((key & MASK64) ^ mix64(((index + 1) * _SPLIT) & MASK64))


def string_key(text: str) -> int:
    """Stable 64-bit integer for a string identifier (blake2b, little-endian)."""
    return int.from_bytes(hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest(), "little")


class CounterRNG:
    """A keyed stream with an advancing counter.

    ``CounterRNG(seed).child(3, 7)`` always names the same stream, and the
    n-th value drawn from it never depends on how the draws were batched.
    """

    def __init__(self, key: int, counter: int = 0):
        self.key = key & MASK64
        self.counter = counter

    def child(self, *indices: int) -> "CounterRNG":
        key = self.key
        for i in indices:
            key = derive(key, i)
        return CounterRNG(key)

    def bits(self, n: int) -> np.ndarray:
        idx = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        with np.errstate(over="ignore"):
            return _mix64_array(np.uint64(self.key) + idx * np.uint64(GOLDEN))

    def uniform(self, n: int) -> np.ndarray:
        return (self.bits(n) >> np.uint64(11)).astype(np.float64) * _INV53

    def normal(self, n: int) -> np.ndarray:
        pairs = (n + 1) // 2
        b = self.bits(2 * pairs)
        u1 = ((b[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * _INV53
        u2 = (b[1::2] >> np.uint64(11)).astype(np.float64) * _INV53
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        out = np.empty(2 * pairs)
        out[0::2] = r * np.cos(theta)
        out[1::2] = r * np.sin(theta)
        return out[:n]

    def permutation(self, n: int) -> np.ndarray:
        perm = list(range(n))
        if n < 2:
            return np.asarray(perm, dtype=np.intp)
        u = self.uniform(n - 1)
        for k, i in enumerate(range(n - 1, 0, -1)):
            j = int(u[k] * (i + 1))
            perm[i], perm[j] = perm[j], perm[i]
        return np.asarray(perm, dtype=np.intp)

    def choice_weighted(self, weights: np.ndarray) -> int:
        """Index drawn with probability proportional to ``weights`` (inverse CDF)."""
        cdf = np.cumsum(weights)
        total = cdf[-1]
        u = self.uniform(1)[0] * total
        return int(min(np.searchsorted(cdf, u, side="right"), len(cdf) - 1))

    def integer(self, n: int) -> int:
        return int(self.uniform(1)[0] * n)
