"""Seeded random streams.

Every stochastic step draws from an :class:`RngStream`. The default stream is
numpy's PCG64 bit generator, whose double output is specified bit-for-bit and
therefore identical across platforms for a given seed. All uniform draws go
through :meth:`RngStream.random`, so a recorded tape of raw draws can be replayed
with :class:`TapeRng`.
"""
import hashlib

import numpy as np


class RngStream:
    """Uniform random source backed by ``numpy.random.PCG64``."""

    def __init__(self, seed):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def random(self):
        """One uniform draw in [0, 1)."""
        return float(self._gen.random())

    def random_array(self, n):
        """``n`` uniform draws; same values as ``n`` calls to :meth:`random`."""
        return self._gen.random(n)

    def uniform(self, low, high):
        return low + (high - low) * self.random()

    def index(self, n):
        """A uniform integer in ``range(n)``, built from a single draw."""
        return min(int(self.random() * n), n - 1)

    def permutation(self, values):
        return self._gen.permutation(values)


class TapeRng(RngStream):
    """Replays a fixed sequence of raw uniform draws.

    Raises ``IndexError`` once the tape runs out, so tests notice draws they did
    not plan for.
    """

    def __init__(self, draws):
        self.seed = -1
        self._tape = [float(d) for d in draws]
        self._pos = 0

    def random(self):
        value = self._tape[self._pos]
        self._pos += 1
        return value

    def random_array(self, n):
        return np.array([self.random() for _ in range(n)])

    @property
    def remaining(self):
        return len(self._tape) - self._pos


def derive_seed(*parts):
    """Stable 64-bit seed from arbitrary printable parts (sha256 based)."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")
