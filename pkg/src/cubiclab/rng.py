"""Deterministic, splittable randomness for all samplers and experiments.

Everything random in this package flows through :class:`Rng`, a thin wrapper
around numpy's counter-based Philox generator.  Same seed, same platform or
not, same output — experiments record the seed and are reproducible bit for
bit.  Child streams (``split``) are independent Philox keys derived from the
parent seed, so replicas can run in parallel without sharing state.
"""

from __future__ import annotations

import numpy as np

__all__ = ["Rng"]


class Rng:
    """Counter-based random generator with deterministic splitting.

    Args:
        seed: master seed (any int; folded into a 64-bit key).
        path: tuple of split indices, used internally by :meth:`split`.
    """

    def __init__(self, seed: int, path: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.path = path
        ss = np.random.SeedSequence(entropy=self.seed & ((1 << 64) - 1), spawn_key=path)
        self._gen = np.random.Generator(np.random.Philox(ss))

    def split(self, index: int) -> "Rng":
        """Independent child stream number `index` (deterministic)."""
        return Rng(self.seed, self.path + (int(index),))

    # -- basic draws --------------------------------------------------------

    def random(self) -> float:
        return float(self._gen.random())

    def uniform(self, lo: float, hi: float) -> float:
        return float(self._gen.uniform(lo, hi))

    def randint(self, n: int) -> int:
        """Uniform int in [0, n) for n fitting in 64 bits."""
        return int(self._gen.integers(0, n))

    def shuffle(self, seq: list) -> None:
        """In-place Fisher-Yates shuffle driven by this stream."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.randint(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def permutation(self, n: int) -> list[int]:
        out = list(range(n))
        self.shuffle(out)
        return out

    def choice_weighted(self, weights) -> int:
        """Index sampled proportionally to float `weights` (list or array)."""
        w = np.asarray(weights, dtype=float)
        total = w.sum()
        if not (total > 0):
            raise ValueError("weights must have positive total")
        r = self.random() * total
        acc = 0.0
        for i, wi in enumerate(w):
            acc += wi
            if r < acc:
                return i
        return len(w) - 1

    # -- exact big-integer draws --------------------------------------------

    def rand_below(self, n: int) -> int:
        """Uniform integer in [0, n) for arbitrary-precision n.

        Assembles 64-bit words and rejects the overshoot, so the result is
        exactly uniform (this is what the exact-count samplers rely on).
        """
        if n <= 0:
            raise ValueError("n must be positive")
        bits = n.bit_length()
        words = (bits + 63) // 64
        while True:
            x = 0
            for _ in range(words):
                hi = int(self._gen.integers(0, 1 << 32))
                lo = int(self._gen.integers(0, 1 << 32))
                x = (x << 64) | (hi << 32) | lo
            x &= (1 << bits) - 1
            if x < n:
                return x

    def geometric_trials(self, p_stop: float, cap: int) -> int:
        """Number of failures before the first success, capped (for retries)."""
        k = 0
        while k < cap and self.random() >= p_stop:
            k += 1
        return k
