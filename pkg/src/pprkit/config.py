"""Estimator configuration and the package's random stream."""

from dataclasses import dataclass, replace

import numpy as np

from ._validation import check_count, check_open_unit


@dataclass(frozen=True)
class EstimatorConfig:
    """Global constants shared by every estimator.

    Parameters
    ----------
    alpha : float
        Stopping probability of the discounted walk, in (0, 1).
    c : float
        Relative-error constant, in (0, 1/2).
    p_f : float
        Per-vertex failure probability, in (0, 1).
    delta : float
        Approximation threshold, in (0, 1].
    seed : int
        Master seed from which every run derives its stream.
    """

    alpha: float = 0.2
    c: float = 0.1
    p_f: float = 0.1
    delta: float = 0.1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_open_unit("alpha", self.alpha))
        object.__setattr__(self, "c", check_open_unit("c", self.c, upper=0.5))
        object.__setattr__(self, "p_f", check_open_unit("p_f", self.p_f))
        object.__setattr__(self, "delta", check_open_unit("delta", self.delta, closed_upper=True))
        object.__setattr__(self, "seed", check_count("seed", self.seed))

    def with_(self, **changes):
        return replace(self, **changes)


class RandomStream:
    """Seedable, splittable uniform stream.

    Draws come from a PCG64 generator keyed by ``SeedSequence((seed, *key))``
    and are buffered so that scalar draws in hot loops stay cheap.  Two
    streams built from the same ``(seed, *key)`` produce identical draws.
    """

    __slots__ = ("seed", "key", "_gen", "_buf", "_pos", "_block")

    def __init__(self, seed=0, *key, block=2048):
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)
        self._gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence((self.seed, *self.key))))
        self._block = block
        self._buf = []
        self._pos = 0

    def random(self):
        """Uniform float in [0, 1)."""
        pos = self._pos
        if pos == len(self._buf):
            self._buf = self._gen.random(self._block).tolist()
            pos = 0
        self._pos = pos + 1
        return self._buf[pos]

    def randbelow(self, k):
        """Uniform integer in [0, k)."""
        j = int(self.random() * k)
        return j if j < k else k - 1

    def spawn(self, *key):
        """Independent child stream keyed under this one."""
        return RandomStream(self.seed, *self.key, *key, block=self._block)


def trial_stream(seed, trial):
    """Stream for run ``trial`` under master ``seed``."""
    return RandomStream(seed, trial)
