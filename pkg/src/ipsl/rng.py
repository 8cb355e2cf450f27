"""Deterministic named random substreams.

One master seed fans out into independent PCG64 generators, one per
mechanism.  Keeping the streams separate means that disabling a mechanism
(or changing how many draws it makes) never perturbs the draws seen by the
others, so e.g. a zero-learning control run replays the exact same
environment as its learning counterpart.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError

STREAM_NAMES = (
    "environment",
    "perception",
    "routing",
    "selection",
    "outcomes",
    "evolution",
)

_MAX_SEED = 2**64


class RandomStreams:
    """Named, independently seeded generators derived from one master seed.

    Substreams are spawned from ``SeedSequence(seed)`` in the fixed order of
    ``STREAM_NAMES``, so identical seeds give identical streams on every
    platform.
    """

    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed < _MAX_SEED:
            raise ConfigurationError("seed must be an unsigned 64-bit integer")
        self.seed = seed
        children = np.random.SeedSequence(seed).spawn(len(STREAM_NAMES))
        self._streams = {
            name: np.random.Generator(np.random.PCG64(child))
            for name, child in zip(STREAM_NAMES, children)
        }

    def stream(self, name: str) -> np.random.Generator:
        try:
            return self._streams[name]
        except KeyError:
            raise KeyError(f"unknown stream {name!r}; expected one of {STREAM_NAMES}") from None

    @property
    def environment(self) -> np.random.Generator:
        return self._streams["environment"]

    @property
    def perception(self) -> np.random.Generator:
        return self._streams["perception"]

    @property
    def routing(self) -> np.random.Generator:
        return self._streams["routing"]

    @property
    def selection(self) -> np.random.Generator:
        return self._streams["selection"]

    @property
    def outcomes(self) -> np.random.Generator:
        return self._streams["outcomes"]

    @property
    def evolution(self) -> np.random.Generator:
        return self._streams["evolution"]
