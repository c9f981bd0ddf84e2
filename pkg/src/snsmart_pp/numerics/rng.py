"""Reproducible random-number substreams.

An ``RngStream`` is a value: ``(seed, stream_id, path)`` names a PCG64 stream
through numpy's ``SeedSequence`` spawn keys, so the same triple yields the same
draws on every platform and no matter which thread consumes it.  Studies key
``stream_id`` by replication index and use ``child`` to hand each consumer
inside a replication its own substream.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError

_U64 = 2**64


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0
    path: tuple = ()

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if int(v) != v or not 0 <= int(v) < _U64:
                raise DomainError(f"{name} must be a 64-bit unsigned integer, got {v!r}")
        if any(int(p) != p or p < 0 for p in self.path):
            raise DomainError(f"substream path must hold non-negative integers, got {self.path!r}")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "stream_id", int(self.stream_id))
        object.__setattr__(self, "path", tuple(int(p) for p in self.path))

    def child(self, index):
        """Substream ``index`` of this stream; children never overlap their parent."""
        return RngStream(self.seed, self.stream_id, self.path + (index,))

    def generator(self):
        """A fresh ``numpy.random.Generator`` positioned at the start of the stream."""
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,) + self.path)
        return np.random.Generator(np.random.PCG64(ss))


def as_generator(rng):
    """Accept an ``RngStream`` or an existing ``Generator``."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def _positive(name, v):
    if not (np.isfinite(v) and v > 0):
        raise DomainError(f"{name} must be positive and finite, got {v!r}")


def sample_beta(a, b, rng):
    _positive("a", a)
    _positive("b", b)
    return float(rng.beta(a, b))


def sample_gamma(shape, rate, rng):
    """Gamma draw parameterised by shape and *rate* (mean shape / rate)."""
    _positive("shape", shape)
    _positive("rate", rate)
    return float(rng.gamma(shape, 1.0 / rate))


def sample_bernoulli(p, rng):
    # u < p with u in [0, 1): p=0 is always False and p=1 always True
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"Bernoulli probability must lie in [0, 1], got {p!r}")
    return bool(rng.random() < p)


def sample_uniform_choice(options, rng):
    options = list(options)
    if not options:
        raise DomainError("cannot choose from an empty set")
    return options[int(rng.integers(len(options)))]
