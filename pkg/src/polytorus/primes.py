"""Prime bases: the first d primes and their logarithms.

Every object in the library that touches the torus is indexed against a
``PrimeBasis``: coordinate j of the polytorus corresponds to the j-th prime.
Logs are computed once, in IEEE double precision, and reused everywhere so
that residual checks are bit-reproducible across call sites.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionError


def first_primes(count: int) -> tuple[int, ...]:
    """Return the first ``count`` primes by trial division."""
    if count < 0:
        raise ValueError(f"count must be nonnegative, got {count}")
    found: list[int] = []
    candidate = 2
    while len(found) < count:
        limit = math.isqrt(candidate)
        if all(candidate % p for p in found if p <= limit):
            found.append(candidate)
        candidate += 1 if candidate == 2 else 2
    return tuple(found)


class PrimeBasis:
    """The first ``dimension`` primes with precomputed natural logs.

    Instances are immutable and safe to share; two bases of equal dimension
    compare equal.
    """

    __slots__ = ("dimension", "primes", "logs")

    def __init__(self, dimension: int):
        if dimension < 1:
            raise DimensionError(f"basis dimension must be >= 1, got {dimension}")
        object.__setattr__(self, "dimension", int(dimension))
        object.__setattr__(self, "primes", first_primes(dimension))
        logs = np.array([math.log(p) for p in self.primes], dtype=np.float64)
        logs.setflags(write=False)
        object.__setattr__(self, "logs", logs)

    def __setattr__(self, name, value):
        raise AttributeError("PrimeBasis is immutable")

    def __eq__(self, other):
        return isinstance(other, PrimeBasis) and other.dimension == self.dimension

    def __hash__(self):
        return hash(("PrimeBasis", self.dimension))

    def __repr__(self):
        return f"PrimeBasis(dimension={self.dimension})"
