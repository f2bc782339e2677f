"""Seeded random streams.

Every sampler in the package takes an explicit ``seed``; nothing touches a
global generator.  Streams use the counter-based Philox bit generator so that
derived streams (``(seed, step)``, ``(seed, job)``) are cheap and independent.
"""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

SeedLike = Union[int, Sequence[int], np.random.SeedSequence, np.random.Generator]


def make_rng(seed: SeedLike) -> np.random.Generator:
    """Return a Philox-backed generator for ``seed``.

    ``seed`` may be a non-negative int, a sequence of ints (hashed into one
    stream, e.g. ``(base_seed, step)``), a ``SeedSequence``, or an existing
    ``Generator`` which is returned unchanged.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def derive_seed(*parts: int) -> int:
    """Hash integer ``parts`` into a single 64-bit seed."""
    state = np.random.SeedSequence([int(p) & 0xFFFFFFFFFFFFFFFF for p in parts])
    return int(state.generate_state(1, dtype=np.uint64)[0])


def seed_entropy(seed: SeedLike):
    """Entropy usable to build a ``SeedSequence`` equivalent to ``seed``.

    Generators are consumed (one draw), so pass integers or sequences when
    reproducibility across calls matters.
    """
    if isinstance(seed, np.random.SeedSequence):
        return seed.entropy if not seed.spawn_key else [seed.entropy, *seed.spawn_key]
    if isinstance(seed, np.random.Generator):
        return int(seed.integers(0, 2**63))
    return seed
