"""Deterministic random-number plumbing.

All randomness in the package flows through numpy's PCG64 generator.  A
single 64-bit seed is split into independent per-purpose streams with
``numpy.random.SeedSequence`` so that, for example, parameter
initialization and mini-batch sampling never share a stream.  Identical
seeds always reproduce identical draw sequences.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed) -> np.random.Generator:
    """PCG64 generator for ``seed`` (an int or a SeedSequence)."""
    return np.random.Generator(np.random.PCG64(seed))


def split_streams(seed, count: int) -> list[np.random.Generator]:
    """Split ``seed`` into ``count`` independent generators.

    Stream k is derived from child k of ``SeedSequence(seed)``; the
    assignment of purposes to positions is fixed by the caller and must
    not be reordered once published.
    """
    children = np.random.SeedSequence(seed).spawn(count)
    return [make_rng(child) for child in children]


def derived_seed(*parts) -> int:
    """Collapse a tuple of integers into a single derived 64-bit seed.

    Used to give benchmark trials their own reproducible streams keyed
    on (root seed, noise index, trial, ...).  The entropy is prefixed
    with the part count because SeedSequence ignores trailing zero
    words, so (a, b) and (a, b, 0) would otherwise collide.
    """
    entropy = [len(parts), *parts]
    state = np.random.SeedSequence(entropy).generate_state(2, dtype=np.uint64)
    return int(state[0] ^ state[1])
