"""Seeded random-number streams with a fixed derivation rule.

Every stochastic task in glassbench draws from a stream derived as

    Generator(PCG64(SeedSequence((seed, tag_1, tag_2, ...))))

where ``seed`` is a user-supplied 64-bit integer and each tag is either an
integer (used as-is) or a string (replaced by the first 8 bytes of its
SHA-256 digest, little-endian).  PCG64 seeded through SeedSequence is
bit-stable across platforms and numpy releases, so two runs with the same
seed and tags produce identical draws.  No two tasks share a stream as long
as their tag tuples differ.

The simulated-annealing and enumeration kernels additionally use SplitMix64
(see ``_kernels``) seeded from per-read words generated here.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["tag_to_int", "seed_sequence", "stream", "spawn_seeds"]


def tag_to_int(tag: int | str) -> int:
    """Map a stream tag to a non-negative integer (strings via SHA-256)."""
    if isinstance(tag, bool):  # guard: bool is an int subclass
        raise TypeError("stream tags must be ints or strings")
    if isinstance(tag, int):
        return tag & 0xFFFFFFFFFFFFFFFF
    if isinstance(tag, str):
        digest = hashlib.sha256(tag.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "little")
    raise TypeError(f"stream tags must be ints or strings, got {type(tag)!r}")


def seed_sequence(seed: int, *tags: int | str) -> np.random.SeedSequence:
    """SeedSequence for (seed, *tags) under the fixed derivation rule."""
    entropy = (seed & 0xFFFFFFFFFFFFFFFF,) + tuple(tag_to_int(t) for t in tags)
    return np.random.SeedSequence(entropy)


def stream(seed: int, *tags: int | str) -> np.random.Generator:
    """A PCG64 generator on the stream identified by (seed, *tags)."""
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, *tags)))


def spawn_seeds(n: int, seed: int, *tags: int | str) -> np.ndarray:
    """n uint64 child seeds drawn from the (seed, *tags) seed sequence.

    Used to hand one 64-bit word to each independent kernel invocation
    (e.g. one per simulated-annealing read).
    """
    return seed_sequence(seed, *tags).generate_state(n, dtype=np.uint64)
