"""Seed-stream derivation.

Every random draw in the package comes from a generator derived from a
master seed plus a tuple of purpose tags, so adding parallelism or
reordering work never changes the draws of an existing stream.
"""

import hashlib

import numpy as np


def _tag_words(tag) -> tuple[int, ...]:
    if isinstance(tag, (int, np.integer)):
        if tag < 0:
            raise ValueError(f"seed tags must be nonnegative, got {tag}")
        words = []
        tag = int(tag)
        while True:
            words.append(tag & 0xFFFFFFFF)
            tag >>= 32
            if tag == 0:
                return tuple(words)
    if isinstance(tag, str):
        digest = hashlib.sha256(tag.encode("utf-8")).digest()
        return tuple(int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4))
    raise TypeError(f"seed tag must be int or str, got {type(tag).__name__}")


def seed_sequence(master_seed: int, *tags) -> np.random.SeedSequence:
    """Deterministic SeedSequence for (master seed, purpose tags)."""
    key: list[int] = []
    for tag in tags:
        key.extend(_tag_words(tag))
    return np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(key))


def generator(master_seed: int, *tags) -> np.random.Generator:
    """PCG64 generator on the derived stream."""
    return np.random.Generator(np.random.PCG64(seed_sequence(master_seed, *tags)))
