"""Deterministic derivation of subordinate random streams from a master seed.

Each consumer asks for a stream by ``(master, tag, index)``. Streams for
different tags are independent, so adding a new consumer never shifts the
randomness seen by an existing one.
"""
from __future__ import annotations

import hashlib

import numpy as np


def _tag_word(tag: str) -> int:
    digest = hashlib.blake2b(tag.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def derive_seed(master: int, tag: str, *index: int) -> np.random.SeedSequence:
    """Return the seed sequence for stream ``tag[index...]`` under ``master``."""
    if master < 0 or any(i < 0 for i in index):
        raise ValueError("seeds and indices must be non-negative")
    return np.random.SeedSequence([int(master), _tag_word(tag), *map(int, index)])


def derive_rng(master: int, tag: str, *index: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, tag, *index))


def derive_int(master: int, tag: str, *index: int) -> int:
    """A 63-bit integer seed for APIs that take a plain integer."""
    word = derive_seed(master, tag, *index).generate_state(1, np.uint64)[0]
    return int(word) >> 1
