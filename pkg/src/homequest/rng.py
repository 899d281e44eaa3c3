"""Deterministic random streams.

All sampling in the pipeline goes through named substreams derived from a
64-bit seed with BLAKE2b, so each stage draws from its own independent stream
and corpora are bit-reproducible across runs and platforms (the underlying
generator is Python's Mersenne Twister, which is stable cross-platform).
"""

from __future__ import annotations

import hashlib
import random
from typing import Sequence, TypeVar

T = TypeVar("T")


def substream(seed: int, *labels: object) -> random.Random:
    """A PRNG for the substream identified by ``labels`` under ``seed``."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(seed)).encode())
    for label in labels:
        h.update(b"/")
        h.update(str(label).encode())
    return random.Random(int.from_bytes(h.digest(), "big"))


def pick(rng: random.Random, seq: Sequence[T]) -> T:
    if not seq:
        raise ValueError("cannot pick from an empty sequence")
    return seq[rng.randrange(len(seq))]


def pick_weighted(rng: random.Random, items: Sequence[T], weights: Sequence[float]) -> T:
    total = float(sum(weights))
    if total <= 0:
        raise ValueError("weights must sum to a positive number")
    r = rng.random() * total
    acc = 0.0
    for item, w in zip(items, weights):
        acc += w
        if r < acc:
            return item
    return items[-1]


def sample_distinct(rng: random.Random, seq: Sequence[T], k: int) -> list[T]:
    """k distinct elements, order-stable Fisher-Yates prefix."""
    if k > len(seq):
        raise ValueError(f"cannot sample {k} distinct items from {len(seq)}")
    pool = list(seq)
    out = []
    for _ in range(k):
        i = rng.randrange(len(pool))
        out.append(pool.pop(i))
    return out
