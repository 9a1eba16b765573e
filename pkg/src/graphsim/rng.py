"""Seeded random-number streams.

All randomness flows through counter-based bit generators so that a trial
replays bit-exactly across platforms.  Streams are keyed by
(master_seed, *stream_key) via numpy's SeedSequence spawning.
"""

from __future__ import annotations

import numpy as np

ALGORITHMS = ("philox", "pcg64")
DEFAULT_ALGORITHM = "philox"


def _bit_generator(name: str, seed_seq: np.random.SeedSequence) -> np.random.BitGenerator:
    if name == "philox":
        return np.random.Philox(seed_seq)
    if name == "pcg64":
        return np.random.PCG64(seed_seq)
    raise ValueError(f"unknown rng algorithm {name!r}; choose from {ALGORITHMS}")


def make_generator(
    seed: int | np.random.Generator,
    *stream_key: int,
    algorithm: str = DEFAULT_ALGORITHM,
) -> np.random.Generator:
    """Generator for the stream (seed, *stream_key); passes Generators through."""
    if isinstance(seed, np.random.Generator):
        return seed
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in stream_key))
    return np.random.Generator(_bit_generator(algorithm, seq))
