"""Named, order-independent random substreams derived from one seed."""
import zlib

import numpy as np


def substream(seed: int, name: str) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=int(seed), spawn_key=(zlib.crc32(name.encode("utf-8")),))


def rng_for(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng(substream(seed, name))


def seed_for(seed: int, name: str) -> int:
    """A 63-bit integer seed for APIs that take plain ints."""
    return int(substream(seed, name).generate_state(2, dtype=np.uint64)[0] >> np.uint64(1))
