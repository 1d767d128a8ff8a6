import zlib

import numpy as np


def derive_seed(seed, *keys):
    """Derive an independent 63-bit seed from a base seed and string/int keys."""
    entropy = [int(seed) & 0xFFFFFFFF, (int(seed) >> 32) & 0xFFFFFFFF]
    for k in keys:
        if isinstance(k, str):
            k = zlib.crc32(k.encode())
        entropy.append(int(k) & 0xFFFFFFFF)
    state = np.random.SeedSequence(entropy).generate_state(2, dtype=np.uint32)
    return int(state[0]) << 31 ^ int(state[1])


def make_rng(seed, *keys):
    return np.random.default_rng(derive_seed(seed, *keys))
