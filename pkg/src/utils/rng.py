"""Counter-based random streams.

Replicate ``m`` of a bootstrap keyed by ``seed`` always draws from the Philox
stream with key ``seed`` and counter ``m << 64``, so any subset of replicates
can be regenerated in any order, on any worker, with identical bits.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def replicate_generator(seed: int, replicate: int) -> np.random.Generator:
    """Generator for bootstrap replicate ``replicate`` under master ``seed``."""
    return np.random.Generator(
        np.random.Philox(key=int(seed) & _MASK64, counter=int(replicate) << 64)
    )


def multiplier_block(seed: int, start: int, stop: int, n: int) -> np.ndarray:
    """
    Standard-Gaussian multipliers for replicates ``start..stop-1``.

    Returns:
        (n, stop - start) array; column k holds replicate start + k.
    """
    block = np.empty((n, stop - start))
    for k, m in enumerate(range(start, stop)):
        block[:, k] = replicate_generator(seed, m).standard_normal(n)
    return block


def trial_generator(seed: int, trial: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for Monte-Carlo trial ``trial`` (stream separates uses)."""
    ss = np.random.SeedSequence(entropy=int(seed) & _MASK64, spawn_key=(int(trial), int(stream)))
    return np.random.Generator(np.random.Philox(ss))


def trial_seed(seed: int, trial: int) -> int:
    """64-bit bootstrap seed derived from (seed, trial)."""
    ss = np.random.SeedSequence(entropy=int(seed) & _MASK64, spawn_key=(int(trial), 1 << 20))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
