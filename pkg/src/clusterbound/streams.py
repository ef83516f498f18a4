"""Counter-based random streams for reproducible, shardable Monte Carlo.

Samples are grouped in fixed-size blocks. Block ``b`` of stream ``s`` under
``seed`` draws from a Philox generator keyed by ``(seed, s << 32 | b)`` with
its counter starting at zero, so the uniforms for a given sample index never
depend on how blocks are distributed over workers.
"""
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

DEFAULT_SEED = 0x5EED
BLOCK_SIZE = 1 << 15

# stream ids, one per estimator family
MAYER = 1
FINITE_VOLUME = 2


def check_seed(seed):
    seed = int(seed)
    if not 0 <= seed < 1 << 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return seed


def block_generator(seed, stream, block):
    key = np.array([check_seed(seed), (stream << 32) | block], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def block_sizes(samples, block_size=BLOCK_SIZE):
    full, rest = divmod(samples, block_size)
    return [block_size] * full + ([rest] if rest else [])


def run_blocks(func, samples, shards=1, block_size=BLOCK_SIZE):
    """Apply ``func(block_index, block_len)`` to every block and return the
    results in block order, whatever the number of worker shards."""
    sizes = block_sizes(samples, block_size)
    if shards <= 1 or len(sizes) == 1:
        return [func(b, n) for b, n in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=shards) as pool:
        return list(pool.map(func, range(len(sizes)), sizes))


def merge_moments(partials):
    """Combine per-block (count, sum, sum of squares) exactly.

    ``math.fsum`` is correctly rounded, so the totals are independent of the
    order in which blocks were produced.
    """
    count = sum(p[0] for p in partials)
    s1 = math.fsum(p[1] for p in partials)
    s2 = math.fsum(p[2] for p in partials)
    return count, s1, s2
