import numpy as np

# Monte Carlo work is split into fixed-size blocks, each drawing from its own child of the root seed, so a block's
# numbers never depend on how the work is partitioned across calls or processes.
BLOCK_SIZE = 1024


def block_generator(seed, block_index):
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(block_index,)))


def substream(seed, *keys):
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(k) for k in keys)))


def block_ranges(start, stop, block_size=BLOCK_SIZE):
    """Yields ``(block_index, lo, hi)`` triples covering ``[start, stop)``, where ``lo``/``hi`` are offsets inside the
    block."""
    i = start
    while i < stop:
        block = i // block_size
        lo = i - block * block_size
        hi = min(block_size, stop - block * block_size)
        yield block, lo, hi
        i = block * block_size + hi
