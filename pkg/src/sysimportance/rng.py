"""Reproducible random streams.

Every draw comes from numpy's counter-based Philox generator keyed by
``SeedSequence(seed, spawn_key=(rep, chunk))``.  Samples are produced in
chunks of :data:`CHUNK_SIZE` rows, so the stream for a given
``(seed, rep, chunk)`` never depends on how many chunks run or in which
order they finish.  A sample of size ``N`` is a prefix of any larger sample
with the same seed and repetition.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

CHUNK_SIZE = 4096


def generator(seed: int, rep: int = 0, chunk: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(rep), int(chunk)))
    return np.random.Generator(np.random.Philox(ss))


def chunk_sizes(n: int, chunk_size: int = CHUNK_SIZE) -> list[int]:
    full, rest = divmod(int(n), chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def chunked_map(fn, n: int, seed: int, *, rep: int = 0, threads: int = 1):
    """Call ``fn(generator, size)`` per chunk and concatenate in chunk order."""
    sizes = chunk_sizes(n)
    jobs = [(c, m) for c, m in enumerate(sizes)]

    def run(job):
        c, m = job
        return fn(generator(seed, rep, c), m)

    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    return np.concatenate(parts, axis=0)
