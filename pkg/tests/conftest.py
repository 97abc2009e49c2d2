import os
from pathlib import Path

import pytest
from hypothesis import settings

from plancherel.samplers import SampleBatch, sample_batch

settings.register_profile("default", deadline=None)
settings.load_profile("default")

# seed of the shared large-n batch used by several acceptance checks
BULK_SEED = 20261016
BULK_N = 100_000
BULK_REPLICAS = 5000


def cached_batch(kind: str, n_or_t, replicas: int, seed: int) -> SampleBatch:
    """sample_batch, optionally memoised on disk under $PLANCHEREL_CACHE_DIR.

    Draws are a pure function of (kind, n, replica index, seed), so a cached
    batch is identical to a fresh one.
    """
    cache = os.environ.get("PLANCHEREL_CACHE_DIR")
    if cache:
        path = Path(cache) / f"{kind}_{n_or_t:g}_{replicas}_{seed}.npz"
        if path.exists():
            return SampleBatch.load_npz(path)
    batch = sample_batch(kind, n_or_t, replicas, seed)
    if cache:
        Path(cache).mkdir(parents=True, exist_ok=True)
        batch.save_npz(path)
    return batch


@pytest.fixture(scope="session")
def bulk_batch() -> SampleBatch:
    """5000 RSK draws at n = 10^5."""
    return cached_batch("rsk", BULK_N, BULK_REPLICAS, BULK_SEED)


POISSON_SEEDS = {100.0: 1001, 400.0: 1004}
POISSON_REPLICAS = 100_000


@pytest.fixture(scope="session")
def poisson_batches() -> dict:
    """10^5 poissonized draws at each of t = 100 and t = 400, built on first use."""
    store: dict = {}

    class _Lazy(dict):
        def __missing__(self, t):
            batch = cached_batch("poissonized", t, POISSON_REPLICAS, POISSON_SEEDS[t])
            self[t] = batch
            return batch

    return _Lazy(store)
