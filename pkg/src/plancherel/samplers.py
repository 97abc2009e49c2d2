"""Exact samplers for the Plancherel measure and its poissonization.

Every draw is driven by a :class:`SeededStream`, a (master_seed, replica_index)
pair mapped to an independent PCG64 generator through numpy's SeedSequence
spawn keys. A replica's draws therefore depend only on its own index, never on
how many replicas run or in which order they finish.
"""

from __future__ import annotations

import bisect
import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np

from . import _kernels
from .partitions import EMPTY, Partition, format_partition

SAMPLER_KINDS = ("rsk", "growth", "poissonized")

# dense RSK buffer budget (cells); larger inputs use the list-based insertion
_DENSE_RSK_CELLS = 50_000_000


@dataclass(frozen=True)
class SeededStream:
    master_seed: int
    replica_index: int

    def __post_init__(self) -> None:
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.replica_index < 0:
            raise ValueError("replica_index must be nonnegative")

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.replica_index,))
        return np.random.Generator(np.random.PCG64(seq))


RngLike = Union[SeededStream, np.random.Generator]


def as_generator(stream: RngLike) -> np.random.Generator:
    if isinstance(stream, np.random.Generator):
        return stream
    return stream.generator()


def sample_uniform_permutation(n: int, stream: RngLike) -> np.ndarray:
    """Uniform permutation of 1..n (numpy's Fisher-Yates shuffle)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return as_generator(stream).permutation(n) + 1


def lis_length(seq: Sequence[int] | np.ndarray) -> int:
    """Longest strictly increasing subsequence by patience sorting."""
    arr = np.asarray(seq)
    if arr.size == 0:
        return 0
    return int(_kernels.patience_lis(arr))


def _rsk_rows_python(seq: np.ndarray) -> list[int]:
    rows: list[list[int]] = []
    for v in seq.tolist():
        for row in rows:
            j = bisect.bisect_right(row, v)
            if j == len(row):
                row.append(v)
                break
            row[j], v = v, row[j]
        else:
            rows.append([v])
    return [len(row) for row in rows]


def _rsk_rows(seq: np.ndarray) -> np.ndarray:
    seq = np.ascontiguousarray(seq, dtype=np.int32)
    if seq.size == 0:
        return np.zeros(0, dtype=np.int64)
    longest_inc = _kernels.patience_lis(seq)
    longest_dec = _kernels.patience_lis(-seq)
    if (longest_inc + 1) * (longest_dec + 1) > _DENSE_RSK_CELLS:
        return np.asarray(_rsk_rows_python(seq), dtype=np.int64)
    return _kernels.rsk_row_lengths(seq, longest_dec, longest_inc)


class RSKShape(NamedTuple):
    shape: Partition
    lis: int


def rsk_shape(sigma: Sequence[int] | np.ndarray) -> RSKShape:
    """Shape of the Schensted insertion tableau of a permutation of 1..n."""
    arr = np.asarray(sigma, dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError("permutation must be one-dimensional")
    n = arr.size
    if n and not np.array_equal(np.sort(arr), np.arange(1, n + 1)):
        raise ValueError("input is not a permutation of 1..n")
    if n >= 2**31:
        raise ValueError("permutation too long")
    rows = _rsk_rows(arr)
    shape = Partition(tuple(rows.tolist()))
    return RSKShape(shape, shape.part(1))


def _rsk_draw(n: int, rng: np.random.Generator) -> np.ndarray:
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    return _rsk_rows(rng.permutation(n).astype(np.int32))


def _growth_draw(n: int, rng: np.random.Generator) -> np.ndarray:
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    return _kernels.growth_row_lengths(n, rng.random(n))


def sample_plancherel_rsk(n: int, stream: RngLike) -> Partition:
    """Plancherel(n) draw as the RSK shape of a uniform permutation."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return Partition(tuple(_rsk_draw(n, as_generator(stream)).tolist()))


def sample_plancherel_growth(n: int, stream: RngLike) -> Partition:
    """Plancherel(n) draw from the Plancherel growth chain."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return Partition(tuple(_growth_draw(n, as_generator(stream)).tolist()))


def sample_poissonized(t: float, stream: RngLike) -> Partition:
    """Draw from the poissonized measure: N ~ Poisson(t), then Plancherel(N)."""
    if not t > 0:
        raise ValueError("t must be positive")
    rng = as_generator(stream)
    n = int(rng.poisson(t))
    return Partition(tuple(_rsk_draw(n, rng).tolist()))


def sample_longest_increasing(n: int, stream: RngLike) -> int:
    """lambda_1 of a Plancherel(n) draw, via the LIS of a uniform permutation."""
    if n == 0:
        return 0
    return int(_kernels.patience_lis(as_generator(stream).permutation(n).astype(np.int32)))


@dataclass
class SampleBatch:
    n_or_t: float
    sampler_kind: str
    draws: list[Partition]
    seeds: list[SeededStream]
    sizes: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        if len(self.draws) != len(self.seeds):
            raise ValueError("draws and seeds must align")
        if not self.sizes:
            self.sizes = [lam.weight for lam in self.draws]

    def __len__(self) -> int:
        return len(self.draws)

    @property
    def replica_indices(self) -> list[int]:
        return [s.replica_index for s in self.seeds]

    def head(self, count: int) -> "SampleBatch":
        return SampleBatch(self.n_or_t, self.sampler_kind, self.draws[:count],
                           self.seeds[:count], self.sizes[:count])

    def write_csv(self, path: str | os.PathLike, header_comment: str | None = None) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["replica_index", "n", "lambda", "lambda1", "num_parts"])
            for seed, size, lam in zip(self.seeds, self.sizes, self.draws):
                writer.writerow([seed.replica_index, size, format_partition(lam), lam.part(1), len(lam)])

    def save_npz(self, path: str | os.PathLike) -> None:
        lengths = np.array([len(lam) for lam in self.draws], dtype=np.int64)
        flat = np.array([p for lam in self.draws for p in lam.parts], dtype=np.int64)
        np.savez_compressed(
            path, n_or_t=self.n_or_t, sampler_kind=self.sampler_kind, lengths=lengths, parts=flat,
            master_seeds=np.array([s.master_seed for s in self.seeds], dtype=np.uint64),
            replica_indices=np.array(self.replica_indices, dtype=np.int64),
            sizes=np.array(self.sizes, dtype=np.int64),
        )

    @classmethod
    def load_npz(cls, path: str | os.PathLike) -> "SampleBatch":
        with np.load(path) as data:
            offsets = np.concatenate([[0], np.cumsum(data["lengths"])])
            parts = data["parts"].tolist()
            draws = [Partition(tuple(parts[a:b])) for a, b in zip(offsets[:-1], offsets[1:])]
            seeds = [SeededStream(int(m), int(r))
                     for m, r in zip(data["master_seeds"], data["replica_indices"])]
            return cls(float(data["n_or_t"]), str(data["sampler_kind"]), draws, seeds,
                       data["sizes"].tolist())


_DRAWERS: dict[str, Callable[[float, np.random.Generator], np.ndarray]] = {
    "rsk": lambda n, rng: _rsk_draw(int(n), rng),
    "growth": lambda n, rng: _growth_draw(int(n), rng),
    "poissonized": lambda t, rng: _rsk_draw(int(rng.poisson(t)), rng),
}


def default_threads() -> int:
    env = os.environ.get("PLANCHEREL_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def sample_batch(
    kind: str,
    n_or_t: float,
    replicas: int,
    master_seed: int,
    *,
    start: int = 0,
    threads: int | None = None,
) -> SampleBatch:
    """Draw replicas ``start .. start + replicas - 1`` with one stream each.

    The compiled kernels release the GIL, so a thread pool gives real
    parallelism; results are assembled in replica order.
    """
    if kind not in _DRAWERS:
        raise ValueError(f"unknown sampler kind {kind!r}; expected one of {SAMPLER_KINDS}")
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    if kind == "poissonized" and not n_or_t > 0:
        raise ValueError("t must be positive")
    if kind != "poissonized" and (n_or_t < 0 or int(n_or_t) != n_or_t):
        raise ValueError("n must be a nonnegative integer")
    draw = _DRAWERS[kind]
    seeds = [SeededStream(master_seed, start + i) for i in range(replicas)]

    def one(seed: SeededStream) -> np.ndarray:
        return draw(n_or_t, seed.generator())

    threads = default_threads() if threads is None else threads
    if threads > 1 and replicas > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, seeds))
    else:
        rows = [one(s) for s in seeds]
    draws = [Partition(tuple(r.tolist())) if r.size else EMPTY for r in rows]
    return SampleBatch(n_or_t, kind, draws, seeds)
