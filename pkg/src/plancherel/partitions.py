"""Integer partitions: conjugation, profiles, dimensions and the exact Plancherel law.

A partition is stored as its weakly decreasing sequence of positive parts.
``parts[i - 1]`` is the height of the i-th column of the Young diagram, so the
profile function is ``lambda(x) = parts[ceil(x) - 1]``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Sequence

EXACT_MAX_WEIGHT = 20
BRUTEFORCE_MAX_WEIGHT = 12
ENUMERATE_MAX_WEIGHT = 40


class PartitionError(ValueError):
    pass


class NotDecreasing(PartitionError):
    pass


class TooLarge(PartitionError):
    pass


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        parts = self.parts
        if parts and parts[-1] < 1:
            raise PartitionError(f"parts must be positive: {parts!r}")
        for a, b in zip(parts, parts[1:]):
            if a < b:
                raise NotDecreasing(f"parts must be weakly decreasing: {parts!r}")

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def part(self, i: int) -> int:
        """The i-th part (1-based), zero past the last part."""
        if i < 1:
            raise IndexError(i)
        return self.parts[i - 1] if i <= len(self.parts) else 0

    def __str__(self) -> str:
        return format_partition(self)

    @classmethod
    def parse(cls, text: str) -> "Partition":
        return parse_partition(text)


EMPTY = Partition(())


def make_partition(parts: Iterable[int], *, sort: bool = False) -> Partition:
    """Validate ``parts`` and build a Partition.

    Unsorted input is accepted only with ``sort=True``.
    """
    values = [int(p) for p in parts]
    if any(p <= 0 for p in values):
        raise PartitionError(f"parts must be positive integers: {values!r}")
    if sort:
        values.sort(reverse=True)
    return Partition(tuple(values))


def format_partition(lam: Partition) -> str:
    return ",".join(str(p) for p in lam.parts)


def parse_partition(text: str) -> Partition:
    text = text.strip()
    if not text:
        return EMPTY
    return make_partition(int(tok) for tok in text.split(","))


def conjugate(lam: Partition) -> Partition:
    parts = lam.parts
    if not parts:
        return EMPTY
    # lam'_j = #{i : lam_i >= j}; parts are decreasing so walk from the end
    out = []
    i = len(parts)
    for j in range(1, parts[0] + 1):
        while i > 0 and parts[i - 1] < j:
            i -= 1
        out.append(i)
    return Partition(tuple(out))


def profile_eval(lam: Partition, x: float) -> int:
    """Left-continuous step profile ``lambda(x) = lambda_ceil(x)``, with lambda(0) = lambda_1."""
    if x < 0:
        raise ValueError(f"profile is defined for x >= 0, got {x}")
    k = max(1, math.ceil(x))
    return lam.part(k)


def hook_lengths(lam: Partition) -> list[int]:
    conj = conjugate(lam).parts
    return [
        (row - j) + (conj[j] - i) - 1
        for i, row in enumerate(lam.parts)
        for j in range(row)
    ]


class Dimension(NamedTuple):
    exact: int | None
    log: float


def log_dimension(lam: Partition) -> Dimension:
    """Number of standard tableaux via the hook length formula.

    The exact integer is returned only for weight <= 20; ``log`` is always set.
    """
    n = lam.weight
    hooks = hook_lengths(lam)
    log_d = math.lgamma(n + 1) - math.fsum(math.log(h) for h in hooks)
    exact = None
    if n <= EXACT_MAX_WEIGHT:
        exact = math.factorial(n) // math.prod(hooks)
    return Dimension(exact, log_d)


def dimension(lam: Partition) -> int:
    d = log_dimension(lam).exact
    if d is None:
        raise TooLarge(f"exact dimension only for weight <= {EXACT_MAX_WEIGHT}; use log_dimension")
    return d


def dimension_bruteforce(lam: Partition) -> int:
    """Count standard fillings by exhaustive recursion on the cell holding the largest entry.

    Each standard tableau is reached along exactly one path, so this is a plain
    enumeration (no memoisation); it is meant as a test oracle only.
    """
    if lam.weight > BRUTEFORCE_MAX_WEIGHT:
        raise TooLarge(f"brute force limited to weight <= {BRUTEFORCE_MAX_WEIGHT}")

    def count(parts: list[int]) -> int:
        if not parts:
            return 1
        total = 0
        for i, p in enumerate(parts):
            # the largest entry sits in a removable corner
            if i + 1 == len(parts) or parts[i + 1] < p:
                parts[i] -= 1
                if parts[i] == 0:
                    parts.pop()
                    total += count(parts)
                    parts.append(0)
                else:
                    total += count(parts)
                parts[i] += 1
        return total

    return count(list(lam.parts))


def enumerate_partitions(n: int) -> list[Partition]:
    """All partitions of n in reverse-lexicographic order."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > ENUMERATE_MAX_WEIGHT:
        raise TooLarge(f"enumeration limited to n <= {ENUMERATE_MAX_WEIGHT}")

    def gen(remaining: int, largest: int) -> Iterator[tuple[int, ...]]:
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, largest), 0, -1):
            for rest in gen(remaining - first, first):
                yield (first,) + rest

    return [Partition(p) for p in gen(n, n)]


def plancherel_pmf(n: int) -> dict[Partition, Fraction]:
    """Exact Plancherel probabilities d_lambda^2 / n! for every partition of n."""
    if n > EXACT_MAX_WEIGHT:
        raise TooLarge(f"exact Plancherel law limited to n <= {EXACT_MAX_WEIGHT}")
    nfact = math.factorial(n)
    return {lam: Fraction(dimension(lam) ** 2, nfact) for lam in enumerate_partitions(n)}


@dataclass(frozen=True)
class FrobeniusSet:
    """The point set {lambda_i - i : i >= 1}.

    Only the first len(lambda) points are stored; every integer
    ``<= tail_start`` also belongs to the set.
    """

    explicit_points: tuple[int, ...]
    tail_start: int

    def __contains__(self, m: int) -> bool:
        return m <= self.tail_start or m in self.explicit_points

    def count_at_least(self, a: int) -> int:
        # explicit points are strictly decreasing
        neg = [-p for p in self.explicit_points]
        explicit = bisect.bisect_right(neg, -a)
        return explicit + max(0, self.tail_start - a + 1)


def frobenius_points(lam: Partition) -> FrobeniusSet:
    return FrobeniusSet(
        explicit_points=tuple(p - i for i, p in enumerate(lam.parts, start=1)),
        tail_start=-len(lam) - 1,
    )


def count_frobenius_at_least(lam: Partition, a: int) -> int:
    """#(D(lambda) ∩ [a, ∞)). Always finite: the set is bounded above."""
    return frobenius_points(lam).count_at_least(int(a))


def burnside_sum(n: int) -> int:
    return sum(dimension(lam) ** 2 for lam in enumerate_partitions(n))


def as_partitions(items: Sequence[Sequence[int]]) -> list[Partition]:
    return [Partition(tuple(int(p) for p in item)) for item in items]
