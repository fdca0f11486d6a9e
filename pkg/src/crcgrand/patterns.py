"""
Noise-pattern orders for GRAND.

Both generators are lazy: they hold O(n) state and never materialize the
pattern list.

* Hard detection (simple order sweeping): Hamming weight ascending, then the
  span between the first and last flipped bit, then the arrangement of the
  interior flipped bits (lexicographic), then the offset of the group, left
  to right.
* Soft detection (ordered reliability bits): logistic weight ascending, the
  sum of reliability ranks of the flipped bits.  Patterns of equal weight
  are the distinct-part partitions of that weight, visited in reverse
  lexicographic order of their descending part sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np

from .bits import BitWord


def sos_positions(n: int) -> Iterator[tuple[int, ...]]:
    """Flip-position tuples in simple-order-sweeping order."""
    yield ()
    for off in range(n):
        yield (off,)
    for w in range(2, n + 1):
        for span in range(w, n + 1):
            for interior in combinations(range(1, span - 1), w - 2):
                rel = (0, *interior, span - 1)
                for off in range(n - span + 1):
                    yield tuple(off + r for r in rel)


class SosGenerator:
    """Resumable iterator over :class:`BitWord` patterns in sweeping order."""

    def __init__(self, n: int):
        if n <= 0:
            raise ValueError(f"pattern length must be positive, got {n}")
        self.n = n
        self.count = 0
        self.exhausted = False
        self._it = sos_positions(n)

    def __iter__(self):
        return self

    def next_positions(self) -> tuple[int, ...] | None:
        if self.exhausted:
            return None
        try:
            p = next(self._it)
        except StopIteration:
            self.exhausted = True
            return None
        self.count += 1
        return p

    def __next__(self) -> BitWord:
        p = self.next_positions()
        if p is None:
            raise StopIteration
        return BitWord.from_positions(self.n, p)


def sos_next(gen: SosGenerator) -> BitWord | None:
    """Next pattern, or ``None`` once all ``2^n`` have been produced."""
    p = gen.next_positions()
    return None if p is None else BitWord.from_positions(gen.n, p)


@dataclass(frozen=True)
class RankPermutation:
    """Reliability ranks.

    ``rank[i]`` is the 1-based rank of bit ``i`` (1 = least reliable) and
    ``pos[j]`` is the bit holding rank ``j + 1``.
    """

    rank: np.ndarray
    pos: np.ndarray

    @property
    def n(self) -> int:
        return len(self.rank)

    @classmethod
    def identity(cls, n: int) -> RankPermutation:
        a = np.arange(n)
        return cls(a + 1, a.copy())


def rank_from_reliabilities(rel: Sequence[float]) -> RankPermutation:
    rel = np.asarray(rel, dtype=np.float64)
    pos = np.argsort(rel, kind="stable")
    rank = np.empty_like(pos)
    rank[pos] = np.arange(1, len(rel) + 1)
    return RankPermutation(rank, pos)


def logistic_weight(z: BitWord, r: RankPermutation) -> int:
    if len(z) != r.n:
        raise ValueError(f"pattern length {len(z)} != {r.n}")
    return int(sum(int(r.rank[i]) for i in z.support()))


def distinct_partitions(total: int, max_part: int) -> Iterator[tuple[int, ...]]:
    """Partitions of ``total`` into distinct parts ``<= max_part``.

    Parts are listed in descending order; partitions come out in reverse
    lexicographic order, so ``(3,)`` precedes ``(2, 1)``.
    """
    if total == 0:
        yield ()
        return
    for first in range(min(total, max_part), 0, -1):
        if first * (first + 1) // 2 < total:
            break
        for rest in distinct_partitions(total - first, first - 1):
            yield (first, *rest)


def orb_ranks(n: int) -> Iterator[tuple[int, tuple[int, ...]]]:
    """``(logistic weight, ranks to flip)`` in ORBGRAND order."""
    for w in range(n * (n + 1) // 2 + 1):
        for part in distinct_partitions(w, n):
            yield w, part


class OrbGenerator:
    """Resumable iterator over patterns in logistic-weight order."""

    def __init__(self, ranks: RankPermutation):
        self.ranks = ranks
        self.n = ranks.n
        self.count = 0
        self.exhausted = False
        self.weight = 0
        self._it = orb_ranks(self.n)

    def __iter__(self):
        return self

    def next_positions(self) -> tuple[int, ...] | None:
        if self.exhausted:
            return None
        try:
            w, part = next(self._it)
        except StopIteration:
            self.exhausted = True
            return None
        self.count += 1
        self.weight = w
        return tuple(int(self.ranks.pos[j - 1]) for j in part)

    def __next__(self) -> BitWord:
        p = self.next_positions()
        if p is None:
            raise StopIteration
        return BitWord.from_positions(self.n, p)


def orb_next(gen: OrbGenerator) -> BitWord | None:
    p = gen.next_positions()
    return None if p is None else BitWord.from_positions(gen.n, p)
