"""
Hard-decision GRAND (guessing random additive noise decoding).

Error patterns are tested in nondecreasing Hamming weight, lexicographic on
the flipped-position tuples within a weight, until y_b XOR e passes the
syndrome membership test or the weight threshold n_b is exhausted.

The membership test of y XOR e reduces to comparing the pattern's syndrome
(XOR of the column syndromes at its flipped positions) with syndrome(y).
Two search paths produce identical results and query counts:
- packed: syndromes as numpy.uint64, each weight class scanned in chunks of
  (fixed prefix, every tail pair after it); memory O(n^2)
- scalar: one pattern at a time over itertools.combinations
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations
from typing import Iterator, Optional, Tuple

import numpy as np

from coding.gf2_linalg import BitWord
from coding.rlc import RlcCode


class DecodeStatus(str, Enum):
    DECODED = 'decoded'
    ABANDONED = 'abandoned'


@dataclass(frozen=True)
class GrandConfig:
    n_b: int
    query_cap: Optional[int] = None

    def __post_init__(self):
        if self.n_b < 0:
            raise ValueError(f"n_b must be >= 0, got {self.n_b}")
        if self.query_cap is not None and self.query_cap < 1:
            raise ValueError(f"query_cap must be >= 1, got {self.query_cap}")


@dataclass(frozen=True)
class DecodeOutcome:
    status: DecodeStatus
    codeword: BitWord
    inferred_error: BitWord
    queries: int

    @property
    def decoded(self) -> bool:
        return self.status is DecodeStatus.DECODED


def error_patterns(n: int, weight: int) -> Iterator[BitWord]:
    """All C(n, weight) words of the given weight, streamed in lexicographic order."""
    if not 0 <= weight <= n:
        raise ValueError(f"need 0 <= weight <= n, got weight={weight}, n={n}")
    return (BitWord(n, sum(1 << p for p in pos)) for pos in combinations(range(n), weight))


def query_upper_bound(n: int, n_b: int) -> int:
    """Sum_{t=1..n_b} C(n, t); the decoder adds one more test for e = 0."""
    if not 0 <= n_b <= n:
        raise ValueError(f"need 0 <= n_b <= n, got n_b={n_b}, n={n}")
    return sum(math.comb(n, t) for t in range(1, n_b + 1))


def expected_queries_random_code(n: int, k: int) -> float:
    """Large-n average number of guesses for a uniform random code: 2^(n-k)."""
    if not 0 < k < n:
        raise ValueError(f"need 0 < k < n, got n={n}, k={k}")
    return 2.0 ** (n - k)


@lru_cache(maxsize=16)
def _pair_table(n: int) -> Tuple[np.ndarray, np.ndarray]:
    first, second = np.triu_indices(n, 1)
    first.flags.writeable = False
    second.flags.writeable = False
    return first, second


def _scalar_search(code: RlcCode, s0: int, n_b: int, cap: Optional[int],
                   queries: int) -> Tuple[Optional[Tuple[int, ...]], int]:
    cols = code.column_syndromes
    for weight in range(1, n_b + 1):
        for positions in combinations(range(code.n), weight):
            if cap is not None and queries >= cap:
                return None, queries
            queries += 1
            s = s0
            for p in positions:
                s ^= cols[p]
            if s == 0:
                return positions, queries
    return None, queries


def _packed_chunks(cols: np.ndarray, n: int, weight: int):
    """Yield (prefix, tail syndromes, tail positions) covering one weight class in order."""
    if weight == 1:
        yield (), cols, np.arange(n)[:, None]
        return
    first, second = _pair_table(n)
    pair_syn = cols[first] ^ cols[second]
    for prefix in combinations(range(n - 2), weight - 2):
        lo = prefix[-1] + 1 if prefix else 0
        start = int(np.searchsorted(first, lo))
        prefix_syn = np.uint64(0)
        for p in prefix:
            prefix_syn ^= cols[p]
        tail = np.stack([first[start:], second[start:]], axis=1)
        yield prefix, pair_syn[start:] ^ prefix_syn, tail


def _packed_search(code: RlcCode, s0: int, n_b: int, cap: Optional[int],
                   queries: int) -> Tuple[Optional[Tuple[int, ...]], int]:
    cols = code.packed_syndromes
    target = np.uint64(s0)
    for weight in range(1, n_b + 1):
        for prefix, syn, tail in _packed_chunks(cols, code.n, weight):
            if cap is not None:
                room = cap - queries
                if room <= 0:
                    return None, queries
                syn = syn[:room]
            hits = np.flatnonzero(syn == target)
            if hits.size:
                idx = int(hits[0])
                return prefix + tuple(int(p) for p in tail[idx]), queries + idx + 1
            queries += syn.size
    return None, queries


def grand_decode(code: RlcCode, y_b: BitWord, cfg: GrandConfig, packed: bool = True) -> DecodeOutcome:
    """
    Decode y_b by guessing the error pattern.

    The received word itself (e = 0) is always the first query. On abandonment
    the received word is returned unmodified as the hard output.
    """
    if y_b.length != code.n:
        raise ValueError(f"word length {y_b.length} != n={code.n}")
    if cfg.n_b > code.n:
        raise ValueError(f"n_b={cfg.n_b} exceeds n={code.n}")

    s0 = code.syndrome_value(y_b)
    queries = 1
    if s0 == 0:
        return DecodeOutcome(DecodeStatus.DECODED, y_b, BitWord.zeros(code.n), queries)

    if packed and code.packed_syndromes is not None:
        positions, queries = _packed_search(code, s0, cfg.n_b, cfg.query_cap, queries)
    else:
        positions, queries = _scalar_search(code, s0, cfg.n_b, cfg.query_cap, queries)

    if positions is None:
        return DecodeOutcome(DecodeStatus.ABANDONED, y_b, BitWord.zeros(code.n), queries)
    error = BitWord(code.n, sum(1 << p for p in positions))
    return DecodeOutcome(DecodeStatus.DECODED, y_b ^ error, error, queries)
