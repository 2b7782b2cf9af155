"""
Systematic random linear codes.

generator = [P | I_k] with P drawn i.i.d. uniform, parity = [I_{n-k} | Pᵀ].
The last k bits of every codeword carry the message. No minimum-distance
screening: degenerate draws are kept, matching the ergodic average over codes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from coding.gf2_linalg import (
    BitMatrix,
    BitWord,
    gf2_mat_colvec,
    gf2_matvec,
    gf2_random_matrix,
)

# widest syndrome that fits one numpy.uint64 lane
PACKED_SYNDROME_BITS = 64


@dataclass(frozen=True)
class RlcCode:
    n: int
    k: int
    generator: BitMatrix
    parity: BitMatrix
    column_syndromes: Tuple[int, ...] = field(init=False, repr=False, compare=False)
    packed_syndromes: Optional[np.ndarray] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 < self.k < self.n:
            raise ValueError(f"need 0 < k < n, got n={self.n}, k={self.k}")
        if (self.generator.rows, self.generator.cols) != (self.k, self.n):
            raise ValueError("generator must be k x n")
        if (self.parity.rows, self.parity.cols) != (self.n - self.k, self.n):
            raise ValueError("parity must be (n-k) x n")
        # syndrome of the unit error at each position
        cols = tuple(self.parity.column(j).value for j in range(self.n))
        object.__setattr__(self, 'column_syndromes', cols)
        packed = None
        if self.n - self.k <= PACKED_SYNDROME_BITS:
            packed = np.array(cols, dtype=np.uint64)
            packed.flags.writeable = False
        object.__setattr__(self, 'packed_syndromes', packed)

    @property
    def rate(self) -> float:
        return self.k / self.n

    @classmethod
    def from_parity_block(cls, p: BitMatrix) -> 'RlcCode':
        """Systematic code from its k×(n−k) block P."""
        k, r = p.rows, p.cols
        n = k + r
        generator = p.hstack(BitMatrix.identity(k))
        parity = BitMatrix.identity(r).hstack(p.transpose())
        return cls(n, k, generator, parity)

    def syndrome_value(self, y: BitWord) -> int:
        """Packed syndrome of y from the cached column syndromes."""
        s = 0
        for j in y.positions():
            s ^= self.column_syndromes[j]
        return s


def rlc_generate(n: int, k: int, rng: np.random.Generator) -> RlcCode:
    if not 0 < k < n:
        raise ValueError(f"need 0 < k < n, got n={n}, k={k}")
    return RlcCode.from_parity_block(gf2_random_matrix(k, n - k, rng))


def encode(code: RlcCode, a: BitWord) -> BitWord:
    if a.length != code.k:
        raise ValueError(f"message length {a.length} != k={code.k}")
    return gf2_matvec(code.generator, a)


def syndrome(code: RlcCode, y: BitWord) -> BitWord:
    if y.length != code.n:
        raise ValueError(f"word length {y.length} != n={code.n}")
    return gf2_mat_colvec(code.parity, y)


def is_codeword(code: RlcCode, y: BitWord) -> bool:
    if y.length != code.n:
        raise ValueError(f"word length {y.length} != n={code.n}")
    return code.syndrome_value(y) == 0


def extract_message(code: RlcCode, word: BitWord) -> BitWord:
    if word.length != code.n:
        raise ValueError(f"word length {word.length} != n={code.n}")
    return BitWord(code.k, word.value >> (code.n - code.k))


def dump_code(code: RlcCode) -> str:
    """'n k' header, then the k generator rows as '0'/'1' strings."""
    lines = [f"{code.n} {code.k}"]
    lines += [str(code.generator.row(i)) for i in range(code.k)]
    return '\n'.join(lines) + '\n'


def load_code(text: str) -> RlcCode:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty code description")
    try:
        n, k = (int(tok) for tok in lines[0].split())
    except ValueError:
        raise ValueError(f"bad header line {lines[0]!r}, expected 'n k'") from None
    rows = lines[1:]
    if len(rows) != k:
        raise ValueError(f"expected {k} generator rows, got {len(rows)}")
    if any(len(r) != n or set(r) - {'0', '1'} for r in rows):
        raise ValueError(f"generator rows must be {n} characters of '0'/'1'")
    g = np.array([[int(c) for c in r] for r in rows], dtype=np.uint8)
    if not np.array_equal(g[:, n - k:], np.eye(k, dtype=np.uint8)):
        raise ValueError("generator is not systematic [P | I_k]")
    return RlcCode.from_parity_block(BitMatrix.from_array(g[:, :n - k]))
