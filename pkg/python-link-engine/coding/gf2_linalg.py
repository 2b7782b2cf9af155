"""
Dense GF(2) words and matrices.

Bits are packed into Python integers: position i of a word is bit i of the
integer (LSB first), and a matrix is a tuple of packed rows. XOR of two words
is a single integer XOR and the Hamming weight is a popcount, which keeps the
syndrome test cheap enough for GRAND.

Two products are exposed on purpose:
- gf2_matvec(m, v):      row vector times matrix, v·M (encoding, x_b = aG)
- gf2_mat_colvec(m, v):  matrix times column vector, M·vᵀ (syndromes, s = H·yᵀ)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Tuple

import numpy as np


def _pack(bits: np.ndarray) -> int:
    packed = np.packbits(np.asarray(bits, dtype=np.uint8), bitorder='little')
    return int.from_bytes(packed.tobytes(), 'little')


def _unpack(value: int, length: int) -> np.ndarray:
    raw = value.to_bytes((length + 7) // 8, 'little')
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder='little')[:length]


def _set_positions(value: int) -> Iterator[int]:
    """Indices of the ones in a packed word, ascending."""
    while value:
        low = value & -value
        yield low.bit_length() - 1
        value ^= low


@dataclass(frozen=True)
class BitWord:
    """Immutable binary word of `length` bits packed into `value`."""
    length: int
    value: int = 0

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError(f"BitWord length must be positive, got {self.length}")
        if self.value < 0 or self.value >> self.length:
            raise ValueError(f"value {self.value:#x} does not fit in {self.length} bits")

    @classmethod
    def zeros(cls, length: int) -> 'BitWord':
        return cls(length, 0)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> 'BitWord':
        arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("BitWord needs a non-empty 1-D bit sequence")
        if np.any((arr != 0) & (arr != 1)):
            raise ValueError("BitWord entries must be 0 or 1")
        return cls(int(arr.size), _pack(arr))

    @classmethod
    def random(cls, length: int, rng: np.random.Generator) -> 'BitWord':
        return cls.from_bits(rng.integers(0, 2, size=length, dtype=np.uint8))

    def to_array(self) -> np.ndarray:
        return _unpack(self.value, self.length)

    def positions(self) -> Tuple[int, ...]:
        return tuple(_set_positions(self.value))

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, index: int) -> int:
        if not -self.length <= index < self.length:
            raise IndexError(f"bit {index} out of range for length {self.length}")
        return (self.value >> (index % self.length)) & 1

    def __xor__(self, other: 'BitWord') -> 'BitWord':
        if self.length != other.length:
            raise ValueError(f"cannot XOR words of length {self.length} and {other.length}")
        return BitWord(self.length, self.value ^ other.value)

    def __str__(self) -> str:
        return ''.join(str(b) for b in self.to_array())


@dataclass(frozen=True)
class BitMatrix:
    """Immutable rows×cols binary matrix; `data` holds one packed int per row."""
    rows: int
    cols: int
    data: Tuple[int, ...]

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise ValueError(f"BitMatrix needs positive dimensions, got {self.rows}x{self.cols}")
        if len(self.data) != self.rows:
            raise ValueError(f"expected {self.rows} packed rows, got {len(self.data)}")
        for r in self.data:
            if r < 0 or r >> self.cols:
                raise ValueError(f"row {r:#x} does not fit in {self.cols} columns")

    @classmethod
    def from_array(cls, arr) -> 'BitMatrix':
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise ValueError("BitMatrix needs a 2-D array")
        if np.any((arr != 0) & (arr != 1)):
            raise ValueError("BitMatrix entries must be 0 or 1")
        rows, cols = arr.shape
        return cls(rows, cols, tuple(_pack(row) for row in arr))

    @classmethod
    def identity(cls, k: int) -> 'BitMatrix':
        return cls(k, k, tuple(1 << i for i in range(k)))

    def to_array(self) -> np.ndarray:
        return np.vstack([_unpack(r, self.cols) for r in self.data])

    def row(self, i: int) -> BitWord:
        return BitWord(self.cols, self.data[i])

    def column(self, j: int) -> BitWord:
        if not 0 <= j < self.cols:
            raise IndexError(f"column {j} out of range for {self.cols} columns")
        return BitWord(self.rows, sum(((r >> j) & 1) << i for i, r in enumerate(self.data)))

    def transpose(self) -> 'BitMatrix':
        return BitMatrix(self.cols, self.rows, tuple(self.column(j).value for j in range(self.cols)))

    def hstack(self, other: 'BitMatrix') -> 'BitMatrix':
        """[self | other]; other's columns follow self's."""
        if self.rows != other.rows:
            raise ValueError(f"row mismatch: {self.rows} vs {other.rows}")
        return BitMatrix(
            self.rows,
            self.cols + other.cols,
            tuple(a | (b << self.cols) for a, b in zip(self.data, other.data)),
        )

    def is_zero(self) -> bool:
        return not any(self.data)


def gf2_matvec(m: BitMatrix, v: BitWord) -> BitWord:
    """v·M over GF(2): XOR of the rows of m selected by the ones of v."""
    if v.length != m.rows:
        raise ValueError(f"vector length {v.length} != matrix rows {m.rows}")
    acc = 0
    for i in _set_positions(v.value):
        acc ^= m.data[i]
    return BitWord(m.cols, acc)


def gf2_mat_colvec(m: BitMatrix, v: BitWord) -> BitWord:
    """M·vᵀ over GF(2): bit r is the parity of row r AND v."""
    if v.length != m.cols:
        raise ValueError(f"vector length {v.length} != matrix cols {m.cols}")
    acc = 0
    for r, row in enumerate(m.data):
        acc |= ((row & v.value).bit_count() & 1) << r
    return BitWord(m.rows, acc)


def gf2_matmul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.cols != b.rows:
        raise ValueError(f"inner dimensions differ: {a.cols} vs {b.rows}")
    return BitMatrix(a.rows, b.cols, tuple(gf2_matvec(b, a.row(i)).value for i in range(a.rows)))


def gf2_random_matrix(rows: int, cols: int, rng: np.random.Generator) -> BitMatrix:
    """I.i.d. uniform bits, reproducible for a seeded generator."""
    if rows < 1 or cols < 1:
        raise ValueError(f"random matrix needs rows, cols >= 1, got {rows}x{cols}")
    return BitMatrix.from_array(rng.integers(0, 2, size=(rows, cols), dtype=np.uint8))


def hamming_weight(v: BitWord) -> int:
    return v.value.bit_count()
