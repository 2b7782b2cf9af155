"""
Square M-QAM built as the Cartesian product of two PAM axes.

Bit layout for one codeword of n bits sent over N_T = n / log2(M) symbols:
the first n/2 bits drive the I components of symbols 0..N_T-1, the remaining
n/2 bits the Q components. Each axis label has log2(M)/2 bits, MSB first.

Labels per PAM level index i (levels ascending -(L-1) .. +(L-1)):
    natural: i
    gray:    i ^ (i >> 1)   (reflected binary)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from coding.gf2_linalg import BitWord

SymbolVector = np.ndarray


class Mapping(str, Enum):
    NATURAL = 'natural'
    GRAY = 'gray'


def _log2_exact(m: int) -> int:
    bits = int(m).bit_length() - 1
    if m < 2 or 1 << bits != m:
        raise ValueError(f"constellation order must be a power of two, got {m}")
    return bits


def required_antennas(n: int, m: int) -> int:
    """Transmit antennas for one-shot transmission: n / log2(M), integer or error."""
    bps = _log2_exact(m)
    if n % bps:
        lower = n - n % bps
        upper = lower + bps
        raise ValueError(
            f"n={n} with {m}-QAM needs {n / bps:.2f} antennas; "
            f"nearest valid codeword lengths are {lower} and {upper}"
        )
    return n // bps


@dataclass(frozen=True)
class Constellation:
    m: int
    mapping: Mapping
    bits_per_symbol: int = field(init=False)
    pam_levels: np.ndarray = field(init=False, repr=False, compare=False)
    norm: float = field(init=False)
    # level index -> label, and label -> level index
    labels: np.ndarray = field(init=False, repr=False, compare=False)
    level_of_label: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        bps = _log2_exact(self.m)
        if bps % 2:
            raise ValueError(f"square QAM needs an even power of two, got M={self.m}")
        mapping = Mapping(self.mapping)
        side = 1 << (bps // 2)
        idx = np.arange(side)
        levels = (2 * idx - (side - 1)).astype(float)
        labels = idx ^ (idx >> 1) if mapping is Mapping.GRAY else idx.copy()
        inverse = np.empty(side, dtype=int)
        inverse[labels] = idx
        for arr in (levels, labels, inverse):
            arr.flags.writeable = False
        object.__setattr__(self, 'mapping', mapping)
        object.__setattr__(self, 'bits_per_symbol', bps)
        object.__setattr__(self, 'pam_levels', levels)
        # mean |I + jQ|^2 over the square grid is 2(M-1)/3
        object.__setattr__(self, 'norm', 1.0 / math.sqrt(2.0 * (self.m - 1) / 3.0))
        object.__setattr__(self, 'labels', labels)
        object.__setattr__(self, 'level_of_label', inverse)

    @classmethod
    def square(cls, m: int, mapping: Mapping | str = Mapping.GRAY) -> 'Constellation':
        return cls(m, Mapping(mapping))

    @property
    def axis_bits(self) -> int:
        return self.bits_per_symbol // 2

    def points(self) -> np.ndarray:
        """Every normalized constellation point."""
        i, q = np.meshgrid(self.pam_levels, self.pam_levels, indexing='ij')
        return ((i + 1j * q) * self.norm).ravel()


def pam_labels(c: Constellation) -> np.ndarray:
    return c.labels


def _bits_to_labels(bits: np.ndarray, width: int) -> np.ndarray:
    weights = 1 << np.arange(width - 1, -1, -1)
    return bits.reshape(-1, width).astype(int) @ weights


def _labels_to_bits(labels: np.ndarray, width: int) -> np.ndarray:
    shifts = np.arange(width - 1, -1, -1)
    return ((labels[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def map_bits(c: Constellation, bits: BitWord) -> SymbolVector:
    n = bits.length
    if n % c.bits_per_symbol or n % 2:
        raise ValueError(f"{n} bits do not fill whole {c.m}-QAM symbols")
    arr = bits.to_array()
    half = n // 2
    i_levels = c.pam_levels[c.level_of_label[_bits_to_labels(arr[:half], c.axis_bits)]]
    q_levels = c.pam_levels[c.level_of_label[_bits_to_labels(arr[half:], c.axis_bits)]]
    return (i_levels + 1j * q_levels) * c.norm


def _slice_axis(c: Constellation, values: np.ndarray) -> np.ndarray:
    """Nearest PAM level index per value; argmin keeps the lower level on exact ties."""
    dist = np.abs(values[:, None] / c.norm - c.pam_levels[None, :])
    return np.argmin(dist, axis=1)


def demap_symbols(c: Constellation, received: SymbolVector) -> BitWord:
    received = np.asarray(received, dtype=complex).ravel()
    i_bits = _labels_to_bits(c.labels[_slice_axis(c, received.real)], c.axis_bits)
    q_bits = _labels_to_bits(c.labels[_slice_axis(c, received.imag)], c.axis_bits)
    return BitWord.from_bits(np.concatenate([i_bits, q_bits]))
