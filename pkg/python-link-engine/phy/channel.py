"""
Flat Rayleigh mMIMO channel and its perfect-hardening equivalent.

Calibration: symbols have unit average energy, the noise has variance
NOISE_VARIANCE per complex receive dimension, and `snr` scales the signal:
    y = sqrt(snr) * H x + w,      w ~ CN(0, sigma2 I_{N_R})
The hardening model replaces H by the ideal post-ZF picture of N_T parallel
branches whose noise power is reduced by N_R:
    y = sqrt(snr) * x + u,        u ~ CN(0, sigma2 / N_R I_{N_T})
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NOISE_VARIANCE = 1.0


@dataclass(frozen=True)
class ChannelRealization:
    h: np.ndarray

    def __post_init__(self):
        if self.h.ndim != 2:
            raise ValueError("channel matrix must be 2-D")
        if self.n_r < self.n_t:
            raise ValueError(f"need n_r >= n_t, got {self.n_r}x{self.n_t}")

    @property
    def n_r(self) -> int:
        return self.h.shape[0]

    @property
    def n_t(self) -> int:
        return self.h.shape[1]


@dataclass(frozen=True)
class NoiseParams:
    sigma2: float
    snr: float

    def __post_init__(self):
        # sigma2 == 0 is the noise-free debug hook
        if self.sigma2 < 0:
            raise ValueError(f"noise variance must be >= 0, got {self.sigma2}")
        if self.snr <= 0:
            raise ValueError(f"snr must be > 0, got {self.snr}")


def complex_normal(shape, variance: float, rng: np.random.Generator) -> np.ndarray:
    """Circularly-symmetric CN(0, variance) samples."""
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def sample_channel(n_r: int, n_t: int, rng: np.random.Generator) -> ChannelRealization:
    if n_t < 1 or n_r < n_t:
        raise ValueError(f"need n_r >= n_t >= 1, got n_r={n_r}, n_t={n_t}")
    return ChannelRealization(complex_normal((n_r, n_t), 1.0, rng))


def transmit(ch: ChannelRealization, x: np.ndarray, noise: NoiseParams,
             rng: np.random.Generator) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (ch.n_t,):
        raise ValueError(f"symbol vector of length {x.size} on a channel with {ch.n_t} inputs")
    signal = np.sqrt(noise.snr) * (ch.h @ x)
    if noise.sigma2 == 0:
        return signal
    return signal + complex_normal(ch.n_r, noise.sigma2, rng)


def complex_to_real(value) -> np.ndarray:
    """A + jB -> [[A, -B], [B, A]] for matrices, a + jb -> [a; b] for vectors."""
    if isinstance(value, ChannelRealization):
        value = value.h
    z = np.asarray(value, dtype=complex)
    a, b = z.real, z.imag
    if z.ndim == 1:
        return np.concatenate([a, b])
    if z.ndim == 2:
        return np.block([[a, -b], [b, a]])
    raise ValueError(f"expected a vector or matrix, got {z.ndim} dimensions")


def hardening_transmit(x: np.ndarray, sigma2: float, n_r: int, snr: float,
                       rng: np.random.Generator) -> np.ndarray:
    if n_r < 1:
        raise ValueError(f"n_r must be >= 1, got {n_r}")
    x = np.asarray(x)
    signal = np.sqrt(snr) * x
    if sigma2 == 0:
        return signal
    return signal + complex_normal(x.shape, sigma2 / n_r, rng)


def normalized_gram_offdiag(ch: ChannelRealization) -> float:
    """Largest off-diagonal magnitude of HᴴH / N_R; tends to 0 as N_R grows."""
    t = ch.h.conj().T @ ch.h / ch.n_r
    off = t - np.diag(np.diag(t))
    return float(np.max(np.abs(off))) if ch.n_t > 1 else 0.0
