"""
Zero-forcing detection and the post-ZF noise diagnostics.

    H+  = (HᴴH)^-1 Hᴴ                 pseudo-inverse
    R_u = sigma2 (HᴴH)^-1             noise autocorrelation after ZF
    snr_i = snr / [(HᴴH)^-1]_ii       per-stream output SNR

The Gram inverse can also come from a truncated Neumann series around the
diagonal of HᴴH, the cheap option when N_R >> N_T keeps the Gram matrix
diagonally dominant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from phy.channel import ChannelRealization


MAX_CONDITION = 1e10


class SingularChannelError(np.linalg.LinAlgError):
    """Gram matrix too ill-conditioned to invert; the channel should be redrawn."""


@dataclass(frozen=True)
class ZfFilter:
    pinv: np.ndarray
    gram: np.ndarray
    gram_inv: np.ndarray


def build_filter(ch: ChannelRealization, neumann_terms: Optional[int] = None,
                 max_condition: float = MAX_CONDITION) -> ZfFilter:
    h = ch.h
    gram = h.conj().T @ h
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > max_condition:
        raise SingularChannelError(f"Gram matrix condition number {cond:.3e} exceeds {max_condition:.1e}")
    if neumann_terms is None:
        gram_inv = np.linalg.inv(gram)
    else:
        gram_inv = neumann_inverse(gram, neumann_terms)
    return ZfFilter(pinv=gram_inv @ h.conj().T, gram=gram, gram_inv=gram_inv)


def zf_detect(f: ZfFilter, y: np.ndarray, snr: float) -> np.ndarray:
    """x + u / sqrt(snr): the signal scaling removed, ready for the slicer."""
    y = np.asarray(y)
    if y.shape != (f.pinv.shape[1],):
        raise ValueError(f"received vector of length {y.size}, filter expects {f.pinv.shape[1]}")
    return (f.pinv @ y) / np.sqrt(snr)


def noise_autocorrelation(f: ZfFilter, sigma2: float) -> np.ndarray:
    r = sigma2 * f.gram_inv
    return (r + r.conj().T) / 2


def post_zf_snr(f: ZfFilter, snr: float) -> np.ndarray:
    return snr / np.real(np.diag(f.gram_inv))


def neumann_inverse(gram: np.ndarray, terms: int) -> np.ndarray:
    """
    sum_{t<terms} (I - D^-1 T)^t D^-1, D = diag(T).

    Converges only when the spectral radius of I - D^-1 T is below one.
    """
    if terms < 1:
        raise ValueError(f"Neumann series needs at least one term, got {terms}")
    gram = np.asarray(gram)
    d_inv = np.diag(1.0 / np.diag(gram))
    residual = np.eye(gram.shape[0]) - d_inv @ gram
    radius = float(np.max(np.abs(np.linalg.eigvals(residual)))) if residual.size else 0.0
    if radius >= 1.0:
        raise ValueError(
            f"Neumann series diverges (spectral radius {radius:.3f} >= 1); use exact inversion"
        )
    approx = d_inv.astype(complex)
    term = d_inv.astype(complex)
    for _ in range(terms - 1):
        term = residual @ term
        approx = approx + term
    return approx
