"""
Base class for link models.

One trial runs the whole chain for a single codeword:
message -> RLC encode -> QAM map -> channel + detection -> slice/demap -> GRAND.
Subclasses only decide how symbol estimates are produced from the mapped
symbols (`detect`); the uncoded baseline also overrides `run`.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
import logging
import time

import numpy as np

from coding.gf2_linalg import BitWord, hamming_weight
from coding.grand import GrandConfig, grand_decode
from coding.rlc import encode, extract_message, rlc_generate
from phy.channel import NOISE_VARIANCE
from phy.modem import Constellation, demap_symbols, map_bits

logger = logging.getLogger(__name__)


@dataclass
class TrialOutcome:
    block_error: bool
    queries: int
    decode_seconds: float
    bit_errors: int  # weight of y_b XOR x_b before decoding


class BaseLink(ABC):
    """
    Shared trial pipeline.

    Random draws happen in a fixed order per trial (message, code, channel,
    noise) so an outcome depends only on the generator it is handed.
    """

    name = 'base'

    def __init__(self, cfg):
        self.cfg = cfg
        self.constellation = Constellation.square(cfg.m, cfg.mapping)
        self.grand_cfg = GrandConfig(n_b=cfg.n_b, query_cap=cfg.query_cap)
        self.sigma2 = 0.0 if cfg.noise_free else NOISE_VARIANCE
        self._cap_warned = False

    @abstractmethod
    def detect(self, symbols: np.ndarray, snr: float, rng: np.random.Generator) -> np.ndarray:
        """
        Send one symbol vector and return unsliced estimates of it.

        Args:
            symbols: N_T unit-energy QAM symbols
            snr: linear signal scaling of the channel
            rng: the trial's generator

        Returns:
            N_T complex estimates on the constellation's scale.
        """
        pass

    def run(self, snr: float, rng: np.random.Generator) -> TrialOutcome:
        cfg = self.cfg
        message = BitWord.random(cfg.k, rng)
        code = rlc_generate(cfg.n, cfg.k, rng)
        x_b = encode(code, message)

        estimates = self.detect(map_bits(self.constellation, x_b), snr, rng)
        y_b = demap_symbols(self.constellation, estimates)

        start = time.perf_counter_ns()
        outcome = grand_decode(code, y_b, self.grand_cfg)
        elapsed = time.perf_counter_ns() - start

        if not outcome.decoded and cfg.query_cap is not None and outcome.queries >= cfg.query_cap \
                and not self._cap_warned:
            logger.warning(f"GRAND hit the query cap of {cfg.query_cap}; abandoned decodes count as block errors")
            self._cap_warned = True

        return TrialOutcome(
            block_error=extract_message(code, outcome.codeword) != message,
            queries=outcome.queries,
            decode_seconds=elapsed / 1e9,
            bit_errors=hamming_weight(y_b ^ x_b),
        )
