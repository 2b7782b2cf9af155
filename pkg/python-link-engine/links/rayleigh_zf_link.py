"""
Flat Rayleigh mMIMO link with zero-forcing detection.
A fresh N_R x N_T channel is drawn for every trial.
"""

import logging

import numpy as np

from links.base_link import BaseLink
from phy.channel import NoiseParams, sample_channel, transmit
from phy.detector import SingularChannelError, build_filter, zf_detect

logger = logging.getLogger(__name__)

MAX_REDRAWS = 100


class RayleighZfLink(BaseLink):

    name = 'rayleigh_zf'

    def detect(self, symbols, snr, rng):
        cfg = self.cfg
        for attempt in range(MAX_REDRAWS):
            ch = sample_channel(cfg.n_r, cfg.n_t, rng)
            try:
                zf = build_filter(ch, neumann_terms=cfg.neumann_terms)
                break
            except SingularChannelError as e:
                logger.debug(f"Redrawing channel (attempt {attempt + 1}): {e}")
        else:
            raise SingularChannelError(f"no invertible channel after {MAX_REDRAWS} draws")

        y = transmit(ch, symbols, NoiseParams(sigma2=self.sigma2, snr=snr), rng)
        return zf_detect(zf, y, snr)
