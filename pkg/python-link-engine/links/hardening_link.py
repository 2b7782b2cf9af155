"""
Perfect channel hardening: the N_R x N_T channel after ZF collapses to N_T
parallel AWGN branches with noise power sigma2 / N_R each. Lower-bounds the
BLER of the Rayleigh ZF link at the same calibration.
"""

import numpy as np

from links.base_link import BaseLink
from phy.channel import hardening_transmit


class HardeningLink(BaseLink):

    name = 'hardening'

    def detect(self, symbols, snr, rng):
        y = hardening_transmit(symbols, self.sigma2, self.cfg.n_r, snr, rng)
        return y / np.sqrt(snr)
